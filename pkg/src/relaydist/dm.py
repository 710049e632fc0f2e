"""Finite-alphabet feasibility checks and brute-force distortion search.

The continuous schemes in schemes.py instantiate one general recipe:
describe the source sample S1 by a test channel p(z|s1), let the relay
decode the description with its correlated observation S2 as decoder
side information, and let the destination reconstruct from Z together
with its own side information S3.  On finite alphabets the recipe is
achievable at target distortion D whenever

  1. Z depends on the rest only through S1 (structural),
  2. the optimal reconstruction h(z, s3) meets E[d(S1, h)] <= D,
  3. the channel inputs respect their cost budgets,
  4a. I(S1; Z | S2) <= b * I(X1; Y1 | X2)      (relay can decode),
  4b. I(S1; Z | S3) <= b * I(X1, X2; Y)        (destination can decode),

with b channel uses per source sample and the description alphabet
capped at |Z| <= |S1| + 2.  ``check_achievability`` evaluates the five
conditions for a concrete witness; ``min_distortion_search`` scans
exhaustive simplex grids of test channels and joint input laws for the
smallest feasible distortion.

Mutual informations are in nats.  Problem instances load from a small
plain-text format, documented at ``load_problem``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PMF_TOL = 1e-12
COND_TOL = 1e-12
SEARCH_BUDGET = 10**8


class ProblemFormatError(ValueError):
    """Problem-file syntax or consistency error, with a 1-based line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SearchBudgetError(RuntimeError):
    """Requested grids exceed the exhaustive-search budget."""

    def __init__(self, n_test_channels: int, n_input_pmfs: int):
        self.n_test_channels = n_test_channels
        self.n_input_pmfs = n_input_pmfs
        self.required = n_test_channels * n_input_pmfs
        super().__init__(
            f"search needs {n_test_channels} x {n_input_pmfs} = "
            f"{self.required} grid combinations, over the {SEARCH_BUDGET} "
            f"budget; lower z_grid or x_grid"
        )


def _check_pmf_entries(p: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{what} has non-finite entries")
    if np.any(p < 0.0):
        raise ValueError(f"{what} has negative entries")


@dataclass(frozen=True)
class JointPmf:
    """Dense joint pmf over named finite alphabets (axis i has size
    probs.shape[i] and name names[i])."""

    names: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        names = tuple(self.names)
        if len(names) != p.ndim:
            raise ValueError(f"{len(names)} names for a {p.ndim}-axis tensor")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names in {names}")
        _check_pmf_entries(p, "pmf")
        if abs(p.sum() - 1.0) > PMF_TOL:
            raise ValueError(f"pmf sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "names", names)

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"no axis named {name!r} in {self.names}") from None

    def marginal(self, keep: tuple[str, ...]) -> np.ndarray:
        """Marginal tensor over ``keep`` (in this pmf's axis order)."""
        drop = tuple(i for i, n in enumerate(self.names) if n not in keep)
        return self.probs.sum(axis=drop) if drop else self.probs


def _entropy(p: np.ndarray) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return float(-terms.sum())


def conditional_mutual_information(p: JointPmf, a, b, given=()) -> float:
    """I(A; B | C) in nats for disjoint axis-name groups of p."""
    a = (a,) if isinstance(a, str) else tuple(a)
    b = (b,) if isinstance(b, str) else tuple(b)
    c = (given,) if isinstance(given, str) else tuple(given)
    groups = a + b + c
    for name in groups:
        p.axis(name)
    if len(set(groups)) != len(groups):
        raise ValueError(f"axis groups must be disjoint, got {a}, {b}, {c}")
    value = (
        _entropy(p.marginal(a + c))
        + _entropy(p.marginal(b + c))
        - _entropy(p.marginal(a + b + c))
        - _entropy(p.marginal(c))
    )
    return max(value, 0.0)


@dataclass(frozen=True)
class DmChannel:
    """Memoryless relay channel kernel p(y1, y | x1, x2), stored as a
    tensor over (x1, x2, y1, y)."""

    kernel: np.ndarray

    def __post_init__(self) -> None:
        k = np.asarray(self.kernel, dtype=float)
        if k.ndim != 4:
            raise ValueError(f"kernel must have 4 axes (x1, x2, y1, y), got {k.ndim}")
        _check_pmf_entries(k, "channel kernel")
        sums = k.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1.0)) > PMF_TOL:
            raise ValueError("some kernel slice p(.,.|x1,x2) does not sum to 1")
        object.__setattr__(self, "kernel", k)

    @property
    def nx1(self) -> int:
        return self.kernel.shape[0]

    @property
    def nx2(self) -> int:
        return self.kernel.shape[1]


@dataclass(frozen=True)
class TestChannel:
    """Description channel p(z | s1); row i is the law of Z given
    S1 = i.  The description alphabet is capped at |S1| + 2, which is
    enough to trace out the whole achievable region."""

    __test__ = False  # not a test case, despite the pytest-like name

    rows: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.rows, dtype=float)
        if r.ndim != 2:
            raise ValueError("test channel must be a (|S1|, |Z|) matrix")
        _check_pmf_entries(r, "test channel")
        if np.max(np.abs(r.sum(axis=1) - 1.0)) > PMF_TOL:
            raise ValueError("test channel rows must each sum to 1")
        if r.shape[1] > r.shape[0] + 2:
            raise ValueError(
                f"description alphabet size {r.shape[1]} exceeds |S1| + 2 = {r.shape[0] + 2}"
            )
        object.__setattr__(self, "rows", r)


@dataclass(frozen=True)
class DmProblem:
    """One finite-alphabet instance: source law over (S1, S2, S3),
    channel kernel, distortion matrix d(s1, s1_hat), per-letter input
    costs with budgets, and rate b (channel uses per source sample)."""

    source: JointPmf
    channel: DmChannel
    distortion: np.ndarray
    cost1: np.ndarray
    cost2: np.ndarray
    budget1: float
    budget2: float
    b: float = 1.0

    def __post_init__(self) -> None:
        if len(self.source.names) != 3:
            raise ValueError("source must have exactly three axes (S1, S2, S3)")
        d = np.asarray(self.distortion, dtype=float)
        if d.ndim != 2 or d.shape[0] != self.ns1:
            raise ValueError(f"distortion must be (|S1|, |S1_hat|), got {d.shape}")
        if not np.all(np.isfinite(d)) or np.any(d < 0.0):
            raise ValueError("distortion entries must be finite and >= 0")
        c1 = np.asarray(self.cost1, dtype=float)
        c2 = np.asarray(self.cost2, dtype=float)
        if c1.shape != (self.channel.nx1,) or c2.shape != (self.channel.nx2,):
            raise ValueError("cost vectors must match the input alphabets")
        if np.any(c1 < 0.0) or np.any(c2 < 0.0):
            raise ValueError("costs must be >= 0")
        if self.budget1 < 0.0 or self.budget2 < 0.0:
            raise ValueError("budgets must be >= 0")
        if not self.b > 0.0:
            raise ValueError("rate b must be > 0")
        object.__setattr__(self, "distortion", d)
        object.__setattr__(self, "cost1", c1)
        object.__setattr__(self, "cost2", c2)

    @property
    def ns1(self) -> int:
        return self.source.probs.shape[0]

    @property
    def nz(self) -> int:
        return self.ns1 + 2

    def described_joint(self, t: TestChannel) -> JointPmf:
        """Joint law of (S1, S2, S3, Z) under the description p(z|s1)."""
        if t.rows.shape[0] != self.ns1:
            raise ValueError("test channel rows do not match |S1|")
        probs = np.einsum("abc,az->abcz", self.source.probs, t.rows)
        return JointPmf(self.source.names + ("Z",), probs)

    def channel_joint(self, inputs: JointPmf) -> JointPmf:
        """Joint law of (X1, X2, Y1, Y) under a joint input law."""
        if inputs.probs.shape != (self.channel.nx1, self.channel.nx2):
            raise ValueError("input pmf does not match the channel input alphabets")
        probs = np.einsum("ij,ijkl->ijkl", inputs.probs, self.channel.kernel)
        return JointPmf(("X1", "X2", "Y1", "Y"), probs)


def optimal_reconstruction(problem: DmProblem, t: TestChannel) -> tuple[np.ndarray, float]:
    """Best deterministic map h(z, s3) -> s1_hat and its expected
    distortion.  Ties and zero-probability (z, s3) cells resolve to the
    smallest reconstruction index."""
    if t.rows.shape[0] != problem.ns1:
        raise ValueError("test channel rows do not match |S1|")
    # joint law of (s1, s3, z); s2 integrates out
    pasz = np.einsum("abc,az->acz", problem.source.probs, t.rows)
    weights = np.einsum("acz,ah->zch", pasz, problem.distortion)
    h = np.argmin(weights, axis=2)
    expected = float(weights.min(axis=2).sum())
    return h, expected


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    satisfied: bool
    lhs: float | None = None
    rhs: float | None = None
    note: str = ""


@dataclass(frozen=True)
class AchievabilityReport:
    conditions: tuple[ConditionCheck, ...]
    feasible: bool

    def condition(self, name: str) -> ConditionCheck:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def check_achievability(
    problem: DmProblem, t: TestChannel, inputs: JointPmf, target_d: float
) -> AchievabilityReport:
    """Evaluate all feasibility conditions for one witness, with slack
    1e-12; the report lists both sides of every comparison."""
    checks = []
    checks.append(
        ConditionCheck(
            "markov-chain",
            True,
            note="structural: Z is generated from S1 alone",
        )
    )
    _, expected = optimal_reconstruction(problem, t)
    checks.append(
        ConditionCheck(
            "reconstruction-distortion", expected <= target_d + COND_TOL, expected, target_d
        )
    )
    marg1 = inputs.probs.sum(axis=1)
    marg2 = inputs.probs.sum(axis=0)
    e1 = float(marg1 @ problem.cost1)
    e2 = float(marg2 @ problem.cost2)
    checks.append(ConditionCheck("cost-source", e1 <= problem.budget1 + COND_TOL, e1, problem.budget1))
    checks.append(ConditionCheck("cost-relay", e2 <= problem.budget2 + COND_TOL, e2, problem.budget2))

    described = problem.described_joint(t)
    s1, s2, s3 = problem.source.names
    lhs_relay = conditional_mutual_information(described, s1, "Z", s2)
    lhs_dest = conditional_mutual_information(described, s1, "Z", s3)
    cj = problem.channel_joint(inputs)
    rhs_relay = problem.b * conditional_mutual_information(cj, "X1", "Y1", "X2")
    rhs_dest = problem.b * conditional_mutual_information(cj, ("X1", "X2"), "Y")
    checks.append(
        ConditionCheck("relay-decoding-rate", lhs_relay <= rhs_relay + COND_TOL, lhs_relay, rhs_relay)
    )
    checks.append(
        ConditionCheck("destination-decoding-rate", lhs_dest <= rhs_dest + COND_TOL, lhs_dest, rhs_dest)
    )
    return AchievabilityReport(tuple(checks), all(c.satisfied for c in checks))


def simplex_grid(denominator: int, parts: int) -> np.ndarray:
    """All pmfs over ``parts`` outcomes with entries m/denominator, in a
    fixed enumeration order (first coordinate descending)."""
    if denominator < 1 or parts < 1:
        raise ValueError("denominator and parts must be >= 1")

    def rec(total: int, slots: int):
        if slots == 1:
            yield (total,)
            return
        for head in range(total, -1, -1):
            for tail in rec(total - head, slots - 1):
                yield (head,) + tail

    grid = np.array(list(rec(denominator, parts)), dtype=float)
    return grid / denominator


def _batched_entropy(p: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return -terms.sum(axis=axes)


@dataclass(frozen=True)
class SearchResult:
    best_distortion: float
    test_channel: TestChannel
    inputs: JointPmf
    n_test_channels: int
    n_input_pmfs: int


def min_distortion_search(problem: DmProblem, z_grid: int = 8, x_grid: int = 6) -> SearchResult:
    """Exhaustive search for the smallest feasible distortion.

    Test-channel rows range over the simplex grid with denominator
    ``z_grid`` on the capped description alphabet; joint input laws
    (not product laws) range over the grid with denominator ``x_grid``.
    Refuses outright if the grids multiply past the 1e8 budget.
    Deterministic: ties resolve to the earliest grid element.
    """
    ns1, nz = problem.ns1, problem.nz
    nx = problem.channel.nx1 * problem.channel.nx2
    n_rows = math.comb(z_grid + nz - 1, nz - 1)
    n_t = n_rows**ns1
    n_q = math.comb(x_grid + nx - 1, nx - 1)
    if n_t * n_q > SEARCH_BUDGET:
        raise SearchBudgetError(n_t, n_q)

    # input-side quantities, one pass (the input grid is the small one)
    q_grid = simplex_grid(x_grid, nx).reshape(-1, problem.channel.nx1, problem.channel.nx2)
    e1 = q_grid.sum(axis=2) @ problem.cost1
    e2 = q_grid.sum(axis=1) @ problem.cost2
    cost_ok = (e1 <= problem.budget1 + COND_TOL) & (e2 <= problem.budget2 + COND_TOL)
    if not cost_ok.any():
        raise ValueError("no input law on the grid satisfies the cost budgets")
    q_grid = q_grid[cost_ok]
    cj = np.einsum("mij,ijkl->mijkl", q_grid, problem.channel.kernel)
    no_y = cj.sum(axis=4)
    rate_relay = problem.b * np.maximum(
        _batched_entropy(no_y.sum(axis=3), (1, 2))
        + _batched_entropy(no_y.sum(axis=1), (1, 2))
        - _batched_entropy(no_y, (1, 2, 3))
        - _batched_entropy(no_y.sum(axis=(1, 3)), (1,)),
        0.0,
    )
    no_y1 = cj.sum(axis=3)
    rate_dest = problem.b * np.maximum(
        _batched_entropy(no_y1.sum(axis=3), (1, 2))
        + _batched_entropy(no_y1.sum(axis=(1, 2)), (1,))
        - _batched_entropy(no_y1, (1, 2, 3)),
        0.0,
    )

    rows = simplex_grid(z_grid, nz)
    row_index = np.stack(
        np.meshgrid(*([np.arange(n_rows)] * ns1), indexing="ij"), axis=-1
    ).reshape(-1, ns1)

    best_d = np.inf
    best_t_idx = -1
    best_q_idx = -1
    source = problem.source.probs
    chunk = max(1, min(65536, SEARCH_BUDGET // max(len(q_grid), 1)))
    for start in range(0, n_t, chunk):
        t_batch = rows[row_index[start : start + chunk]]  # (n, ns1, nz)
        joint = np.einsum("abc,naz->nabcz", source, t_batch)
        with_s2 = joint.sum(axis=3)  # (n, a, b, z)
        lhs_relay = (
            _batched_entropy(with_s2.sum(axis=3), (1, 2))
            + _batched_entropy(with_s2.sum(axis=1), (1, 2))
            - _batched_entropy(with_s2, (1, 2, 3))
            - _batched_entropy(with_s2.sum(axis=(1, 3)), (1,))
        )
        with_s3 = joint.sum(axis=2)  # (n, a, c, z)
        lhs_dest = (
            _batched_entropy(with_s3.sum(axis=3), (1, 2))
            + _batched_entropy(with_s3.sum(axis=1), (1, 2))
            - _batched_entropy(with_s3, (1, 2, 3))
            - _batched_entropy(with_s3.sum(axis=(1, 3)), (1,))
        )
        weights = np.einsum("nacz,ah->nczh", with_s3, problem.distortion)
        d_opt = weights.min(axis=3).sum(axis=(1, 2))

        pair_ok = (lhs_relay[:, None] <= rate_relay[None, :] + COND_TOL) & (
            lhs_dest[:, None] <= rate_dest[None, :] + COND_TOL
        )
        feasible = pair_ok.any(axis=1)
        if not feasible.any():
            continue
        cand = np.where(feasible, d_opt, np.inf)
        i = int(np.argmin(cand))
        if cand[i] < best_d:
            best_d = float(cand[i])
            best_t_idx = start + i
            best_q_idx = int(np.argmax(pair_ok[i]))

    if best_t_idx < 0:
        # cannot happen: a constant test channel has zero-rate needs
        raise RuntimeError("no feasible test channel found on the grid")
    witness_t = TestChannel(rows[row_index[best_t_idx]])
    witness_q = JointPmf(("X1", "X2"), q_grid[best_q_idx])
    return SearchResult(best_d, witness_t, witness_q, n_t, int(cost_ok.sum()))


# --- plain-text problem files ---

_FORMAT_DOC = """Problem file grammar (whitespace separated, '#' comments):

    rate <b>                                    optional, default 1
    source <name> <size> <name> <size> <name> <size>
    <size1*size2*size3 probabilities, row-major>
    channel <name> <size> <name> <size> <name> <size> <name> <size>
    <nx1*nx2*ny1*ny probabilities p(y1,y|x1,x2), row-major over (x1,x2,y1,y)>
    distortion <n_reconstructions>
    <|S1|*n values d(s1, s1_hat), row-major>
    cost1 <nx1 values>                          optional, default zeros
    budget1 <value>                             optional, default 0
    cost2 <nx2 values>                          optional, default 0s
    budget2 <value>                             optional, default 0
"""


class _Tokens:
    def __init__(self, text: str):
        self.items: list[tuple[str, int]] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0]
            for tok in body.split():
                self.items.append((tok, lineno))
        self.pos = 0
        self.last_line = max((ln for _, ln in self.items), default=1)

    def peek(self) -> tuple[str, int] | None:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self, what: str) -> tuple[str, int]:
        item = self.peek()
        if item is None:
            raise ProblemFormatError(f"unexpected end of file, expected {what}", self.last_line)
        self.pos += 1
        return item

    def next_int(self, what: str) -> tuple[int, int]:
        tok, line = self.next(what)
        try:
            return int(tok), line
        except ValueError:
            raise ProblemFormatError(f"expected {what} (integer), got {tok!r}", line) from None

    def next_float(self, what: str) -> tuple[float, int]:
        tok, line = self.next(what)
        try:
            return float(tok), line
        except ValueError:
            raise ProblemFormatError(f"expected {what} (number), got {tok!r}", line) from None

    def next_floats(self, count: int, what: str) -> list[float]:
        return [self.next_float(what)[0] for _ in range(count)]


def parse_problem(text: str) -> DmProblem:
    """Parse the plain-text problem format (see load_problem)."""
    toks = _Tokens(text)
    rate = None
    source = None
    kernel = None
    distortion = None
    cost1 = budget1 = cost2 = budget2 = None
    seen: set[str] = set()

    while toks.peek() is not None:
        keyword, line = toks.next("section keyword")
        if keyword in seen:
            raise ProblemFormatError(f"duplicate section {keyword!r}", line)
        seen.add(keyword)
        if keyword == "rate":
            rate, _ = toks.next_float("rate value")
        elif keyword == "source":
            names, sizes = [], []
            for _ in range(3):
                names.append(toks.next("source axis name")[0])
                size, sline = toks.next_int("source axis size")
                if size < 1:
                    raise ProblemFormatError(f"axis size must be >= 1, got {size}", sline)
                sizes.append(size)
            values = toks.next_floats(int(np.prod(sizes)), "source probability")
            try:
                source = JointPmf(tuple(names), np.array(values).reshape(sizes))
            except ValueError as e:
                raise ProblemFormatError(str(e), line) from None
        elif keyword == "channel":
            sizes = []
            for _ in range(4):
                toks.next("channel axis name")
                size, sline = toks.next_int("channel axis size")
                if size < 1:
                    raise ProblemFormatError(f"axis size must be >= 1, got {size}", sline)
                sizes.append(size)
            values = toks.next_floats(int(np.prod(sizes)), "channel probability")
            try:
                kernel = DmChannel(np.array(values).reshape(sizes))
            except ValueError as e:
                raise ProblemFormatError(str(e), line) from None
        elif keyword == "distortion":
            if source is None:
                raise ProblemFormatError("distortion section must follow source", line)
            nhat, sline = toks.next_int("reconstruction alphabet size")
            if nhat < 1:
                raise ProblemFormatError(f"alphabet size must be >= 1, got {nhat}", sline)
            ns1 = source.probs.shape[0]
            values = toks.next_floats(ns1 * nhat, "distortion value")
            distortion = np.array(values).reshape(ns1, nhat)
        elif keyword == "cost1":
            if kernel is None:
                raise ProblemFormatError("cost1 section must follow channel", line)
            cost1 = np.array(toks.next_floats(kernel.nx1, "cost value"))
        elif keyword == "cost2":
            if kernel is None:
                raise ProblemFormatError("cost2 section must follow channel", line)
            cost2 = np.array(toks.next_floats(kernel.nx2, "cost value"))
        elif keyword == "budget1":
            budget1, _ = toks.next_float("budget value")
        elif keyword == "budget2":
            budget2, _ = toks.next_float("budget value")
        else:
            raise ProblemFormatError(f"unknown section keyword {keyword!r}", line)

    if source is None:
        raise ProblemFormatError("missing source section", toks.last_line)
    if kernel is None:
        raise ProblemFormatError("missing channel section", toks.last_line)
    if distortion is None:
        raise ProblemFormatError("missing distortion section", toks.last_line)
    try:
        return DmProblem(
            source=source,
            channel=kernel,
            distortion=distortion,
            cost1=cost1 if cost1 is not None else np.zeros(kernel.nx1),
            cost2=cost2 if cost2 is not None else np.zeros(kernel.nx2),
            budget1=budget1 if budget1 is not None else 0.0,
            budget2=budget2 if budget2 is not None else 0.0,
            b=rate if rate is not None else 1.0,
        )
    except ValueError as e:
        raise ProblemFormatError(str(e), toks.last_line) from None


def load_problem(path) -> DmProblem:
    return parse_problem(Path(path).read_text())


load_problem.__doc__ = "Load a problem instance from a file.\n\n" + _FORMAT_DOC
