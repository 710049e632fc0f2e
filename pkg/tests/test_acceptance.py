"""End-to-end acceptance checks.

Each criterion prints a single ``ACCEPTANCE <n> <name>: PASS|FAIL`` line
(run ``pytest -s`` to see them live) and then asserts, so the pytest
verdict and the printed line always agree.  The whole module is heavier
than the unit tests: it re-derives distortions from scratch, sweeps the
canned comparison figures at full search budgets, and fuzzes the
finite-alphabet checker.
"""

import dataclasses
import math
from pathlib import Path

import numpy as np

import relaydist
from relaydist import dm
from relaydist.cli import Curve, SweepSpec, main, run_sweep
from relaydist.gauss import GaussScenario
from relaydist.schemes import (
    SchemeId,
    evaluate,
    hjdf_at,
    hpjdf_at,
    jdf_at,
    pjdf_at,
)

from _oracles import (
    oracle_cf,
    oracle_hjdf,
    oracle_hpjdf,
    oracle_jdf,
    oracle_pjdf,
    oracle_uncoded,
    random_scenario,
)

DATA_DIR = Path(relaydist.__file__).parent / "data"


def _finish(num: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({name}): {detail}"


def test_criterion_1_oracle_equivalence():
    """Fixed-parameter distortions agree with an independent estimator
    built from the explicit joint covariance of source and observations."""
    rng = np.random.default_rng(101)
    worst = 0.0
    worst_case = ""
    for _ in range(1000):
        s = random_scenario(rng, rho_decimals=6)
        theta, gamma, xi = rng.random(3)
        pairs = [
            ("jdf", jdf_at(s, xi), oracle_jdf(s, xi)),
            ("hjdf", hjdf_at(s, gamma, xi), oracle_hjdf(s, gamma, xi)),
            ("pjdf", pjdf_at(s, theta, xi), oracle_pjdf(s, theta, xi)),
            ("hpjdf", hpjdf_at(s, theta, gamma, xi), oracle_hpjdf(s, theta, gamma, xi)),
            ("uncoded_sc", evaluate(SchemeId.UNCODED_SOURCE_COOP, s).distortion, oracle_uncoded(s)),
            ("cf", evaluate(SchemeId.CLASSIC_CF, s).distortion, oracle_cf(s)),
        ]
        for name, got, want in pairs:
            err = abs(got - want)
            if err > worst:
                worst, worst_case = err, f"{name} at {s}"
    _finish(1, "oracle equivalence", worst <= 1e-9, f"worst |error| {worst:.3g} ({worst_case})")


def test_criterion_2_boundary_reductions():
    """Degenerate parameter choices collapse each layered scheme onto the
    simpler one it contains."""
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(200):
        s = random_scenario(rng)
        theta, gamma, xi = rng.random(3)
        d_dt = 1.0 / (1.0 + s.p1)
        checks = [
            abs(hjdf_at(s, 1.0, xi) - jdf_at(s, xi)),
            abs(pjdf_at(s, 1.0, xi) - jdf_at(s, xi)),
            abs(pjdf_at(s, 0.0, xi) - d_dt),
            abs(hpjdf_at(s, theta, 1.0, xi) - pjdf_at(s, theta, xi)),
            abs(hpjdf_at(s, 1.0, gamma, xi) - hjdf_at(s, gamma, xi)),
            abs(
                evaluate(SchemeId.CLASSIC_DF, s).distortion
                - evaluate(SchemeId.JDF, dataclasses.replace(s, rho=0.0)).distortion
            ),
        ]
        worst = max(worst, max(checks))
    # a dead R-D link with a strong S-R link leaves exactly the direct path
    s0 = GaussScenario(p1=2.5, p2=1.0, alpha=3.0, beta=0.0, rho=0.4)
    worst = max(worst, abs(evaluate(SchemeId.JDF, s0).distortion - 1.0 / 3.5))
    _finish(2, "boundary reductions", worst <= 1e-12, f"worst |error| {worst:.3g}")


def test_criterion_3_cutset_dominance():
    """No achievable scheme ever lands below the cut-set lower bound."""
    rng = np.random.default_rng(303)
    budgets = {
        SchemeId.HJDF: (21, 2),
        SchemeId.PJDF: (21, 2),
        SchemeId.HPJDF: (11, 2),
    }
    achievable = [
        SchemeId.DIRECT_TX,
        SchemeId.CLASSIC_DF,
        SchemeId.CLASSIC_CF,
        SchemeId.UNCODED_SOURCE_COOP,
        SchemeId.JDF,
        SchemeId.HJDF,
        SchemeId.PJDF,
        SchemeId.HPJDF,
    ]
    violations = 0
    worst_gap = 0.0
    for _ in range(10_000):
        s = random_scenario(rng)
        lb = evaluate(SchemeId.CUTSET, s, 101, 6).distortion
        for scheme in achievable:
            cp, rr = budgets.get(scheme, (None, None))
            gap = lb - evaluate(scheme, s, cp, rr).distortion
            if gap > 1e-9:
                violations += 1
                worst_gap = max(worst_gap, gap)
    _finish(
        3,
        "cut-set dominance",
        violations == 0,
        f"{violations} violations, worst bound excess {worst_gap:.3g}",
    )


def test_criterion_4_decode_forward_balance_point():
    """At p1 = p2 = beta = 1, alpha = 4, rho = 0, the two decode-forward
    constraints balance at xi = 1/2 (the positive root of
    2 xi^2 + xi - 1 = 0) and the optimized distortion is exactly 1/4."""
    assert 2.0 * 0.5**2 + 0.5 - 1.0 == 0.0
    s = GaussScenario(p1=1.0, p2=1.0, alpha=4.0, beta=1.0, rho=0.0)
    r = evaluate(SchemeId.CLASSIC_DF, s)
    # independent dense scan of the single search parameter
    xis = np.linspace(0.0, 1.0 - 1e-12, 200_001)
    sigma2 = np.maximum(1.0 / (4.0 * (1.0 - xis**2)), 1.0 / (2.0 + 2.0 * xis))
    dense = sigma2 / (1.0 + sigma2)
    i = int(np.argmin(dense))
    ok = (
        abs(r.params["xi"] - 0.5) <= 1e-6
        and abs(r.distortion - 0.25) <= 1e-6
        and abs(xis[i] - 0.5) <= 1e-4
        and abs(dense[i] - 0.25) <= 1e-9
        and abs(r.distortion - 1.0 / (3.0 + 2.0 * r.params["xi"])) <= 1e-9
    )
    _finish(
        4,
        "decode-forward balance point",
        ok,
        f"xi {r.params['xi']:.8f}, D {r.distortion:.8f}, dense argmin {xis[i]:.6f}",
    )


def test_criterion_5_figure_orderings():
    """The qualitative orderings visible in the canned figures hold
    pointwise at full search budgets, and layered searches never lose to
    the schemes their parameter grids contain."""
    problems = []

    def sweep(spec, curves):
        header, rows = run_sweep(spec, curves)
        return {h[: -len("_distortion")]: np.array(rows)[:, i + 1] for i, h in enumerate(header[1:])}

    # correlation-aware decoding beats both classic baselines it extends
    fig2 = sweep(
        SweepSpec("sr_db", 0.0, 20.0, 51, sd_db=5.0, rd_db=10.0),
        (
            Curve("df", SchemeId.CLASSIC_DF),
            Curve("cf", SchemeId.CLASSIC_CF),
            Curve("jdf03", SchemeId.JDF, rho=0.3),
            Curve("jdf09", SchemeId.JDF, rho=0.9),
        ),
    )
    if not np.all(fig2["jdf09"] <= np.minimum(fig2["df"], fig2["cf"]) + 1e-9):
        problems.append("high-correlation decoding lost to a classic baseline")
    if not np.all(fig2["jdf03"] <= fig2["df"] + 1e-9):
        problems.append("low-correlation decoding lost to correlation-blind decoding")

    # layering pays off where the relay link is weak, and never hurts
    comparators = (
        Curve("jdf", SchemeId.JDF),
        Curve("pjdf", SchemeId.PJDF),
        Curve("hjdf", SchemeId.HJDF),
        Curve("hpjdf", SchemeId.HPJDF),
        Curve("cutset", SchemeId.CUTSET),
    )
    fig3 = sweep(SweepSpec("sr_db", -5.0, 20.0, 51, sd_db=5.0, rd_db=10.0, rho=0.5), comparators)
    axis = np.linspace(-5.0, 20.0, 51)
    if not np.any((axis < 5.0) & (fig3["pjdf"] < fig3["jdf"] - 1e-9)):
        problems.append("power splitting never strictly helped at weak relay SNR")
    for fid, data in (
        ("fig3", fig3),
        ("fig4", sweep(SweepSpec("rd_db", -5.0, 20.0, 51, sd_db=0.0, sr_db=0.0, rho=0.9), comparators)),
        ("fig5", sweep(SweepSpec("rho", 0.0, 1.0, 51, sd_db=4.0, sr_db=10.0, rd_db=4.0), comparators)),
    ):
        if not np.all(data["hjdf"] <= data["jdf"] + 1e-9):
            problems.append(f"{fid}: refinement layer lost to plain decoding")
        if not np.all(
            data["hpjdf"]
            <= np.minimum(np.minimum(data["jdf"], data["pjdf"]), data["hjdf"]) + 1e-9
        ):
            problems.append(f"{fid}: full layering lost to a sub-scheme")
        for name in ("jdf", "pjdf", "hjdf", "hpjdf"):
            if not np.all(data[name] >= data["cutset"] - 1e-9):
                problems.append(f"{fid}: {name} fell below the lower bound")

    # nested shared grids make the containment exact, independent of
    # refinement basins: check it on random scenarios
    rng = np.random.default_rng(505)
    for _ in range(500):
        s = random_scenario(rng)
        d_dt = 1.0 / (1.0 + s.p1)
        d_jdf = evaluate(SchemeId.JDF, s, 41, 0).distortion
        d_hjdf = evaluate(SchemeId.HJDF, s, 41, 0).distortion
        d_pjdf = evaluate(SchemeId.PJDF, s, 41, 0).distortion
        d_hp = evaluate(SchemeId.HPJDF, s, 41, 0).distortion
        if not (
            d_hjdf <= d_jdf + 1e-9
            and d_pjdf <= min(d_jdf, d_dt) + 1e-9
            and d_hp <= min(d_hjdf, d_pjdf) + 1e-9
        ):
            problems.append(f"nested-grid containment failed at {s}")
            break
    _finish(5, "figure orderings", not problems, "; ".join(problems))


def test_criterion_6_resource_monotonicity():
    """Optimized joint decoding improves (weakly) with more source power,
    more relay power and more correlation."""
    worst = 0.0

    def run(scenarios):
        nonlocal worst
        d = [evaluate(SchemeId.JDF, s).distortion for s in scenarios]
        worst = max(worst, float(np.max(np.diff(d))))

    run([GaussScenario(p1=p, p2=1.0, alpha=2.0, beta=1.0, rho=0.5) for p in np.linspace(0.1, 20.0, 50)])
    run([GaussScenario(p1=2.0, p2=1.0, alpha=2.0, beta=b, rho=0.5) for b in np.linspace(0.0, 20.0, 50)])
    run([GaussScenario(p1=2.0, p2=1.0, alpha=2.0, beta=1.0, rho=r) for r in np.linspace(0.0, 0.999, 50)])
    _finish(6, "resource monotonicity", worst <= 1e-10, f"worst increase {worst:.3g}")


def test_criterion_7_finite_alphabet_checker():
    """Information measures obey the standard identities, the exhaustive
    search lands next to an independent converse, and every witness it
    returns actually passes (and tightening the target makes it fail)."""
    problems = []

    # (a) nonnegativity and the chain rule on random joint laws
    rng = np.random.default_rng(707)
    for _ in range(1000):
        shape = tuple(rng.integers(2, 4, size=3))
        probs = rng.random(shape) ** 2
        p = dm.JointPmf(("a", "b", "c"), probs / probs.sum())
        i_ab = dm.conditional_mutual_information(p, "a", "b")
        i_ac_b = dm.conditional_mutual_information(p, "a", "c", "b")
        i_a_bc = dm.conditional_mutual_information(p, "a", ("b", "c"))
        if i_ab < 0 or i_ac_b < 0:
            problems.append("negative mutual information")
            break
        if abs(i_a_bc - (i_ab + i_ac_b)) > 1e-10:
            problems.append(f"chain rule off by {abs(i_a_bc - (i_ab + i_ac_b)):.3g}")
            break

    # (b) the binary toy search sits within one grid step of the converse
    problem = dm.load_problem(DATA_DIR / "binary_toy.txt")
    result = dm.min_distortion_search(problem, z_grid=8, x_grid=6)
    if abs(result.best_distortion - 0.125) > 1e-9:
        problems.append(f"binary toy best distortion {result.best_distortion!r} != 0.125")
    # independent converse: the destination cannot receive more than the
    # best single-letter mutual information the input grid allows, and the
    # binary-source rate-distortion function inverts it
    kernel_y = problem.channel.kernel.sum(axis=2)  # p(y | x1, x2)
    best_c = 0.0
    for law in dm.simplex_grid(6, 4).reshape(-1, 2, 2):
        pxy = law[:, :, None] * kernel_y
        px = pxy.sum(axis=2, keepdims=True)
        py = pxy.sum(axis=(0, 1), keepdims=True)
        mask = pxy > 0
        best_c = max(best_c, float((pxy[mask] * np.log(pxy[mask] / (px * py)[mask])).sum()))
    c_bits = best_c / math.log(2.0)

    def h2_bits(d):
        return -(d * math.log2(d) + (1.0 - d) * math.log2(1.0 - d))

    lo, hi = 1e-12, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1.0 - h2_bits(mid) > c_bits:
            lo = mid
        else:
            hi = mid
    d_star = 0.5 * (lo + hi)
    if result.best_distortion < d_star - 1e-9:
        problems.append(f"search beat the converse: {result.best_distortion} < {d_star:.6f}")
    if abs(result.best_distortion - d_star) > 0.125:
        problems.append(
            f"search {result.best_distortion} further than one grid step from converse {d_star:.6f}"
        )

    # (c) returned witnesses pass at their own distortion and fail once
    # the target is tightened past them
    ternary = dm.load_problem(DATA_DIR / "ternary_toy.txt")
    for prob, zg, xg in ((problem, 8, 6), (problem, 4, 4), (ternary, 4, 4)):
        res = dm.min_distortion_search(prob, z_grid=zg, x_grid=xg)
        at = dm.check_achievability(prob, res.test_channel, res.inputs, res.best_distortion)
        below = dm.check_achievability(
            prob, res.test_channel, res.inputs, res.best_distortion - 0.01
        )
        if not at.feasible:
            problems.append(f"witness rejected at its own distortion (z={zg}, x={xg})")
        if below.feasible:
            problems.append(f"witness accepted below its distortion (z={zg}, x={xg})")
        if below.condition("reconstruction-distortion").satisfied:
            problems.append("tightened target failed for an unexpected reason")
    _finish(7, "finite-alphabet checker", not problems, "; ".join(problems))


def test_criterion_8_deterministic_outputs(tmp_path):
    """Repeated CLI figure runs produce byte-identical files."""

    def render(fid, name, extra=()):
        out = tmp_path / name
        code = main(["figure", fid, "--out", str(out), *extra])
        assert code == 0
        return out.read_bytes()

    ok = render("fig2", "a.csv") == render("fig2", "b.csv")
    reduced = ("--grid", "7", "--refine-rounds", "1")
    ok = ok and render("fig5", "c.csv", reduced) == render("fig5", "d.csv", reduced)
    _finish(8, "deterministic outputs", ok, "repeated figure runs differed")
