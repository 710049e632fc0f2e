"""Command-line front end: eval, sweep, figure and dm subcommands.

Exit codes: 0 success, 1 output I/O failure, 2 usage or validation
error (including problem-file parse errors), 3 exhaustive-search budget
refusal.  All outputs are deterministic: repeated runs with the same
arguments produce byte-identical files.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dm
from .gauss import LinkSnrs, scenario_from_snrs
from .schemes import EvalResult, SchemeId, evaluate

SWEEP_AXES = ("sr_db", "rd_db", "sd_db", "rho")


@dataclass(frozen=True)
class SweepSpec:
    """One axis swept over [start, stop], everything else held fixed."""

    axis: str
    start: float
    stop: float
    steps: int
    sd_db: float = 0.0
    sr_db: float = 0.0
    rd_db: float = 0.0
    rho: float = 0.0
    schemes: tuple[SchemeId, ...] = ()

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")
        if not self.start < self.stop:
            raise ValueError(f"need start < stop, got [{self.start}, {self.stop}]")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")

    def axis_values(self) -> np.ndarray:
        values = np.linspace(self.start, self.stop, self.steps)
        if self.axis == "rho":
            values = np.clip(values, -1.0, 1.0)
        return values


@dataclass(frozen=True)
class Curve:
    """One CSV column: a scheme, optionally pinning its own rho."""

    column: str
    scheme: SchemeId
    rho: float | None = None


def run_sweep(
    spec: SweepSpec,
    curves: tuple[Curve, ...],
    coarse_points: int | None = None,
    refine_rounds: int | None = None,
) -> tuple[list[str], list[list[float]]]:
    """Evaluate every curve along the sweep; returns (header, rows)."""
    header = ["axis_value"] + [f"{c.column}_distortion" for c in curves]
    rows = []
    for v in spec.axis_values():
        fixed = {k: getattr(spec, k) for k in ("sd_db", "sr_db", "rd_db", "rho")}
        fixed[spec.axis] = float(v)
        snrs = LinkSnrs(fixed["sd_db"], fixed["sr_db"], fixed["rd_db"])
        row = [float(v)]
        for c in curves:
            rho = fixed["rho"] if c.rho is None else c.rho
            s = scenario_from_snrs(snrs, rho)
            row.append(evaluate(c.scheme, s, coarse_points, refine_rounds).distortion)
        rows.append(row)
    return header, rows


@dataclass(frozen=True)
class FigureSpec:
    title: str
    spec: SweepSpec
    curves: tuple[Curve, ...]
    xlabel: str
    notes: tuple[str, ...] = ()


def _figures() -> dict[str, FigureSpec]:
    baseline_note = (
        "omitted curves: the adaptive compress-forward and separation-based "
        "source-cooperation baselines depend on companion work not implemented here"
    )
    return {
        "fig2": FigureSpec(
            title="decode-based vs compress-based relaying, S-D 5 dB, R-D 10 dB",
            spec=SweepSpec("sr_db", 0.0, 20.0, 51, sd_db=5.0, rd_db=10.0),
            curves=(
                Curve("df", SchemeId.CLASSIC_DF),
                Curve("cf", SchemeId.CLASSIC_CF),
                Curve("jdf_rho0.3", SchemeId.JDF, rho=0.3),
                Curve("jdf_rho0.9", SchemeId.JDF, rho=0.9),
            ),
            xlabel="S-R SNR (dB)",
            notes=(baseline_note,),
        ),
        "fig3": FigureSpec(
            title="power-split variants, S-D 5 dB, R-D 10 dB, rho 0.5",
            spec=SweepSpec("sr_db", -5.0, 20.0, 51, sd_db=5.0, rd_db=10.0, rho=0.5),
            curves=(
                Curve("jdf", SchemeId.JDF),
                Curve("pjdf", SchemeId.PJDF),
                Curve("hjdf", SchemeId.HJDF),
                Curve("hpjdf", SchemeId.HPJDF),
                Curve("cutset", SchemeId.CUTSET),
            ),
            xlabel="S-R SNR (dB)",
            notes=(baseline_note,),
        ),
        "fig4": FigureSpec(
            title="hybrid scheme vs analog cooperation, S-D 0 dB, S-R 0 dB, rho 0.9",
            spec=SweepSpec("rd_db", -5.0, 20.0, 51, sd_db=0.0, sr_db=0.0, rho=0.9),
            curves=(
                Curve("hpjdf", SchemeId.HPJDF),
                Curve("uncoded_sc", SchemeId.UNCODED_SOURCE_COOP),
                Curve("cutset", SchemeId.CUTSET),
            ),
            xlabel="R-D SNR (dB)",
            notes=(baseline_note,),
        ),
        "fig5": FigureSpec(
            title="effect of correlation, S-D 4 dB, S-R 10 dB, R-D 4 dB",
            spec=SweepSpec("rho", 0.0, 1.0, 51, sd_db=4.0, sr_db=10.0, rd_db=4.0),
            curves=(
                Curve("hpjdf", SchemeId.HPJDF),
                Curve("uncoded_sc", SchemeId.UNCODED_SOURCE_COOP),
                Curve("cutset", SchemeId.CUTSET),
            ),
            xlabel="correlation rho",
            notes=(baseline_note,),
        ),
    }


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_csv(out: str | None, comments: list[str], header: list[str], rows) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as f:
            f.write(text)


def _write_gnuplot(out: str, header: list[str], xlabel: str) -> None:
    csv_name = Path(out).name
    gp_path = Path(out).with_suffix(".gp")
    lines = [
        f"# gnuplot companion for {csv_name}",
        'set datafile separator ","',
        "set key top right",
        "set logscale y",
        f'set xlabel "{xlabel}"',
        'set ylabel "distortion"',
    ]
    plots = [
        f'"{csv_name}" using 1:{i + 2} with lines title "{name[: -len("_distortion")]}"'
        for i, name in enumerate(header[1:])
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    with open(gp_path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _print_result(r: EvalResult) -> None:
    print(f"scheme: {r.scheme.value}")
    print(f"distortion: {r.distortion:.9g}")
    print(f"distortion_db: {10.0 * math.log10(r.distortion):.9g}")
    for k, v in r.params.items():
        print(f"{k}: {v:.9g}")
    if r.degeneracy is not None:
        print(f"degenerate: {r.degeneracy}")


def cmd_eval(args) -> int:
    scheme = SchemeId.from_token(args.scheme)
    snrs = LinkSnrs(args.sd_db, args.sr_db, args.rd_db)
    s = scenario_from_snrs(snrs, args.rho)
    _print_result(evaluate(scheme, s, args.grid, args.refine_rounds))
    return 0


def cmd_sweep(args) -> int:
    schemes = tuple(SchemeId.from_token(t.strip()) for t in args.schemes.split(","))
    spec = SweepSpec(
        axis=args.axis,
        start=args.start,
        stop=args.stop,
        steps=args.steps,
        sd_db=args.sd_db,
        sr_db=args.sr_db,
        rd_db=args.rd_db,
        rho=args.rho,
        schemes=schemes,
    )
    curves = tuple(Curve(sc.value, sc) for sc in schemes)
    header, rows = run_sweep(spec, curves, args.grid, args.refine_rounds)
    fixed = [k for k in ("sd_db", "sr_db", "rd_db", "rho") if k != spec.axis]
    comments = [
        f"sweep over {spec.axis}",
        "fixed: " + " ".join(f"{k}={_fmt(getattr(spec, k))}" for k in fixed),
    ]
    _write_csv(args.out, comments, header, rows)
    if args.gnuplot:
        _write_gnuplot(args.out, header, spec.axis)
    return 0


def cmd_figure(args) -> int:
    figures = _figures()
    if args.figure not in figures:
        raise ValueError(f"unknown figure id {args.figure!r}; have {sorted(figures)}")
    fig = figures[args.figure]
    header, rows = run_sweep(fig.spec, fig.curves, args.grid, args.refine_rounds)
    fixed = [k for k in ("sd_db", "sr_db", "rd_db", "rho") if k != fig.spec.axis]
    comments = [
        f"{args.figure}: {fig.title}",
        "fixed: " + " ".join(f"{k}={_fmt(getattr(fig.spec, k))}" for k in fixed),
        *fig.notes,
    ]
    _write_csv(args.out, comments, header, rows)
    if args.gnuplot:
        _write_gnuplot(args.out, header, fig.xlabel)
    return 0


def _nats_to_bits(x: float) -> float:
    return x / math.log(2.0)


def cmd_dm(args) -> int:
    problem = dm.load_problem(args.problem)
    result = dm.min_distortion_search(problem, args.z_grid, args.x_grid)
    print(f"problem: {args.problem}")
    print(f"test channels searched: {result.n_test_channels}")
    print(f"input laws searched (cost-feasible): {result.n_input_pmfs}")
    print(f"best_distortion: {result.best_distortion:.9g}")
    print("witness test channel p(z|s1):")
    for row in result.test_channel.rows:
        print("  " + " ".join(_fmt(v) for v in row))
    print("witness input law p(x1,x2):")
    for row in result.inputs.probs:
        print("  " + " ".join(_fmt(v) for v in row))
    target = result.best_distortion if args.target_d is None else args.target_d
    report = dm.check_achievability(problem, result.test_channel, result.inputs, target)
    print(f"conditions at target distortion {target:.9g}:")
    for c in report.conditions:
        status = "ok" if c.satisfied else "VIOLATED"
        if c.lhs is None:
            print(f"  {c.name}: {status} ({c.note})")
        elif c.name.endswith("rate"):
            print(
                f"  {c.name}: {status}  lhs={_nats_to_bits(c.lhs):.9g} bits"
                f" rhs={_nats_to_bits(c.rhs):.9g} bits"
            )
        else:
            print(f"  {c.name}: {status}  lhs={c.lhs:.9g} rhs={c.rhs:.9g}")
    print(f"feasible: {'yes' if report.feasible else 'no'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaydist",
        description="distortion bounds for relaying a Gaussian source "
        "when the relay has correlated side information",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_flags(p):
        p.add_argument("--sd-db", type=float, default=0.0, help="S-D SNR in dB")
        p.add_argument("--sr-db", type=float, default=0.0, help="S-R SNR in dB")
        p.add_argument("--rd-db", type=float, default=0.0, help="R-D SNR in dB")
        p.add_argument("--rho", type=float, default=0.0, help="source/relay sample correlation")

    def add_search_flags(p):
        p.add_argument("--grid", type=int, default=None, help="coarse grid points per axis")
        p.add_argument("--refine-rounds", type=int, default=None, help="refinement rounds")

    p_eval = sub.add_parser("eval", help="evaluate one scheme on one scenario")
    add_scenario_flags(p_eval)
    add_search_flags(p_eval)
    p_eval.add_argument("--scheme", required=True, help="scheme token, e.g. jdf")
    p_eval.set_defaults(fn=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="sweep one axis, write a CSV")
    add_scenario_flags(p_sweep)
    add_search_flags(p_sweep)
    p_sweep.add_argument("--axis", default="sr_db", choices=SWEEP_AXES)
    p_sweep.add_argument("--start", type=float, default=-5.0)
    p_sweep.add_argument("--stop", type=float, default=20.0)
    p_sweep.add_argument("--steps", type=int, default=51)
    p_sweep.add_argument("--schemes", default="jdf", help="comma-separated scheme tokens")
    p_sweep.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p_sweep.add_argument("--gnuplot", action="store_true", help="also write a .gp script")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_fig = sub.add_parser("figure", help="reproduce a canned comparison figure")
    p_fig.add_argument("figure", help="figure id: fig2, fig3, fig4 or fig5")
    add_search_flags(p_fig)
    p_fig.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p_fig.add_argument("--gnuplot", action="store_true", help="also write a .gp script")
    p_fig.set_defaults(fn=cmd_figure)

    p_dm = sub.add_parser("dm", help="finite-alphabet exhaustive search")
    p_dm.add_argument("--problem", required=True, help="problem file path")
    p_dm.add_argument("--z-grid", type=int, default=8, help="test-channel row denominator")
    p_dm.add_argument("--x-grid", type=int, default=6, help="input-law denominator")
    p_dm.add_argument("--target-d", type=float, default=None, help="check this distortion")
    p_dm.set_defaults(fn=cmd_dm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "gnuplot", False) and args.out is None:
        parser.error("--gnuplot requires --out")
    try:
        return args.fn(args)
    except dm.SearchBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
