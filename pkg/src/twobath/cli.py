"""``twobath`` command line: evolve, steady, sweep, critical, validate.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 validation breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import build_model, read_config
from .errors import InvalidParameter, NonPhysical, NumericalError, RegimeWarning, TwoBathError
from .gaussian import (
    check_covariance,
    log_negativity,
    partial_transpose,
    symplectic_spectrum,
    von_neumann_entropy,
)
from .model import InitialState, SystemParams
from .oracle import lyapunov_steady, moment_ode
from .propagator import AnalyticPropagator
from .steady import (
    ClosedFormWarning,
    adjudicate,
    closed_form_log_negativity,
    closed_form_symplectic,
    critical_temperature_curve,
    critical_temperature_equilibrium,
    steady_state_covariance,
)
from .sweep import OBSERVABLES, SOURCES, Axis, SweepSpec, format_float, run_sweep, write_sweep
from .validation import DEFAULT_T_GRID, run_validation

log = logging.getLogger("twobath")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_BREACH = 0, 2, 3, 4

GAMMA_ENTRIES = [(i, j) for i in range(4) for j in range(i, 4)]
GAMMA_COLUMNS = [f"g{i}{j}" for i, j in GAMMA_ENTRIES]
EVOLVE_COLUMNS = ["t", "log_negativity", "entropy", "nu_min_pt", *GAMMA_COLUMNS, "status"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidParameter(message)


def _model_options(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key = value parameter file")
    p.add_argument("--regime", choices=["high-t", "weak"])
    for name in ("m", "omega0", "kappa", "gamma1", "gamma2", "T1", "T2", "s", "d"):
        p.add_argument(f"--{name}", type=float, dest=name, metavar="X")


def _output_option(p: argparse.ArgumentParser):
    p.add_argument("--out", type=Path, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twobath", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", help="time series of entanglement, entropy and covariance")
    _model_options(p)
    _output_option(p)
    p.add_argument("--t-max", type=float, default=150.0)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--svg", type=Path, help="also render L_N(t) to an SVG file")

    p = sub.add_parser("steady", help="steady-state covariance and entanglement report")
    _model_options(p)
    _output_option(p)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")

    p = sub.add_parser("sweep", help="two-parameter phase diagram")
    _model_options(p)
    _output_option(p)
    p.add_argument("--axis1", required=True, metavar="NAME:MIN:MAX:COUNT")
    p.add_argument("--axis2", required=True, metavar="NAME:MIN:MAX:COUNT")
    p.add_argument("--observable", default="log_negativity", choices=OBSERVABLES)
    p.add_argument("--source", default="steady", choices=SOURCES)
    p.add_argument("--time", type=float, help="evaluation time for --source time")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--svg", type=Path, help="also render a heatmap to an SVG file")

    p = sub.add_parser("critical", help="critical temperatures")
    p.add_argument("--omega0", "--omega", type=float, default=1.0, dest="omega0")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--T1", type=float, help="solve for the critical T2 at this T1")
    p.add_argument("--curve", type=int, metavar="N", help="tabulate N points of the critical curve")
    _output_option(p)

    p = sub.add_parser("validate", help="cross-check analytic results against the oracle")
    _model_options(p)
    _output_option(p)
    p.add_argument(
        "--t-grid",
        default=",".join(f"{t:g}" for t in DEFAULT_T_GRID),
        help="comma separated comparison times",
    )
    return parser


def load_model(args) -> tuple[SystemParams, InitialState]:
    values = read_config(args.config) if args.config else {}
    for key in ("m", "omega0", "kappa", "gamma1", "gamma2", "T1", "T2", "s", "d", "regime"):
        if getattr(args, key, None) is not None:
            values[key] = getattr(args, key)
    return build_model(values)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        log.info("wrote %s", out)


def evolve_rows(params: SystemParams, init: InitialState, t_max: float, samples: int):
    """Yield one dict per time sample; failed samples carry the error name."""
    if samples < 1:
        raise InvalidParameter(f"samples must be >= 1, got {samples}")
    if t_max < 0 or not math.isfinite(t_max):
        raise InvalidParameter(f"t-max must be finite and >= 0, got {t_max}")
    times = np.linspace(0.0, t_max, samples) if samples > 1 else np.array([t_max])
    prop = AnalyticPropagator(params, init)
    for t in times:
        row = {"t": float(t)}
        try:
            g = check_covariance(prop.covariance(t))
            pt = symplectic_spectrum(partial_transpose(g))
            row.update(log_negativity=log_negativity(g), nu_min_pt=pt.min)
            row.update({c: float(g[i, j]) for c, (i, j) in zip(GAMMA_COLUMNS, GAMMA_ENTRIES)})
            # an uncertainty violation (possible for the high-T equation) keeps
            # the covariance but has no entropy
            row["entropy"] = von_neumann_entropy(g)
            row["status"] = "ok"
        except TwoBathError as exc:
            row["status"] = type(exc).__name__
        yield row


def evolve_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EVOLVE_COLUMNS)
    for row in rows:
        writer.writerow(
            [row["status"] if c == "status" else format_float(row[c]) if c in row else "" for c in EVOLVE_COLUMNS]
        )
    return buf.getvalue()


def cmd_evolve(args) -> int:
    params, init = load_model(args)
    rows = list(evolve_rows(params, init, args.t_max, args.samples))
    _emit(evolve_csv(rows), args.out)
    failed = sum(r["status"] != "ok" for r in rows)
    if failed:
        log.warning("%d of %d samples failed", failed, len(rows))
    if args.svg:
        from .plotting import line_svg

        ok = [r for r in rows if r["status"] == "ok"]
        line_svg([r["t"] for r in ok], [r["log_negativity"] for r in ok], "t", "L_N", args.svg)
    return EXIT_OK if failed < len(rows) else EXIT_NUMERICAL


def _matrix_lines(g) -> list[str]:
    return ["  " + " ".join(f"{v: .10e}" for v in row) for row in np.asarray(g)]


def steady_report(params: SystemParams) -> dict:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ClosedFormWarning)
        gamma = steady_state_covariance(params, validate="repair")
    oracle = lyapunov_steady(moment_ode(params))
    report = adjudicate(params)
    diagnostics = [str(w.message) for w in caught]
    try:
        entropy = von_neumann_entropy(gamma)
    except NonPhysical as exc:
        entropy = None
        diagnostics.append(f"NonPhysical: {exc}")
    try:
        closed_nu = closed_form_symplectic(params)
        closed_ln = closed_form_log_negativity(params)
    except TwoBathError as exc:
        closed_nu, closed_ln = None, f"{type(exc).__name__}: {exc}"
    return {
        "params": params.as_dict(),
        "covariance": gamma.tolist(),
        "symplectic": list(symplectic_spectrum(gamma).nu),
        "symplectic_pt": list(symplectic_spectrum(partial_transpose(gamma)).nu),
        "log_negativity": log_negativity(gamma),
        "log_negativity_oracle": log_negativity(oracle),
        "entropy": entropy,
        "closed_form_symplectic_pt": None if closed_nu is None else list(closed_nu),
        "closed_form_log_negativity": closed_ln,
        "closed_form_mismatch": report.as_dict() if report.mismatched else None,
        "diagnostics": diagnostics,
    }


def cmd_steady(args) -> int:
    params, _ = load_model(args)
    r = steady_report(params)
    if args.json:
        _emit(json.dumps(r, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = ["steady-state covariance (x1, p1, x2, p2):", *_matrix_lines(r["covariance"])]
    lines.append("symplectic eigenvalues: " + ", ".join(f"{v:.12g}" for v in r["symplectic"]))
    lines.append(
        "partial-transpose symplectic eigenvalues: "
        + ", ".join(f"{v:.12g}" for v in r["symplectic_pt"])
    )
    if r["closed_form_symplectic_pt"] is not None:
        lines.append(
            "closed-form (leading order in gamma): "
            + ", ".join(f"{v:.12g}" for v in r["closed_form_symplectic_pt"])
        )
    ln_closed = r["closed_form_log_negativity"]
    ln_closed = f"{ln_closed:.12g}" if isinstance(ln_closed, float) else ln_closed
    lines.append("log negativity:")
    lines.append(f"  steady covariance  {r['log_negativity']:.12g}")
    lines.append(f"  lyapunov oracle    {r['log_negativity_oracle']:.12g}")
    lines.append(f"  closed form        {ln_closed}")
    if r["entropy"] is not None:
        lines.append(f"von Neumann entropy: {r['entropy']:.12g}")
    lines += [d for d in r["diagnostics"] if d.startswith("NonPhysical")]
    if r["closed_form_mismatch"]:
        lines.append("ClosedFormMismatch: printed steady moments vs Lyapunov oracle")
        for name, row in r["closed_form_mismatch"].items():
            flag = "" if row["matches"] else "  MISMATCH"
            lines.append(
                f"  {name:5s} printed {row['printed']: .12g}  oracle {row['oracle']: .12g}{flag}"
            )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    params, init = load_model(args)
    spec = SweepSpec(
        axis1=Axis.parse(args.axis1),
        axis2=Axis.parse(args.axis2),
        params=params,
        init=init,
        observable=args.observable,
        source=args.source,
        time=args.time,
    )
    result = run_sweep(spec, jobs=args.jobs)
    if args.out:
        write_sweep(result, args.out)
    else:
        sys.stdout.write(result.to_csv())
    if args.svg:
        from .plotting import heatmap_svg

        heatmap_svg(result, args.svg)
    if result.n_ok == 0:
        log.error("every cell failed: %s", ", ".join(result.metadata["failures"]))
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_critical(args) -> int:
    w, alpha = args.omega0, args.alpha
    if args.curve:
        if args.curve < 2:
            raise InvalidParameter("--curve needs at least 2 points")
        tc = critical_temperature_equilibrium(w, alpha)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["T1", "T2_critical"])
        # T1 from 0 up to where the curve leaves the feasible region
        t_hi = critical_temperature_curve_limit(w, alpha)
        for t1 in np.linspace(0.0, t_hi, args.curve):
            t2 = critical_temperature_curve(w, alpha, float(t1))
            writer.writerow([format_float(t1), "" if t2 is None else format_float(t2)])
        _emit(buf.getvalue(), args.out)
        log.info("equilibrium critical temperature %.12g", tc)
        return EXIT_OK
    if args.T1 is not None:
        t2 = critical_temperature_curve(w, alpha, args.T1)
        _emit(("none" if t2 is None else format_float(t2)) + "\n", args.out)
        return EXIT_OK
    _emit(format_float(critical_temperature_equilibrium(w, alpha)) + "\n", args.out)
    return EXIT_OK


def critical_temperature_curve_limit(omega: float, alpha: float) -> float:
    """Largest ``T1`` with a critical ``T2``: ``coth(omega/2T1) = 2 sqrt(1+|alpha|) - 1``."""
    target = 2.0 * math.sqrt(1.0 + abs(alpha)) - 1.0
    if target <= 1.0:
        return 0.0
    return omega / (2.0 * math.atanh(1.0 / target))


def cmd_validate(args) -> int:
    params, init = load_model(args)
    try:
        grid = tuple(float(t) for t in args.t_grid.split(",") if t.strip())
    except ValueError:
        raise InvalidParameter(f"bad --t-grid {args.t_grid!r}") from None
    if not grid or min(grid) < 0:
        raise InvalidParameter("--t-grid needs non-negative times")
    report = run_validation(params, init, grid)
    _emit("\n".join(report.lines()) + "\n", args.out)
    return EXIT_BREACH if report.breached else EXIT_OK


COMMANDS = {
    "evolve": cmd_evolve,
    "steady": cmd_steady,
    "sweep": cmd_sweep,
    "critical": cmd_critical,
    "validate": cmd_validate,
}


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"twobath: warning: {category.__name__}: {message}", file=sys.stderr)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except InvalidParameter as exc:
        print(f"twobath: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="twobath: %(levelname)s: %(message)s",
    )
    warnings.showwarning = _show_warning
    warnings.simplefilter("default", RegimeWarning)
    try:
        return COMMANDS[args.command](args)
    except InvalidParameter as exc:
        print(f"twobath: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"twobath: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
