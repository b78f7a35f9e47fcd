"""Command-line interface.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .correlations import DEFAULT_TOL, XYPoint, classify, correlation, xy_quantities
from .hv_models import CommonCauseModel, model_correlation, model_xy, verify_locality_condition
from .optimizer import Objective, OptimizerConfig, maximize, werner_report
from .qubit_algebra import SettingPair, ValidationError, make_product, make_singlet, make_werner
from .sampler import empirical_xy
from .specs import parse_model, parse_settings, parse_state, read_json, settings_spec

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2
SIGMA_LEVEL = 5.0


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _emit(payload, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        json.dump(payload, out, indent=2)
        out.write("\n")
    else:
        _print_table(payload, out)


def _print_table(payload, out, prefix: str = "") -> None:
    if isinstance(payload, dict):
        for k, v in payload.items():
            if isinstance(v, (dict, list)) and v and not _is_flat_list(v):
                out.write(f"{prefix}{k}:\n")
                _print_table(v, out, prefix + "  ")
            else:
                out.write(f"{prefix}{k:<24} {_human(v)}\n")
    elif isinstance(payload, list):
        for i, v in enumerate(payload):
            out.write(f"{prefix}[{i}]\n")
            _print_table(v, out, prefix + "  ")
    else:
        out.write(f"{prefix}{_human(payload)}\n")


def _is_flat_list(v) -> bool:
    return isinstance(v, list) and all(isinstance(e, (int, float)) for e in v)


def _human(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if _is_flat_list(v):
        return "[" + ", ".join(_human(e) for e in v) + "]"
    return str(v)


# --- eval ------------------------------------------------------------------

def cmd_eval(args) -> int:
    rho = parse_state(read_json(args.state))
    pa, pb = parse_settings(read_json(args.settings))
    report = classify(xy_quantities(rho, pa, pb), args.tol)
    _emit(report.to_dict(), args.json)
    return EXIT_OK


# --- optimize --------------------------------------------------------------

def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, seed=args.seed)


def cmd_optimize(args) -> int:
    rho = parse_state(read_json(args.state))
    res = maximize(rho, Objective(args.objective), _config(args))
    payload = res.to_dict()
    payload["classification"] = classify(xy_quantities(rho, *res.settings), args.tol).to_dict()
    _emit(payload, args.json)
    return EXIT_OK


# --- scan-werner -----------------------------------------------------------

SCAN_COLUMNS = ("x", "max_value", "violates_qm", "violates_rt", "violates_lt", "violates_lqt", "ppt")


def scan_werner_rows(steps: int, objective: Objective, config: OptimizerConfig, tol: float) -> list[dict]:
    rows = []
    for x in np.linspace(0.0, 1.0, steps):
        rep = werner_report(float(x), config, tol)
        value = {
            Objective.SUM_OF_SQUARES: rep["max_sum_of_squares"],
            Objective.MAX_ABS_PM: rep["max_abs_pm"],
            Objective.ABS_X: rep["max_abs_x"],
        }[objective]
        rows.append({
            "x": float(x),
            "max_value": value,
            "violates_qm": rep["violates"]["qm"],
            "violates_rt": rep["violates"]["rt"],
            "violates_lt": rep["violates"]["lt"],
            "violates_lqt": rep["violates"]["lqt"],
            "ppt": rep["ppt"],
        })
    return rows


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) if isinstance(r[c], float) else str(r[c]).lower() for c in columns])
    return buf.getvalue()


def cmd_scan_werner(args) -> int:
    if args.steps < 2:
        raise ValidationError("--steps must be at least 2")
    rows = scan_werner_rows(args.steps, Objective(args.objective), _config(args), args.tol)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(_csv_text(SCAN_COLUMNS, rows))
    if args.json:
        _emit(rows, True)
    elif not args.out:
        sys.stdout.write(_csv_text(SCAN_COLUMNS, rows))
    return EXIT_OK


# --- regions ---------------------------------------------------------------

def region_boundaries(resolution: int) -> dict:
    """Closed polylines (first point repeated last) for the four bounds."""
    t = np.linspace(0.0, 2 * math.pi, resolution + 1)
    circle = np.column_stack([np.cos(t), np.sin(t)])
    circle[-1] = circle[0]
    square = [[2.0, 2.0], [-2.0, 2.0], [-2.0, -2.0], [2.0, -2.0], [2.0, 2.0]]
    diamond = [[2.0, 0.0], [0.0, 2.0], [-2.0, 0.0], [0.0, -2.0], [2.0, 0.0]]
    return {
        "rt_square": square,
        "qm_circle": (2.0 * circle).tolist(),
        "lt_diamond": diamond,
        "lqt_circle": circle.tolist(),
    }


def coplanar_settings(theta: float) -> tuple[SettingPair, SettingPair]:
    """A along x/y, B rotated by ``theta`` in the same plane with opposite handedness."""
    c, s = math.cos(theta), math.sin(theta)
    pa = SettingPair(np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    pb = SettingPair(np.array([c, s, 0.0]), np.array([s, -c, 0.0]))
    return pa, pb


def achievable_points(resolution: int) -> list[dict]:
    points = []

    def add(state_spec, rho, theta):
        pa, pb = coplanar_settings(theta)
        xy = xy_quantities(rho, pa, pb)
        points.append({
            "X": xy.x_val,
            "Y": xy.y_val,
            "region": classify(xy).region.value,
            "state": state_spec,
            "settings": settings_spec(pa, pb),
        })

    thetas = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
    singlet = make_singlet()
    for th in thetas:
        add({"kind": "singlet"}, singlet, float(th))
    for x in (0.3, 0.5, 1 / math.sqrt(2)):
        rho = make_werner(x)
        for th in thetas:
            add({"kind": "werner", "x": x}, rho, float(th))
    # product states with Bloch vectors in the measurement plane reach the unit circle
    for th in thetas:
        ra = [math.cos(th), math.sin(th), 0.0]
        rb = [1.0, 0.0, 0.0]
        add({"kind": "product", "bloch_a": ra, "bloch_b": rb}, make_product(ra, rb), 0.0)
    return points


def cmd_regions(args) -> int:
    if args.resolution < 8:
        raise ValidationError("--resolution must be at least 8")
    payload = {"boundaries": region_boundaries(args.resolution),
               "points": achievable_points(args.resolution)}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
    if args.json or not args.out:
        _emit(payload, True)
    return EXIT_OK


# --- sample ----------------------------------------------------------------

def _verdict(q: float, bound: float, se: float) -> str:
    if q - bound > SIGMA_LEVEL * se:
        return "violated"
    if bound - q > SIGMA_LEVEL * se:
        return "not violated"
    return "inconclusive"


def sample_verdicts(xy: XYPoint, se_x: float, se_y: float) -> dict:
    """Error-aware verdict per bound at the 5 sigma level."""
    x, y = xy
    sos = xy.sum_of_squares
    sos_se = math.hypot(2 * x * se_x, 2 * y * se_y)
    pm_se = math.hypot(se_x, se_y)
    abs_se = se_x if abs(x) >= abs(y) else se_y
    checks = {
        "qm": (sos, 4.0, sos_se),
        "rt": (xy.max_abs, 2.0, abs_se),
        "lt": (xy.max_abs_pm, 2.0, pm_se),
        "lqt": (sos, 1.0, sos_se),
    }
    return {
        name: {"value": q, "bound": b, "standard_error": se, "sigma": (q - b) / se if se > 0 else None,
               "verdict": _verdict(q, b, se)}
        for name, (q, b, se) in checks.items()
    }


def summarize(verdicts: dict) -> str:
    violated = [k for k, v in verdicts.items() if v["verdict"] == "violated"]
    if violated:
        return "violated: " + ", ".join(violated)
    if all(v["verdict"] == "not violated" for v in verdicts.values()):
        return "no inequality violated"
    return "inconclusive"


def cmd_sample(args) -> int:
    if args.shots < 1:
        raise ValidationError("--shots must be at least 1")
    rho = parse_state(read_json(args.state))
    pa, pb = parse_settings(read_json(args.settings))
    est = empirical_xy(rho, pa, pb, args.shots, args.seed)
    verdicts = sample_verdicts(est.xy, est.se_x, est.se_y)
    payload = {
        "shots_per_setting": args.shots,
        "seed": args.seed,
        "X": est.xy.x_val,
        "Y": est.xy.y_val,
        "se_X": est.se_x,
        "se_Y": est.se_y,
        "sum_of_squares": est.xy.sum_of_squares,
        "se_sum_of_squares": est.sum_of_squares_se,
        "point_classification": classify(est.xy, args.tol).to_dict(),
        "verdicts": verdicts,
        "summary": summarize(verdicts),
        "samples": {k: r.to_dict() for k, r in est.samples.items()},
    }
    if args.counts_csv:
        rows = []
        for name, r in est.samples.items():
            c = r.counts
            rows.append({"settings": name, "pp": int(c[0, 0]), "pm": int(c[0, 1]),
                         "mp": int(c[1, 0]), "mm": int(c[1, 1]), "n": r.n})
        with open(args.counts_csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["settings", "pp", "pm", "mp", "mm", "n"])
            for r in rows:
                w.writerow([r[k] for k in ("settings", "pp", "pm", "mp", "mm", "n")])
    _emit(payload, args.json)
    return EXIT_OK


# --- lhv-check -------------------------------------------------------------

def cmd_lhv_check(args) -> int:
    model = parse_model(read_json(args.model))
    if not isinstance(model, CommonCauseModel):
        raise ValidationError("locality check needs a common-cause model (lt, lqt or lrt)")
    rho = parse_state(read_json(args.state))
    pa, pb = parse_settings(read_json(args.settings))
    combos = [(a, b) for a in (pa.main, pa.perp) for b in (pb.main, pb.perp)]
    try:
        verdict = verify_locality_condition(model, rho, combos, args.tol)
        corr_dev = max(abs(model_correlation(model, a, b) - correlation(rho, a, b)) for a, b in combos)
        mxy = model_xy(model, pa, pb)
    except KeyError as exc:
        raise ValidationError(f"model does not cover the settings: {exc.args[0]}") from None
    payload = {
        "model_kind": model.kind,
        "pass": bool(verdict.passed and corr_dev <= args.tol),
        "max_joint_probability_deviation": verdict.max_deviation,
        "max_correlation_deviation": corr_dev,
        "tol": args.tol,
        "model_classification": classify(mxy, args.tol).to_dict(),
        "state_classification": classify(xy_quantities(rho, pa, pb), args.tol).to_dict(),
    }
    _emit(payload, args.json)
    return EXIT_OK


# --- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qlocality",
                                description="Two-qubit correlation hierarchy: evaluate, optimize, sample, verify.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=True):
        sp.add_argument("--json", action="store_true", help="machine-readable JSON output")
        if tol:
            sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    def optim(sp, restarts):
        sp.add_argument("--objective", choices=[o.value for o in Objective], default=Objective.SUM_OF_SQUARES.value)
        sp.add_argument("--restarts", type=int, default=restarts)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("eval", help="classify X, Y for a state and settings")
    sp.add_argument("state")
    sp.add_argument("settings")
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("optimize", help="maximize an objective over settings")
    sp.add_argument("state")
    optim(sp, 64)
    common(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("scan-werner", help="maximized values and violation flags along the Werner family")
    sp.add_argument("--steps", type=int, default=11)
    sp.add_argument("--out", help="CSV output path")
    optim(sp, 8)
    common(sp)
    sp.set_defaults(func=cmd_scan_werner)

    sp = sub.add_parser("regions", help="boundary polylines and achievable points in the X-Y plane")
    sp.add_argument("--resolution", type=int, default=64)
    sp.add_argument("--out", help="JSON output path")
    common(sp, tol=False)
    sp.set_defaults(func=cmd_regions)

    sp = sub.add_parser("sample", help="Monte Carlo estimate of X, Y")
    sp.add_argument("state")
    sp.add_argument("settings")
    sp.add_argument("--shots", type=int, default=100_000, help="shots per setting combination")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--counts-csv", help="write outcome counts as CSV")
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("lhv-check", help="check a common-cause model against a state")
    sp.add_argument("model")
    sp.add_argument("state")
    sp.add_argument("settings")
    common(sp)
    sp.set_defaults(func=cmd_lhv_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
