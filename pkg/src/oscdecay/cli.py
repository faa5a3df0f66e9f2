"""Command-line entry point: reproducible analyses with file-based reports.

Subcommands: analyze, nondegeneracy, ladder, verify-decay, bounds, box-check.
Every output embeds the tool version, a hash of the effective configuration,
and the seed, so identical reruns produce byte-identical files.

Exit codes: 0 success/pass, 1 input or config error, 2 degenerate phase,
3 inconclusive nondegeneracy, 4 sweep failure, 5 decay fit outside tolerance.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bounds import (
    DegeneratePhaseError,
    box_bound_check,
    constants_report,
    dyadic_bound_sum,
    gradient_ratio_table,
    theoretical_bound,
)
from .ladder import exponent_ladder
from .nondegeneracy import (
    DEGENERATE,
    INCONCLUSIVE,
    NONDEGENERATE,
    check_nondegenerate,
)
from .phase import (
    CutoffSpec,
    PhaseFormatError,
    parse_cutoff,
    parse_phase,
    phase_to_dict,
)
from .polytope import build_polyhedron, polyhedron_report
from .quadrature import SweepFailureError, decay_fit, lambda_sweep

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEGENERATE = 2
EXIT_INCONCLUSIVE = 3
EXIT_SWEEP_FAILURE = 4
EXIT_TOLERANCE = 5

DEFAULT_CONFIG = {
    "cutoff": {"radius": 0.5, "kind": "bump"},
    "lambda": {"min": 100.0, "max": 100000.0, "points": 19},
    "quality": 2,
    "nondegeneracy": {"grid": 64, "refine": 3, "tol": 1e-9},
    "ladder": {"p_max": None, "n_max": None, "filter": True, "beta_bound": None},
    "decay_tol_p": 0.05,
    "bounds": {
        "j_max": 12,
        "grid": 64,
        "lambda_min": 100.0,
        "lambda_max": 1000000.0,
        "lambda_points": 9,
    },
    "box_check": {"lambdas": [100.0, 1000.0, 10000.0], "levels": [2, 3, 4, 5, 6, 7, 8]},
    "seed": 0,
}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _meta(config: dict) -> dict:
    return {
        "version": __version__,
        "config_hash": _config_hash(config),
        "seed": config.get("seed", 0),
    }


def _write_json(path: Path, payload: dict, meta: dict) -> None:
    body = {"meta": meta}
    body.update(payload)
    path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list], meta: dict) -> None:
    lines = [
        f"# oscdecay={meta['version']} config_hash={meta['config_hash']} seed={meta['seed']}",
        ",".join(header),
    ]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _load_effective_config(args: argparse.Namespace) -> dict:
    config = copy.deepcopy(DEFAULT_CONFIG)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise PhaseFormatError(f"config: {exc}") from exc
        if not isinstance(loaded, dict):
            raise PhaseFormatError("config: must be a JSON object")
        config = _merge(config, loaded)
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    for attr, path in [
        ("radius", ("cutoff", "radius")),
        ("lambda_min", ("lambda", "min")),
        ("lambda_max", ("lambda", "max")),
        ("points", ("lambda", "points")),
        ("quality", ("quality",)),
        ("grid", ("nondegeneracy", "grid")),
        ("refine", ("nondegeneracy", "refine")),
        ("tol", ("nondegeneracy", "tol")),
        ("p_max", ("ladder", "p_max")),
        ("n_max", ("ladder", "n_max")),
        ("beta_bound", ("ladder", "beta_bound")),
    ]:
        value = getattr(args, attr, None)
        if value is not None:
            node = config
            for key in path[:-1]:
                node = node.setdefault(key, {})
            node[path[-1]] = value
    if getattr(args, "no_filter", False):
        config["ladder"]["filter"] = False
    config["phase_file"] = args.phase
    return config


def _load_phase(config: dict):
    path = Path(config["phase_file"])
    try:
        text = path.read_text()
    except OSError as exc:
        raise PhaseFormatError(f"phase file: {exc}") from exc
    return parse_phase(text)


def _cutoff(config: dict) -> CutoffSpec:
    return parse_cutoff(config["cutoff"])


def _ladder_params(config: dict, poly) -> tuple[Fraction, int | None, bool, int | None]:
    lcfg = config["ladder"]
    p_max = lcfg.get("p_max")
    if p_max is None:
        p_max = Fraction(1) / poly.newton_distance + 1
    else:
        p_max = Fraction(str(p_max))
    beta_bound = lcfg.get("beta_bound")
    if beta_bound is None and not poly.convenient:
        beta_bound = 8  # keeps analyze total on non-convenient phases
    return p_max, lcfg.get("n_max"), bool(lcfg.get("filter", True)), beta_bound


def _nondeg_verdict(phase, poly, config: dict):
    ncfg = config["nondegeneracy"]
    return check_nondegenerate(
        phase,
        poly,
        grid_per_axis=int(ncfg["grid"]),
        refine_depth=int(ncfg["refine"]),
        degeneracy_tol=float(ncfg["tol"]),
    )


def _verdict_exit(status: str) -> int:
    if status == NONDEGENERATE:
        return EXIT_OK
    if status == DEGENERATE:
        return EXIT_DEGENERATE
    return EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _load_effective_config(args)
    phase = _load_phase(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(config)
    poly = build_polyhedron(phase)
    _write_json(out / "polyhedron.json", {"phase": phase_to_dict(phase), **polyhedron_report(poly)}, meta)

    p_max, n_max, use_filter, beta_bound = _ladder_params(config, poly)
    ladder = exponent_ladder(
        poly, p_max, n_max=n_max, decomposition_filter=use_filter, beta_bound=beta_bound
    )
    _write_json(
        out / "ladder.json",
        {
            "p_max": str(ladder.p_max),
            "n_max": ladder.n_max,
            "beta_bound": list(ladder.beta_bound),
            "filter": ladder.decomposition_filter,
            "terms": ladder.to_report(),
        },
        meta,
    )

    verdict = _nondeg_verdict(phase, poly, config)
    _write_json(out / "nondegeneracy.json", verdict.to_dict(), meta)
    return _verdict_exit(verdict.status)


def cmd_nondegeneracy(args: argparse.Namespace) -> int:
    config = _load_effective_config(args)
    phase = _load_phase(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    poly = build_polyhedron(phase)
    verdict = _nondeg_verdict(phase, poly, config)
    _write_json(out / "nondegeneracy.json", verdict.to_dict(), _meta(config))
    print(verdict.status)
    return _verdict_exit(verdict.status)


def cmd_ladder(args: argparse.Namespace) -> int:
    config = _load_effective_config(args)
    phase = _load_phase(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    poly = build_polyhedron(phase)
    p_max, n_max, use_filter, beta_bound = _ladder_params(config, poly)
    ladder = exponent_ladder(
        poly, p_max, n_max=n_max, decomposition_filter=use_filter, beta_bound=beta_bound
    )
    _write_json(
        out / "ladder.json",
        {
            "p_max": str(ladder.p_max),
            "n_max": ladder.n_max,
            "beta_bound": list(ladder.beta_bound),
            "filter": ladder.decomposition_filter,
            "terms": ladder.to_report(),
        },
        _meta(config),
    )
    return EXIT_OK


def cmd_verify_decay(args: argparse.Namespace) -> int:
    config = _load_effective_config(args)
    phase = _load_phase(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(config)
    poly = build_polyhedron(phase)

    if not args.force:
        verdict = _nondeg_verdict(phase, poly, config)
        if verdict.status != NONDEGENERATE:
            _write_json(out / "nondegeneracy.json", verdict.to_dict(), meta)
            print(f"phase is {verdict.status}; pass --force to sweep anyway", file=sys.stderr)
            return _verdict_exit(verdict.status)

    cutoff = _cutoff(config)
    constants_path = out / "constants.json"
    if constants_path.exists():
        try:
            s_value = json.loads(constants_path.read_text()).get("s")
        except (json.JSONDecodeError, OSError):
            s_value = None
        if s_value is not None and cutoff.radius > s_value:
            # s is a sufficient smallness radius, not a necessary one.
            print(
                f"warning: cutoff radius {cutoff.radius:g} exceeds the explicit "
                f"smallness radius s={s_value:g}; proceeding",
                file=sys.stderr,
            )
    lam_cfg = config["lambda"]
    try:
        sweep = lambda_sweep(
            phase,
            cutoff,
            (0,) * phase.dimension,
            float(lam_cfg["min"]),
            float(lam_cfg["max"]),
            int(lam_cfg["points"]),
            quality=int(config["quality"]),
        )
    except SweepFailureError as exc:
        print(f"sweep failure: {exc}", file=sys.stderr)
        return EXIT_SWEEP_FAILURE

    rows = [
        [r.lam, r.value.real, r.value.imag, abs(r.value), r.est_error, int(r.flagged)]
        for r in sweep.rows
    ]
    _write_csv(out / "sweep.csv", ["lambda", "re", "im", "abs", "est_error", "flagged"], rows, meta)

    fit = decay_fit(sweep, phase.dimension)
    p0, log_power = theoretical_bound(poly, (0,) * phase.dimension)
    tol_p = float(config["decay_tol_p"])
    p_ok = abs(fit.p_hat - float(p0)) <= tol_p
    q_ok = fit.q_hat == log_power
    report = {
        "theoretical": {"p": str(p0), "log_power": log_power},
        "fitted": fit.to_dict(),
        "tolerance_p": tol_p,
        "pass": bool(p_ok and q_ok),
    }
    _write_json(out / "fit_report.json", report, meta)
    print(
        f"theoretical p={p0} log_power={log_power}; fitted p={fit.p_hat:.4f} "
        f"q={fit.q_hat} -> {'pass' if report['pass'] else 'FAIL'}"
    )
    return EXIT_OK if report["pass"] else EXIT_TOLERANCE


def cmd_bounds(args: argparse.Namespace) -> int:
    config = _load_effective_config(args)
    phase = _load_phase(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(config)
    poly = build_polyhedron(phase)

    verdict = _nondeg_verdict(phase, poly, config)
    if verdict.status == DEGENERATE:
        _write_json(out / "nondegeneracy.json", verdict.to_dict(), meta)
        print("phase is Degenerate; bounds lab refuses", file=sys.stderr)
        return EXIT_DEGENERATE

    bcfg = config["bounds"]
    try:
        report = constants_report(phase, poly, grid=int(bcfg["grid"]))
    except DegeneratePhaseError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    _write_json(out / "constants.json", report.to_dict(), meta)

    table = gradient_ratio_table(phase, poly, j_max=int(bcfg["j_max"]), grid=int(bcfg["grid"]))
    rows = [
        [str(r.level), r.epsilon[0], r.box_min, r.envelope, r.ratio] for r in table.rows
    ]
    _write_csv(out / "lemma1.csv", ["j", "epsilon", "box_min", "envelope", "ratio"], rows, meta)

    beta = (0,) * phase.dimension
    fl, log_power = theoretical_bound(poly, beta)
    lam_lo, lam_hi = float(bcfg["lambda_min"]), float(bcfg["lambda_max"])
    npts = int(bcfg["lambda_points"])
    lam_values = [lam_lo * (lam_hi / lam_lo) ** (i / (npts - 1)) for i in range(npts)]
    sum_rows = []
    for lam in lam_values:
        s = dyadic_bound_sum(poly, beta, lam)
        normalized = s * lam ** float(fl) / (math.log2(lam) ** log_power if log_power else 1.0)
        sum_rows.append([lam, s, normalized])
    _write_csv(out / "boundsum.csv", ["lambda", "sum", "normalized"], sum_rows, meta)
    return EXIT_OK


def cmd_box_check(args: argparse.Namespace) -> int:
    config = _load_effective_config(args)
    phase = _load_phase(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(config)
    poly = build_polyhedron(phase)
    bcfg = config["box_check"]
    beta = tuple(args.beta) if args.beta else (0,) * phase.dimension
    if len(beta) != phase.dimension:
        raise PhaseFormatError("beta: wrong length")
    rows = box_bound_check(
        phase,
        poly,
        beta,
        [float(l) for l in bcfg["lambdas"]],
        [int(j) for j in bcfg["levels"]],
        quality=int(config["quality"]),
    )
    csv_rows = [
        [r.lam, r.level, r.value, r.bound, r.ratio, int(r.reliable)] for r in rows
    ]
    _write_csv(
        out / "boxcheck.csv", ["lambda", "j", "value", "bound", "ratio", "reliable"], csv_rows, meta
    )
    reliable = [r.ratio for r in rows if r.reliable]
    if reliable:
        print(f"max J/B over {len(reliable)} reliable cells: {max(reliable):.6g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser.


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--phase", required=True, help="phase JSON file")
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--config", default=None, help="analysis config JSON")
    sub.add_argument("--seed", type=int, default=None, help="seed recorded in outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscdecay",
        description="Newton-polyhedron invariants and decay verification for polynomial phases",
    )
    parser.add_argument("--version", action="version", version=f"oscdecay {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="polyhedron + ladder + nondegeneracy reports")
    _add_common(p)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--refine", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--p-max", dest="p_max", default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--beta-bound", dest="beta_bound", type=int, default=None)
    p.add_argument("--no-filter", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("nondegeneracy", help="nondegeneracy verdict only")
    _add_common(p)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--refine", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_nondegeneracy)

    p = subs.add_parser("ladder", help="exponent ladder report")
    _add_common(p)
    p.add_argument("--p-max", dest="p_max", default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--beta-bound", dest="beta_bound", type=int, default=None)
    p.add_argument("--no-filter", action="store_true")
    p.set_defaults(func=cmd_ladder)

    p = subs.add_parser("verify-decay", help="lambda sweep + decay fit vs prediction")
    _add_common(p)
    p.add_argument("--lambda-min", dest="lambda_min", type=float, default=None)
    p.add_argument("--lambda-max", dest="lambda_max", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--quality", type=int, default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--force", action="store_true", help="sweep even if not Nondegenerate")
    p.set_defaults(func=cmd_verify_decay)

    p = subs.add_parser("bounds", help="constants report + ratio and sum tables")
    _add_common(p)
    p.add_argument("--grid", type=int, default=None)
    p.set_defaults(func=cmd_bounds)

    p = subs.add_parser("box-check", help="per-box oscillatory bound table")
    _add_common(p)
    p.add_argument("--quality", type=int, default=None)
    p.add_argument("--beta", type=int, nargs="*", default=None)
    p.set_defaults(func=cmd_box_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PhaseFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
