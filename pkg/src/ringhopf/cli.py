"""Command-line front end.

Subcommands: spectrum, classify, design, simulate, verify, sweep. Options
come from an optional JSON config document plus flags; flags win. Errors
are emitted as one JSON object on stderr with exit code 2 for bad input
and 3 for numerical failures. Fixed seeds give byte-identical outputs.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analyze, hopf_predict, simulate, spectral
from .errors import ConfigError, ConfigurationError, NumericalError
from .ring_model import field_from_config, linear_coefficients
from .spectral import (
    BifurcationKind,
    BlockCoefficients,
    CouplingCoefficients,
    classify_batch,
    classify_first_bifurcation,
    design_ordering,
)

FLOAT_FMT = ".17g"


def _fmt(x: float) -> str:
    return format(float(x), FLOAT_FMT)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"cannot parse float list {text!r}") from exc


def _parse_params(text: str) -> dict[str, float]:
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise ConfigError(f"expected name=value, got {item!r}")
        name, value = item.split("=", 1)
        try:
            out[name.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad value in {item!r}") from exc
    return out


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ------------------------------------------------------------------
# coefficient assembly
# ------------------------------------------------------------------

def _coefficients_from_args(args, cfg) -> CouplingCoefficients:
    n = args.n if args.n is not None else cfg.get("n")
    if n is None:
        raise ConfigError("missing --n")
    a = _parse_floats(args.a) if args.a else cfg.get("a")
    if a is None:
        raise ConfigError("missing --a coefficient list")
    a = np.asarray(a, dtype=float)
    if a.shape != (int(n),):
        raise ConfigError(f"--a needs {n} values, got {a.size}")
    if getattr(args, "shift", None):
        a = a.copy()
        a[0] += args.shift
    dihedral = bool(args.dihedral or cfg.get("dihedral", False))
    try:
        return CouplingCoefficients(int(n), a, dihedral)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _mode_records(c: CouplingCoefficients) -> list[dict]:
    return [
        {"k": m.k, "re": m.mu.real, "im": m.mu.imag,
         "multiplicity": m.algebraic_multiplicity}
        for m in spectral.circulant_spectrum(c)
    ]


def _block_records(b: BlockCoefficients) -> list[dict]:
    records = []
    for k, w in spectral.block_spectrum(b):
        scale = 1.0 + float(np.max(np.abs(w))) if w.size else 1.0
        for z in w:
            mult = int(np.sum(np.abs(w - z) <= 1e-9 * scale))
            records.append({"k": k, "re": z.real, "im": z.imag,
                            "multiplicity": mult})
    return records


def _records_csv(records: list[dict]) -> str:
    lines = ["k,re,im,mult"]
    for r in records:
        lines.append(f"{r['k']},{_fmt(r['re'])},{_fmt(r['im'])},{r['multiplicity']}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------
# subcommands
# ------------------------------------------------------------------

def _cmd_spectrum(args) -> int:
    cfg = _load_config(args.config)
    if args.P or args.Q:
        l = args.node_dim or int(cfg.get("node_dim", 1))
        n = args.n if args.n is not None else cfg.get("n")
        if n is None or not args.P or not args.Q:
            raise ConfigError("block spectra need --n, --node-dim, --P and --Q")
        p = np.asarray(_parse_floats(args.P), dtype=float)
        q = np.asarray(_parse_floats(args.Q), dtype=float)
        if p.size != l * l or q.size != l * l:
            raise ConfigError(f"--P/--Q need {l * l} row-major entries")
        records = _block_records(
            BlockCoefficients(int(n), l, p.reshape(l, l), q.reshape(l, l)))
    else:
        records = _mode_records(_coefficients_from_args(args, cfg))
    if args.format == "csv":
        _emit(_records_csv(records), args.out)
    else:
        _emit(_json_dumps(records), args.out)
    return 0


def _classification_dict(c: CouplingCoefficients) -> dict:
    fb = classify_first_bifurcation(c)
    return {
        "kind": fb.kind.value,
        "critical_modes": sorted(fb.critical_modes),
        "crossing_value": fb.crossing_value,
        "omega": fb.omega,
        "max_real_part": fb.max_real_part,
    }


def _cmd_classify(args) -> int:
    cfg = _load_config(args.config)
    c = _coefficients_from_args(args, cfg)
    _emit(_json_dumps(_classification_dict(c)), args.out)
    return 0


def _cmd_design(args) -> int:
    cfg = _load_config(args.config)
    n = args.n if args.n is not None else cfg.get("n")
    ordering = args.ordering or cfg.get("ordering")
    if n is None or ordering is None:
        raise ConfigError("design needs --n and --ordering")
    desired = [int(v) for v in str(ordering).split(",")]
    try:
        c = design_ordering(int(n), desired)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    half = c.n // 2
    rho = [spectral.rho_k(c, k) for k in range(half + 1)]
    ranks = np.empty(half + 1, dtype=int)
    ranks[np.argsort(-np.asarray(rho))] = np.arange(half + 1)
    gaps = np.diff(np.sort(rho))
    doc = {
        "n": c.n,
        "ordering": desired,
        "a": [float(v) for v in c.a],
        "verification": {
            "real_parts": rho,
            "realized_ranking": [int(r) for r in ranks],
            "min_gap": float(np.min(gaps)) if gaps.size else 0.0,
        },
    }
    _emit(_json_dumps(doc), args.out)
    return 0


def _simulation_inputs(args):
    cfg = _load_config(args.config)
    for key, flag in (("n", args.n), ("model", args.model),
                      ("node_dim", args.node_dim)):
        if flag is not None:
            cfg[key] = flag
    if args.ranges:
        cfg["ranges"] = [int(v) for v in args.ranges.split(",")]
    if args.dihedral:
        cfg["symmetry"] = "Dihedral"
    cfg.setdefault("params", {})
    if args.params:
        cfg["params"].update(_parse_params(args.params))
    vf = field_from_config(cfg)
    lam = vf.params.get(vf.bifurcation_param, 0.0)
    lam = cfg["params"].get(vf.bifurcation_param, lam)
    return cfg, vf, float(lam)


def _default_x0(vf, k, seed):
    n = vf.network.n
    v = np.exp(2j * np.pi * k * np.arange(n) / n)
    x0 = 1e-3 * v.real
    if seed is not None:
        rng = np.random.default_rng(seed)
        x0 = x0 + 1e-6 * rng.standard_normal(n)
    reps = vf.network.node_dim
    return np.repeat(x0, reps) if reps > 1 else x0


def _run_simulation(args, need_hopf: bool):
    cfg, vf, lam = _simulation_inputs(args)
    try:
        c = linear_coefficients(vf, lam)
    except ConfigError:
        if need_hopf:
            raise ConfigError(
                "verification needs a model with a closed linearization "
                "(built-in cubic rings); expression models can only be simulated")
        c = None
    prediction = None
    if c is not None:
        fb = classify_first_bifurcation(c)
        if fb.kind is BifurcationKind.HOPF:
            k = min(fb.critical_modes)
            k = min(k, c.n - k)
            prediction = hopf_predict.predict(c, k)
        elif need_hopf:
            raise ConfigError(
                f"first instability is {fb.kind.value}, nothing to verify")
    period_hint = prediction.period_limit if prediction else None
    h = args.step if args.step else min(0.01, (period_hint or 2.0) / 200.0)
    if args.x0:
        x0 = np.asarray(_parse_floats(args.x0), dtype=float)
    else:
        x0 = _default_x0(vf, prediction.k if prediction else 1, args.seed)
    tr = simulate.settle_and_sample(
        vf, x0, lam, args.transient, args.window, h,
        expected_period=period_hint)
    if args.time_reverse:
        tr = simulate.time_mirrored(tr)
        if prediction is not None:
            prediction = hopf_predict.time_reverse(prediction)
    return vf, tr, prediction


def _write_outputs(prefix, tr, pattern_doc, verify_doc):
    paths = {}
    if prefix:
        paths["trajectory"] = f"{prefix}.trajectory.csv"
        with open(paths["trajectory"], "w", encoding="utf-8") as fh:
            simulate.trajectory_to_csv(tr, fh)
        paths["pattern"] = f"{prefix}.pattern.json"
        with open(paths["pattern"], "w", encoding="utf-8") as fh:
            fh.write(_json_dumps(pattern_doc))
        if verify_doc is not None:
            paths["verify"] = f"{prefix}.verify.json"
            with open(paths["verify"], "w", encoding="utf-8") as fh:
                fh.write(_json_dumps(verify_doc))
    return paths


def _cmd_simulate(args) -> int:
    _, tr, prediction = _run_simulation(args, need_hopf=False)
    try:
        pattern_doc = analyze.extract_pattern(tr).to_json_dict()
    except NumericalError as exc:
        pattern_doc = {"error": type(exc).__name__, "message": str(exc)}
    paths = _write_outputs(args.out, tr, pattern_doc, None)
    summary = {
        "samples": int(tr.states.shape[0]),
        "t_final": tr.times[-1],
        "max_abs": float(np.max(np.abs(tr.states))),
        "pattern": pattern_doc,
        "files": paths,
    }
    if prediction is not None:
        summary["prediction"] = prediction.to_json_dict()
    sys.stdout.write(_json_dumps(summary))
    return 0


def _cmd_verify(args) -> int:
    _, tr, prediction = _run_simulation(args, need_hopf=True)
    pattern = analyze.extract_pattern(tr)
    report = analyze.verify_prediction(prediction, pattern, tol=args.tol)
    pattern_doc = pattern.to_json_dict()
    verify_doc = report.to_json_dict()
    paths = _write_outputs(args.out, tr, pattern_doc, verify_doc)
    sys.stdout.write(_json_dumps({
        "prediction": prediction.to_json_dict(),
        "pattern": pattern_doc,
        "verify": verify_doc,
        "files": paths,
    }))
    return 0


def _grid_axis(spec: str):
    if "=" not in spec:
        raise ConfigError(f"grid spec {spec!r} must be name=lo:hi:count")
    name, rng = spec.split("=", 1)
    parts = rng.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid spec {spec!r} must be name=lo:hi:count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ConfigError("grid count must be >= 1")
    return name.strip(), np.linspace(lo, hi, count)


def _sweep_chunk(base: np.ndarray, indices, chunk: np.ndarray) -> list[str]:
    a_matrix = np.tile(base, (chunk.shape[0], 1))
    for col, idx in enumerate(indices):
        a_matrix[:, idx] = chunk[:, col]
    rows = []
    for values, (fb, token) in zip(chunk, classify_batch(len(base), a_matrix)):
        prefix = ",".join(_fmt(v) for v in values)
        if fb is None:
            rows.append(f"{prefix},AllDecoupled,,,,")
            continue
        critical = "|".join(str(k) for k in sorted(fb.critical_modes))
        rows.append(f"{prefix},{fb.kind.value},{_fmt(fb.max_real_part)},"
                    f"{critical},{_fmt(fb.omega)},{token}")
    return rows


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    c = _coefficients_from_args(args, cfg)
    axes = [_grid_axis(spec) for spec in args.grid or cfg.get("grid", [])]
    if not axes:
        raise ConfigError("sweep needs at least one --grid axis")
    indices = []
    for name, _ in axes:
        if name == "lam":
            indices.append(0)
        elif name.startswith("a") and name[1:].isdigit() and int(name[1:]) < c.n:
            indices.append(int(name[1:]))
        else:
            raise ConfigError(f"unknown sweep parameter {name!r}")
    names = [name for name, _ in axes]
    grids = np.meshgrid(*[vals for _, vals in axes], indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)

    workers = os.environ.get("RINGHOPF_THREADS")
    max_workers = max(1, int(workers)) if workers else min(4, os.cpu_count() or 1)
    chunks = np.array_split(points, max(1, points.shape[0] // 2048))
    header = ",".join(names) + ",kind,max_re,critical_modes,omega,ordering"
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        blocks = list(pool.map(lambda ch: _sweep_chunk(c.a, indices, ch), chunks))
    rows = [row for block in blocks for row in block]
    _emit(header + "\n" + "\n".join(rows) + "\n", args.out)
    return 0


# ------------------------------------------------------------------
# parser
# ------------------------------------------------------------------

def _add_coeff_flags(p):
    p.add_argument("--n", type=int, default=None, help="node count")
    p.add_argument("--a", type=str, default=None,
                   help="comma list of circulant coefficients a0,...,a{n-1}")
    p.add_argument("--dihedral", action="store_true",
                   help="treat coefficients as a bidirectional ring")
    p.add_argument("--config", type=str, default=None, help="JSON config file")
    p.add_argument("--out", type=str, default=None, help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringhopf",
        description="Spectral Hopf analysis and simulation of symmetric rings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues of a ring linearization")
    _add_coeff_flags(p)
    p.add_argument("--shift", type=float, default=None,
                   help="add to the diagonal coefficient a0")
    p.add_argument("--node-dim", dest="node_dim", type=int, default=None)
    p.add_argument("--P", type=str, default=None, help="row-major l*l block P")
    p.add_argument("--Q", type=str, default=None, help="row-major l*l block Q")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("classify", help="first instability under a0 shift")
    _add_coeff_flags(p)
    p.add_argument("--shift", type=float, default=None)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("design", help="coefficients realizing a real-part ranking")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--ordering", type=str, default=None,
                   help="comma list: rank of each mode 0..floor(n/2)")
    p.add_argument("--config", type=str, default=None)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=_cmd_design)

    for name, help_text in (("simulate", "integrate a ring model"),
                            ("verify", "simulate and check the predicted pattern")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--ranges", type=str, default=None)
        p.add_argument("--node-dim", dest="node_dim", type=int, default=None)
        p.add_argument("--dihedral", action="store_true")
        p.add_argument("--model", type=str, default=None)
        p.add_argument("--params", type=str, default=None,
                       help="comma list name=value, overrides config")
        p.add_argument("--x0", type=str, default=None,
                       help="comma list initial state")
        p.add_argument("--transient", type=float, default=500.0)
        p.add_argument("--window", type=float, default=100.0)
        p.add_argument("--step", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=0.03)
        p.add_argument("--time-reverse", dest="time_reverse", action="store_true")
        p.add_argument("--out", type=str, default=None,
                       help="output prefix for trajectory/pattern/verify files")
        p.set_defaults(func=_cmd_simulate if name == "simulate" else _cmd_verify)

    p = sub.add_parser("sweep", help="classify over a coefficient grid")
    _add_coeff_flags(p)
    p.add_argument("--grid", action="append", default=None,
                   help="axis spec name=lo:hi:count, repeatable")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            sys.stderr.write(_json_dumps(
                {"error": "ConfigError", "message": "bad command line"}))
            return 2
        return 0
    try:
        return args.func(args)
    except ConfigurationError as exc:
        sys.stderr.write(_json_dumps(
            {"error": type(exc).__name__, "message": str(exc)}))
        return 2
    except NumericalError as exc:
        sys.stderr.write(_json_dumps(
            {"error": type(exc).__name__, "message": str(exc)}))
        return 3


if __name__ == "__main__":
    sys.exit(main())
