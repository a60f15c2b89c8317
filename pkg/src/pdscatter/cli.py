"""Command-line front end.

Scalar and structured results are emitted as JSON on stdout (stable key
order, full float round-trip precision); curve outputs are plot-ready CSV.
Errors map to a JSON record on stderr and a class-specific exit code:

    0 success, 2 parse, 3 domain, 4 degenerate weights, 5 numeric.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .asymptotics import c_constants, g2_index, t_funcs
from .depth import Candidate2D, DataMatrix, Exact1D, Sampled, pd_empirical_batch
from .errors import (
    ContaminationError,
    DegenerateWeightsError,
    DomainError,
    NumericError,
    ParseError,
    PdscatterError,
)
from .estimators import pws_fit
from .maxbias import BiasEngine, mbi
from .model import EllipticalModel
from .simlab import SimConfig, rbp_probe, rbp_theoretical, benchmark_run
from .weights import WeightSpec, default_cutoff

EXIT_CODES = {
    ParseError: 2,
    DomainError: 3,
    ContaminationError: 3,
    DegenerateWeightsError: 4,
    NumericError: 5,
}

__all__ = ["main", "read_dataset", "EXIT_CODES"]


def read_dataset(path: str) -> DataMatrix:
    """Parse a comma-separated numeric file, skipping one optional header row."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in raw.splitlines() if ln.strip() != ""]
    if not lines:
        raise DomainError(f"{path}: empty dataset")
    rows = []
    start = 0
    first = lines[0].split(",")
    try:
        [float(cell) for cell in first]
    except ValueError:
        start = 1  # header row
        if len(lines) == 1:
            raise DomainError(f"{path}: header but no data rows")
    width = None
    for lineno, ln in enumerate(lines[start:], start=start + 1):
        cells = ln.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(f"{path}: ragged row at line {lineno} "
                             f"({len(cells)} cells, expected {width})")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"{path}: non-numeric cell at line {lineno}: {exc}") from exc
    return DataMatrix(np.asarray(rows))


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _weights_from(args) -> tuple[WeightSpec, WeightSpec]:
    c = args.C if args.C is not None else default_cutoff(getattr(args, "dim", 2) or 2)
    return (WeightSpec(order=1, cutoff=c, steepness=args.K),
            WeightSpec(order=2, cutoff=c, steepness=args.K))


def _method_from(args, d: int):
    name = getattr(args, "method", "auto") or "auto"
    if name == "auto":
        name = {1: "exact1d", 2: "candidate2d"}.get(d, "sampled")
    if name == "exact1d":
        return Exact1D()
    if name == "candidate2d":
        return Candidate2D(refine=not getattr(args, "no_refine", False))
    if name == "sampled":
        if getattr(args, "seed", None) is None:
            raise DomainError("--seed is required for the sampled method")
        return Sampled(count=getattr(args, "directions", None) or 1000 * d,
                       refine_steps=getattr(args, "refine_steps", 0),
                       seed=args.seed)
    raise DomainError(f"unknown method {name!r}")


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_estimate(args) -> int:
    data = read_dataset(args.input)
    w1, w2 = _weights_from(args)
    est = pws_fit(data, args.mad_k, _method_from(args, data.d), w1, w2)
    _emit({
        "location": est.location.tolist(),
        "scatter": est.scatter.tolist(),
        "depths": est.depths.tolist(),
        "weights1": est.weights1.tolist(),
        "weights2": est.weights2.tolist(),
    })
    return 0


def _cmd_depth(args) -> int:
    data = read_dataset(args.input)
    depths = pd_empirical_batch(data, args.mad_k, _method_from(args, data.d))
    _emit({"depths": depths.tolist()})
    return 0


def _cmd_are(args) -> int:
    _, w2 = _weights_from(args)
    consts = c_constants(args.dim, w2)
    _emit({
        "dim": args.dim,
        "c0": consts.c0, "c1": consts.c1, "c2": consts.c2, "c3": consts.c3,
        "sigma1": consts.sigma1, "sigma2": consts.sigma2,
        "are": consts.c1 ** 2 * (1.0 + args.kappa) / consts.sigma1,
        "kappa": args.kappa,
    })
    return 0


def _cmd_g2(args) -> int:
    _, w2 = _weights_from(args)
    print(repr(g2_index(args.dim, w2)))
    return 0


def _cmd_influence(args) -> int:
    _, w2 = _weights_from(args)
    consts = c_constants(args.dim, w2)
    lo, hi, step = _parse_grid(args.r_grid)
    sys.stdout.write("r,t1,t2\n")
    for r in np.arange(lo, hi + 0.5 * step, step):
        t1, t2 = t_funcs(float(r), consts)
        sys.stdout.write(f"{float(r)!r},{float(t1)!r},{float(t2)!r}\n")
    return 0


def _cmd_maxbias(args) -> int:
    lo, hi, step = _parse_grid(args.eps_grid)
    w1, w2 = _weights_from(args)
    model = EllipticalModel(np.zeros(args.dim), np.eye(args.dim))
    engine = BiasEngine(args.dim, w1, w2, model.law, quality=args.quality)
    sys.stdout.write("eps,mbi\n")
    for eps in np.arange(lo, hi + 0.5 * step, step):
        val = mbi(float(eps), model, w1, w2, grid=args.r_points, engine=engine)
        sys.stdout.write(f"{float(eps)!r},{val!r}\n")
    return 0


def _cmd_simulate(args) -> int:
    w1, w2 = _weights_from(args)
    d = args.dim
    outlier = tuple(float(v) for v in args.outlier.split(",")) if args.outlier \
        else tuple([100.0] + [0.0] * (d - 1))
    method = _method_from(args, d)
    cfg = SimConfig(
        n=args.n, d=d, eps=args.eps, outlier=outlier, replicates=args.reps,
        seed=args.seed, k=args.mad_k, method=method, w1=w1, w2=w2,
        fixed_count=args.fixed_count,
        contaminate_coords=(tuple(int(c) for c in args.contaminate_coords.split(","))
                            if args.contaminate_coords else None),
    )
    report = benchmark_run(cfg)
    if args.phi0_csv:
        with open(args.phi0_csv, "w", encoding="utf-8") as fh:
            fh.write(report.phi0_csv())
    print(report.to_json())
    return 0


def _cmd_breakdown(args) -> int:
    out = {"theoretical": str(rbp_theoretical(args.n, args.d, args.k))}
    if args.probe:
        if not args.input:
            raise DomainError("--probe requires --input")
        data = read_dataset(args.input)
        if (data.n, data.d) != (args.n, args.d):
            raise DomainError("dataset shape does not match --n/--d")
        w1, w2 = _weights_from(args)
        frac, log = rbp_probe(data, args.k, _method_from(args, data.d), w1, w2)
        out["empirical"] = str(frac)
        out["log"] = log
    _emit(out)
    return 0


def _parse_grid(spec: str) -> tuple[float, float, float]:
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise DomainError(f"grid must be lo:hi:step, got {spec!r}") from exc
    if step <= 0 or hi < lo:
        raise DomainError(f"bad grid {spec!r}")
    return lo, hi, step


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_weight_flags(p):
    p.add_argument("--C", type=float, default=None, help="weight cutoff in (0,1)")
    p.add_argument("--K", type=float, default=2.0, help="weight steepness")


def _add_method_flags(p):
    p.add_argument("--method", choices=["auto", "exact1d", "candidate2d", "sampled"],
                   default="auto")
    p.add_argument("--no-refine", action="store_true",
                   help="disable golden-section refinement (candidate2d)")
    p.add_argument("--directions", type=int, default=None,
                   help="direction count for the sampled method")
    p.add_argument("--refine-steps", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mad-k", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pdscatter",
        description="Projection-depth weighted location/scatter toolbox",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="fit weighted location and scatter")
    p.add_argument("--input", required=True)
    _add_weight_flags(p)
    _add_method_flags(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("depth", help="per-point projection depths")
    p.add_argument("--input", required=True)
    _add_weight_flags(p)
    _add_method_flags(p)
    p.set_defaults(func=_cmd_depth)

    p = sub.add_parser("are", help="asymptotic constants and relative efficiency")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--kappa", type=float, default=0.0)
    _add_weight_flags(p)
    p.set_defaults(func=_cmd_are)

    p = sub.add_parser("g2", help="gross-error sensitivity index of the shape")
    p.add_argument("--dim", type=int, required=True)
    _add_weight_flags(p)
    p.set_defaults(func=_cmd_g2)

    p = sub.add_parser("influence", help="influence kernel profiles t1, t2 (CSV)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--r-grid", required=True, help="lo:hi:step")
    _add_weight_flags(p)
    p.set_defaults(func=_cmd_influence)

    p = sub.add_parser("maxbias", help="maximum bias index curve (CSV)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--eps-grid", required=True, help="lo:hi:step")
    p.add_argument("--r-points", type=int, default=256)
    p.add_argument("--quality", type=float, default=0.5)
    _add_weight_flags(p)
    p.set_defaults(func=_cmd_maxbias)

    p = sub.add_parser("simulate", help="contaminated-model benchmark")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--outlier", default=None, help="comma-separated point")
    p.add_argument("--fixed-count", action="store_true")
    p.add_argument("--contaminate-coords", default=None,
                   help="comma-separated coordinate indices")
    p.add_argument("--phi0-csv", default=None)
    _add_weight_flags(p)
    _add_method_flags(p)
    p.set_defaults(func=_cmd_simulate, need_seed=True)

    p = sub.add_parser("breakdown", help="replacement breakdown point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--probe", action="store_true")
    p.add_argument("--input", default=None)
    _add_weight_flags(p)
    _add_method_flags(p)
    p.set_defaults(func=_cmd_breakdown)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "need_seed", False) and args.seed is None:
        _fail(DomainError("--seed is required for randomized subcommands"))
        return 3
    try:
        return args.func(args)
    except PdscatterError as exc:
        _fail(exc)
        for cls in type(exc).__mro__:
            if cls in EXIT_CODES:
                return EXIT_CODES[cls]
        return 1


def _fail(exc: PdscatterError) -> None:
    code = 1
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            code = EXIT_CODES[cls]
            break
    sys.stderr.write(json.dumps({
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": code,
    }) + "\n")


if __name__ == "__main__":
    sys.exit(main())
