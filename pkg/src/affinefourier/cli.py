"""Command-line front end.

Every subcommand reads a JSON spec (inline or a file path), writes
``<out>.csv`` and ``<out>.json`` atomically and prints a one-line summary.
Exit status is 0 on success, 2 for invalid input and 3 for numerical
failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algebraic import IntPolynomial, NumericFailure, alpha_pow_mod1, certify_pisot
from .chaos import chaos_classify, separation_scan
from .detmeasure import CylinderSpec, Kernel, consistency_check, cylinder_prob
from .fourier import RayRestriction, erdos_scan, mu_hat, pisot_matrix_scan
from .ifs import AffineIFS, bernoulli_ifs, chaos_game
from .induced import (
    InducedSystem,
    det_lambda,
    det_order,
    nu_hat_det,
    toeplitz_exact_pn,
    toeplitz_minor_expansion,
    toeplitz_product_approx,
)

OUT_ENV = "AFFINEFOURIER_OUTDIR"
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


def fmt(x) -> str:
    """Shortest round-trip text for floats (at most 17 significant digits)."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _load_spec(text: str | None) -> dict:
    if text is None:
        return {}
    p = Path(text)
    if not text.lstrip().startswith("{") and p.is_file():
        text = p.read_text()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed spec: {exc}") from None
    if not isinstance(spec, dict):
        raise ValueError("spec must be a JSON object")
    return spec


def _ctx(spec: dict):
    if "poly" not in spec:
        raise ValueError("spec needs a 'poly' entry, e.g. \"x^2 - x - 1\"")
    poly = spec["poly"]
    text = json.dumps(poly) if isinstance(poly, list) else str(poly)
    return certify_pisot(IntPolynomial.parse(text))


def _ray(spec: dict, ctx):
    system = spec.get("system", "bernoulli")
    if system == "bernoulli":
        return RayRestriction(bernoulli_ifs(ctx.lam), [1.0])
    if system == "simplex":
        d = int(spec.get("d", 2))
        return RayRestriction.simplex(d, ctx.lam, spec.get("direction"))
    raise ValueError(f"unknown system {system!r} (bernoulli or simplex)")


# subcommands ---------------------------------------------------------------
# each returns (csv header, rows, header extras, summary line)


def cmd_pisot_certify(spec, args):
    ctx = _ctx(spec)
    rows = [(i, z.real, z.imag, abs(z)) for i, z in enumerate([complex(ctx.alpha), *ctx.conjugates])]
    extra = {"alpha": ctx.alpha, "conjugate_max": ctx.conjugate_max, "minpoly": str(ctx.minpoly)}
    return ["index", "re", "im", "modulus"], rows, extra, f"Pisot alpha={ctx.alpha!r} conjugate_max={ctx.conjugate_max!r}"


def cmd_pisot_trace(spec, args):
    ctx = _ctx(spec)
    rows = []
    for k in range(args.kmax + 1):
        m = alpha_pow_mod1(ctx, k)
        rows.append((k, ctx.trace(k), m.offset, m.value))
    return ["k", "trace", "offset", "distance"], rows, {"alpha": ctx.alpha}, f"{len(rows)} traces"


def cmd_ifs_transform(spec, args):
    ifs = AffineIFS.from_dict(spec["ifs"])
    xis = np.asarray(spec.get("xi", [[0.0] * ifs.dim]), dtype=float).reshape(-1, ifs.dim)
    samples = spec.get("samples")
    emp = chaos_game(ifs, int(samples), seed=args.seed) if samples else None
    rows = []
    for xi in xis:
        ev = mu_hat(ifs, xi, tol=args.tol, depth=args.depth)
        mc = emp.characteristic(xi) if emp is not None else None
        rows.append((*xi, ev.value.real, ev.value.imag, abs(ev.value), ev.depth, ev.tail_bound, None if mc is None else abs(mc - ev.value)))
    header = [f"xi_{i + 1}" for i in range(ifs.dim)] + ["re", "im", "abs", "depth", "tail_bound", "mc_discrepancy"]
    return header, rows, {}, f"{len(rows)} frequencies"


def _scan_output(scan, extra=None):
    rows = list(scan.rows())
    info = {
        "theta": scan.theta,
        "N": scan.N,
        "certified_bound": scan.certified_bound,
        "floor": scan.floor,
        "tail_bound": scan.tail_bound,
        "head_constant": scan.head_constant,
        "tail_floor": scan.tail_floor,
        "theta_product": scan.theta_product,
        **scan.meta,
        **(extra or {}),
    }
    line = f"floor={scan.floor!r} certified={scan.certified_bound!r}"
    return ["k", "re", "im", "abs", "split_residual", "depth"], rows, info, line


def cmd_erdos_scan(spec, args):
    ctx = _ctx(spec)
    scan = erdos_scan(_ray(spec, ctx), ctx, args.kmax, tol=args.tol, direct=not spec.get("no_direct", False), grid=args.grid)
    return _scan_output(scan, {"alpha": ctx.alpha})


def cmd_pisot_matrix_scan(spec, args):
    ctx = _ctx(spec)
    scan = pisot_matrix_scan(ctx, float(spec.get("b", 0.0)), float(spec.get("c", 2.0)), args.kmax, tol=args.tol)
    return _scan_output(scan, {"alpha": ctx.alpha})


def _kernel(spec):
    if "kernel" not in spec:
        raise ValueError("spec needs a 'kernel' entry")
    return Kernel.from_dict(spec["kernel"])


def cmd_det_cylinder(spec, args):
    K = _kernel(spec)
    cyl = CylinderSpec.from_dict(spec)
    prob = cylinder_prob(K, cyl)
    return ["F", "xi", "probability"], [(" ".join(map(str, cyl.F)), "".join(map(str, cyl.xi)), prob)], {}, fmt(prob)


def cmd_det_consistency(spec, args):
    import itertools

    K = _kernel(spec)
    universe = int(spec.get("universe", 7))
    max_size = int(spec.get("max_size", 4))
    rows = []
    for r in range(max_size + 1):
        for F in itertools.combinations(range(1, universe + 1), r):
            for k in range(1, universe + 1):
                if k not in F:
                    rows.append((" ".join(map(str, F)), k, consistency_check(K, F, k)))
    worst = max(r[2] for r in rows)
    return ["F", "k", "residual"], rows, {"max_residual": worst}, f"{len(rows)} checks, max residual {worst!r}"


def _t_grid(spec):
    return [float(t) for t in np.atleast_1d(spec.get("t", [1.0]))]


def cmd_induced_transform(spec, args):
    sys_ = InducedSystem(float(spec["lambda"]), _kernel(spec))
    rows = []
    for t in _t_grid(spec):
        r = nu_hat_det(sys_, t, tol=args.tol)
        rows.append((t, r.value.real, r.value.imag, abs(r.value), r.n_used, r.stagnation, r.converged))
    return ["t", "re", "im", "abs", "n_used", "stagnation", "converged"], rows, {}, f"{len(rows)} frequencies"


def cmd_toeplitz_compare(spec, args):
    p, a, lam = float(spec["p"]), float(spec["a"]), float(spec["lambda"])
    t = float(spec.get("t", 1.0))
    rows = []
    for n in range(1, int(spec.get("n_max", 12)) + 1):
        approx = toeplitz_product_approx(p, a, lam, t, n)
        pn = toeplitz_exact_pn(p, a, lam, t, n)
        full = toeplitz_minor_expansion(p, a, lam, t, n)
        d = approx.det_value
        rows.append((n, d.real, d.imag, approx.product.real, approx.product.imag, approx.dev, abs(pn - d), abs(full - d)))
    header = ["n", "det_re", "det_im", "product_re", "product_im", "dev", "pn_gap", "expansion_gap"]
    return header, rows, {}, f"dev({rows[-1][0]})={rows[-1][5]!r}"


def cmd_det_lambda(spec, args):
    K = _kernel(spec)
    lam = float(spec["lambda"])
    rows = []
    for t in _t_grid(spec):
        r = det_lambda(K, lam, t, tol=args.tol)
        rows.append((t, r.value.real, r.value.imag, abs(r.value), r.n_used, r.stagnation, r.converged))
    return ["t", "re", "im", "abs", "n_used", "stagnation", "converged"], rows, {}, f"{len(rows)} frequencies"


def cmd_chaos_scan(spec, args):
    ctx = _ctx(spec)
    ifs = bernoulli_ifs(ctx.lam)
    scan = separation_scan(ifs, ctx, args.kmax)
    label = chaos_classify(ifs, ctx, spec.get("eps"), args.kmax)
    rows = list(zip(scan.n, scan.t, scan.witness, scan.bounds))
    info = {"classification": label, "floor": scan.floor, "certified_bound": scan.certified_bound}
    return ["n", "t_n", "witness_xi", "bound"], rows, info, label


COMMANDS = {
    "pisot-certify": (cmd_pisot_certify, "certify a Pisot number from its minimal polynomial"),
    "pisot-trace": (cmd_pisot_trace, "exact traces and mod-1 offsets of alpha^k"),
    "ifs-transform": (cmd_ifs_transform, "Fourier transform of an affine IFS measure"),
    "erdos-scan": (cmd_erdos_scan, "|mu_hat(alpha^k)| scan with certified floor"),
    "pisot-matrix-scan": (cmd_pisot_matrix_scan, "scan for A = [[alpha, 0], [b, c]]"),
    "det-cylinder": (cmd_det_cylinder, "cylinder probability of a determinantal measure"),
    "det-consistency": (cmd_det_consistency, "additivity sweep over cylinders"),
    "induced-transform": (cmd_induced_transform, "transform of the induced measure"),
    "toeplitz-compare": (cmd_toeplitz_compare, "Toeplitz determinant vs product and closed forms"),
    "det-lambda": (cmd_det_lambda, "infinite determinant det_lambda on a t-grid"),
    "chaos-scan": (cmd_chaos_scan, "translation separation bounds and classification"),
}

SPEC_HELP = """spec examples (JSON, inline or a file path):
  pisot-*, erdos-scan, chaos-scan: {"poly": "x^2 - x - 1", "system": "simplex", "d": 2, "direction": [2, 3]}
  pisot-matrix-scan:  {"poly": "x^2 - x - 1", "b": 0.7, "c": 2}
  ifs-transform:      {"ifs": {"dim": 1, "A": [3], "B": [[-1], [1]], "p": [0.5, 0.5]}, "xi": [[1]], "samples": 100000}
  det-cylinder:       {"kernel": {"variant": "diagonal", "p": 0.5}, "F": [1, 2], "xi": [1, 0]}
  det-consistency:    {"kernel": {"variant": "toeplitz", "a": 0.7}, "universe": 7, "max_size": 4}
  induced-transform, det-lambda: {"kernel": {...}, "lambda": 0.5, "t": [0.5, 1.0]}
  toeplitz-compare:   {"p": 0.3, "a": 0.5, "lambda": 0.5, "t": 1.3, "n_max": 12}
kernel variants: diagonal(p), toeplitz(a), toeplitz_general(p, a), dense(matrix)
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affinefourier",
        description="Fourier scans of IFS and determinantal measures.",
        epilog=SPEC_HELP + f"\nOutputs go to <out>.csv and <out>.json; the default directory is ${OUT_ENV} or the current one.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--spec", help="JSON object or path to a JSON file")
        p.add_argument("--out", help="output basename (without extension)")
        p.add_argument("--tol", type=float, default=None, help="tolerance (default depends on the command)")
        p.add_argument("--depth", type=int, default=None, help="fixed product depth for ifs-transform")
        p.add_argument("--kmax", type=int, default=20, help="largest power / shift index")
        p.add_argument("--seed", type=int, default=0, help="random seed for sampling")
        p.add_argument("--grid", type=int, default=32, help="theta grid resolution")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    func = COMMANDS[args.command][0]
    if args.tol is None:
        args.tol = 1e-10 if args.command in ("induced-transform", "det-lambda") else 1e-12
    start = time.perf_counter()
    try:
        if args.tol <= 0 or args.kmax < 0:
            raise ValueError("--tol must be positive and --kmax non-negative")
        spec = _load_spec(args.spec)
        header, rows, extra, summary = func(spec, args)
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out) if args.out else Path(os.environ.get(OUT_ENV, ".")) / args.command
    meta = {
        "command": args.command,
        "spec": spec,
        "options": {k: getattr(args, k) for k in ("tol", "depth", "kmax", "seed", "grid")},
        "version": __version__,
        "wall_time_s": time.perf_counter() - start,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "results": extra,
    }
    _atomic_write(out.with_suffix(".csv"), _csv_text(header, rows))
    _atomic_write(out.with_suffix(".json"), json.dumps(meta, indent=2, default=_json_default) + "\n")
    print(summary)
    return EXIT_OK


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
