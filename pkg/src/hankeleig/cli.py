"""Command line interface.

Four subcommands: ``solve`` runs the multistart eigenvalue search and emits
a result JSON plus an optional iteration-trace CSV; ``gen`` writes a
benchmark generating vector; ``verify`` compares the FFT products against
the dense oracle on random instances; ``bench`` times the products and the
solver over a list of dimensions.

Exit codes: 0 for a converged solve (or a clean verify), 2 when a solve
produced no converged result, 1 for usage errors.  All floating point
output is serialised with 17 significant digits so files round-trip
exactly.  Result files are written atomically (temp file, then rename).
The environment variable ``HANKEL_THREADS`` caps the multistart worker
count (default: the logical core count).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import struct
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .dense_oracle import OracleCapError, dense_xm, dense_xm1, materialize
from .fft_products import HankelSpec, hankel_xm, hankel_xm1, make_cache
from .generators import Family, FamilySpec, generate
from .objective import BTensorKind
from .solver import Extreme, SolverOptions, Termination, multistart, solve

__all__ = ["main"]

_VECTOR_MAGIC = b"HNKV"
_VECTOR_VERSION = 1
_JSON_VECTOR_LIMIT = 10_000


class UsageError(Exception):
    """Bad flags or malformed inputs; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# serialisation helpers

def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _json_text(obj) -> str:
    parts: list[str] = []

    def walk(o):
        if o is None:
            parts.append("null")
        elif o is True or o is False:
            parts.append("true" if o else "false")
        elif isinstance(o, (int, np.integer)):
            parts.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            parts.append(_format_float(float(o)))
        elif isinstance(o, str):
            parts.append(json.dumps(o))
        elif isinstance(o, dict):
            parts.append("{")
            for i, (key, val) in enumerate(o.items()):
                if i:
                    parts.append(", ")
                parts.append(json.dumps(str(key)))
                parts.append(": ")
                walk(val)
            parts.append("}")
        elif isinstance(o, (list, tuple, np.ndarray)):
            parts.append("[")
            for i, val in enumerate(o):
                if i:
                    parts.append(", ")
                walk(val)
            parts.append("]")
        else:
            raise TypeError(f"cannot serialise {type(o).__name__}")

    walk(obj)
    return "".join(parts)


def _atomic_write(path: str, data: str | bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hankeleig-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _vector_blob(x: np.ndarray) -> bytes:
    header = (_VECTOR_MAGIC + struct.pack("<I", _VECTOR_VERSION)
              + struct.pack("<Q", x.size))
    return header + np.asarray(x, dtype="<f8").tobytes()


def _trace_csv(trace) -> str:
    lines = ["k,lambda,grad_norm,alpha,backtracks"]
    for r in trace:
        lines.append(",".join([
            str(r.k),
            _format_float(r.lambda_k),
            _format_float(r.grad_norm),
            _format_float(r.alpha_k),
            str(r.backtracks),
        ]))
    return "\n".join(lines) + "\n"


def _emit(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        _atomic_write(path, text)


# ---------------------------------------------------------------------------
# tensor sources

def _add_family_args(p: argparse.ArgumentParser, with_input: bool) -> None:
    p.add_argument("--family", choices=[f.value for f in Family],
                   help="benchmark family for the generating vector")
    p.add_argument("--order", type=int, help="tensor order m")
    p.add_argument("--dim", type=int, help="tensor dimension n")
    p.add_argument("--epsilon", type=float,
                   help="parameter of the 'param' family")
    p.add_argument("--seed", type=int, default=0,
                   help="RNG seed (random family and solver starts)")
    if with_input:
        p.add_argument("--input", metavar="FILE",
                       help="read the generating vector from FILE instead "
                            "(txt: one number per line with --order/--dim; "
                            "json: {\"m\", \"n\", \"v\"})")


def _spec_from_family(args) -> tuple[HankelSpec, dict]:
    family = Family(args.family)
    if family is Family.PARAM_EPS:
        m = 4 if args.order is None else args.order
        n = 4 if args.dim is None else args.dim
        if args.epsilon is None:
            raise UsageError("--family param needs --epsilon")
    else:
        if args.order is None or args.dim is None:
            raise UsageError(f"--family {family.value} needs --order and --dim")
        m, n = args.order, args.dim
    fs = FamilySpec(
        family=family, m=m, n=n, epsilon=args.epsilon,
        seed=args.seed if family is Family.RANDOM else None,
    )
    spec = generate(fs)
    source = {"family": family.value, "m": spec.m, "n": spec.n}
    if fs.epsilon is not None:
        source["epsilon"] = fs.epsilon
    if fs.seed is not None:
        source["generator_seed"] = fs.seed
    return spec, source


def _spec_from_file(args) -> tuple[HankelSpec, dict]:
    try:
        with open(args.input, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from exc
    m = n = None
    v = None
    try:
        payload = json.loads(text)
    except json.JSONDecodeError:
        payload = None
    if isinstance(payload, dict):
        try:
            m, n, v = int(payload["m"]), int(payload["n"]), payload["v"]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(
                f"{args.input}: a json tensor file needs integer 'm', 'n' "
                "and a numeric array 'v'"
            ) from exc
        if args.order is not None and args.order != m:
            raise UsageError(f"--order {args.order} contradicts m={m} in {args.input}")
        if args.dim is not None and args.dim != n:
            raise UsageError(f"--dim {args.dim} contradicts n={n} in {args.input}")
    else:
        if args.order is None or args.dim is None:
            raise UsageError("--input with a txt vector needs --order and --dim")
        m, n = args.order, args.dim
        try:
            v = [float(tok) for tok in text.split()]
        except ValueError as exc:
            raise UsageError(f"{args.input}: expected one number per line") from exc
    spec = HankelSpec(m=m, n=n, v=np.asarray(v, dtype=float))
    return spec, {"input": args.input, "m": spec.m, "n": spec.n}


def _load_spec(args) -> tuple[HankelSpec, dict]:
    has_family = getattr(args, "family", None) is not None
    has_input = getattr(args, "input", None) is not None
    if has_family == has_input:
        raise UsageError("choose exactly one tensor source: --family or --input")
    return _spec_from_family(args) if has_family else _spec_from_file(args)


def _worker_cap() -> int:
    raw = os.environ.get("HANKEL_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError as exc:
        raise UsageError(f"HANKEL_THREADS must be a positive integer, got {raw!r}") from exc
    if cap < 1:
        raise UsageError(f"HANKEL_THREADS must be a positive integer, got {raw!r}")
    return cap


# ---------------------------------------------------------------------------
# subcommands

def _cmd_solve(args) -> int:
    t0 = time.perf_counter()
    spec, source = _load_spec(args)
    if spec.m % 2 != 0:
        raise UsageError(
            f"the solver needs an even tensor order, got m = {spec.m}"
        )
    kind = BTensorKind(args.btensor)
    opts = SolverOptions(
        eta=args.eta, beta=args.beta, alpha_max=args.alpha_max,
        tol_rel=args.tol, max_iter=args.max_iter,
        extreme=Extreme(args.extreme), starts=args.starts, seed=args.seed,
    )
    workers = min(opts.starts, _worker_cap())
    t1 = time.perf_counter()
    outcome = multistart(spec, kind, opts, workers=workers)
    t2 = time.perf_counter()

    manifest = {
        "tool": "hankeleig",
        "version": __version__,
        "command": "solve",
        "source": source,
        "btensor": args.btensor,
        "extreme": args.extreme,
        "options": {
            "eta": opts.eta, "beta": opts.beta, "alpha_max": opts.alpha_max,
            "alpha_1": opts.alpha_1, "tol_rel": opts.tol_rel,
            "max_iter": opts.max_iter, "max_backtracks": opts.max_backtracks,
            "starts": opts.starts, "seed": opts.seed,
        },
        "workers": workers,
        "timings": {"build_s": t1 - t0, "solve_s": t2 - t1},
    }

    best = outcome.best
    if best is None:
        for index, message in outcome.failures:
            print(f"start {index} failed: {message}", file=sys.stderr)
        print("error: all starts failed", file=sys.stderr)
        return 2

    payload = {"lambda": best.eigenvalue}
    if spec.n <= _JSON_VECTOR_LIMIT:
        payload["x"] = best.x
    payload.update({
        "residual": best.residual,
        "iterations": best.iterations,
        "termination": best.termination.value,
        "occurrences": [
            {"lambda": b.eigenvalue, "count": b.count, "share": b.share}
            for b in outcome.bins
        ],
    })
    if outcome.failures:
        payload["failures"] = [[i, msg] for i, msg in outcome.failures]
    payload["manifest"] = manifest

    _emit(args.out, _json_text(payload))
    if args.trace is not None:
        _atomic_write(args.trace, _trace_csv(best.trace))
    if args.emit_vector is not None:
        _atomic_write(args.emit_vector, _vector_blob(best.x))

    ok = best.termination in (Termination.CONVERGED, Termination.ZERO_GRADIENT)
    return 0 if ok else 2


def _cmd_gen(args) -> int:
    spec, _ = _spec_from_family(args)
    if args.format == "json":
        text = _json_text({"m": spec.m, "n": spec.n, "v": spec.v})
    else:
        text = "\n".join(_format_float(val) for val in spec.v) + "\n"
    _emit(args.out, text)
    return 0


def _cmd_verify(args) -> int:
    m, n = args.order, args.dim
    rng = np.random.default_rng(args.seed)
    ell = m * (n - 1) + 1
    worst = 0.0
    try:
        for _ in range(args.trials):
            spec = HankelSpec(m=m, n=n, v=rng.standard_normal(ell))
            x = rng.standard_normal(n)
            dense = materialize(spec)
            cache = make_cache(spec)
            ref = dense_xm(dense, x)
            err = abs(hankel_xm(cache, spec, x) - ref) / (1.0 + abs(ref))
            worst = max(worst, err)
            ref1 = dense_xm1(dense, x)
            err1 = np.max(np.abs(hankel_xm1(cache, spec, x) - ref1)
                          / (1.0 + np.abs(ref1)))
            worst = max(worst, float(err1))
    except OracleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"max relative error over {args.trials} trials at m={m}, n={n}: "
          f"{worst:.3e}")
    return 0 if worst <= 1e-10 else 1


def _cmd_bench(args) -> int:
    try:
        dims = [int(tok) for tok in args.dims.split(",") if tok]
    except ValueError as exc:
        raise UsageError(f"--dims must be a comma list of integers, got "
                         f"{args.dims!r}") from exc
    if not dims:
        raise UsageError("--dims must name at least one dimension")
    family = Family(args.family)
    lines = ["family,m,n,product_time_s,solve_time_s,iters"]
    for n in dims:
        fs = FamilySpec(family=family, m=args.order, n=n,
                        seed=args.seed if family is Family.RANDOM else None)
        spec = generate(fs)
        cache = make_cache(spec)
        x = np.random.default_rng(args.seed).standard_normal(n)
        x /= np.linalg.norm(x)
        hankel_xm1(cache, spec, x)
        samples = []
        for _ in range(args.reps):
            tic = time.perf_counter()
            hankel_xm1(cache, spec, x)
            samples.append(time.perf_counter() - tic)
        product_time = float(np.median(samples))
        opts = SolverOptions(extreme=Extreme(args.extreme), seed=args.seed)
        tic = time.perf_counter()
        result = solve(spec, BTensorKind(args.btensor), opts)
        solve_time = time.perf_counter() - tic
        lines.append(",".join([
            family.value, str(args.order), str(n),
            _format_float(product_time), _format_float(solve_time),
            str(result.iterations),
        ]))
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="hankeleig",
                     description="Extremal eigenpairs of Hankel tensors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="compute an extremal eigenpair")
    _add_family_args(p_solve, with_input=True)
    p_solve.add_argument("--btensor", choices=["z", "h"], required=True,
                         help="reference tensor: z for Z-eigenpairs, h for "
                              "H-eigenpairs")
    p_solve.add_argument("--extreme", choices=["min", "max"], required=True)
    p_solve.add_argument("--starts", type=int, default=1,
                         help="number of random starting points")
    p_solve.add_argument("--eta", type=float, default=1e-3,
                         help="sufficient-decrease constant")
    p_solve.add_argument("--beta", type=float, default=0.5,
                         help="backtracking factor")
    p_solve.add_argument("--alpha-max", type=float, default=1e4,
                         dest="alpha_max", help="step size cap")
    p_solve.add_argument("--tol", type=float, default=1e-12,
                         help="relative objective tolerance coefficient "
                              "(scaled by sqrt(n))")
    p_solve.add_argument("--max-iter", type=int, default=1000, dest="max_iter")
    p_solve.add_argument("--out", metavar="PATH",
                         help="result JSON path (default: stdout)")
    p_solve.add_argument("--trace", metavar="PATH",
                         help="iteration trace CSV path")
    p_solve.add_argument("--emit-vector", metavar="PATH", dest="emit_vector",
                         help="write the eigenvector as binary (magic 'HNKV', "
                              "u32 version, u64 length, little-endian f64)")
    p_solve.set_defaults(func=_cmd_solve)

    p_gen = sub.add_parser("gen", help="write a benchmark generating vector")
    _add_family_args(p_gen, with_input=False)
    p_gen.add_argument("--format", choices=["txt", "json"], default="txt")
    p_gen.add_argument("--out", metavar="PATH",
                       help="output path (default: stdout)")
    p_gen.set_defaults(func=_cmd_gen)

    p_verify = sub.add_parser(
        "verify", help="compare FFT products against the dense oracle")
    p_verify.add_argument("--order", type=int, required=True)
    p_verify.add_argument("--dim", type=int, required=True)
    p_verify.add_argument("--trials", type=int, default=100)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser(
        "bench", help="time the FFT product and the solver over dimensions")
    p_bench.add_argument("--order", type=int, required=True)
    p_bench.add_argument("--dims", required=True,
                         help="comma list of dimensions, e.g. 10,100,1000")
    p_bench.add_argument("--reps", type=int, default=20)
    p_bench.add_argument("--family", choices=[f.value for f in Family],
                         default="random")
    p_bench.add_argument("--btensor", choices=["z", "h"], default="z")
    p_bench.add_argument("--extreme", choices=["min", "max"], default="min")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", metavar="PATH",
                         help="CSV path (default: stdout)")
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
