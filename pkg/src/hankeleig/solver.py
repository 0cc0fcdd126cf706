"""Curvilinear search on the unit sphere for extremal Hankel eigenpairs.

The iteration moves along the sphere-preserving curve obtained from a
Cayley transform of a rank-two skew matrix built from the iterate and the
gradient.  A backtracking search enforces sufficient decrease (increase,
for the largest eigenvalue), the next trial step comes from the geometric
mean of the two Barzilai-Borwein step sizes, and the run stops when the
objective stalls in relative terms.  A multistart driver and a shifted
power-iteration baseline sit on top for cross-validation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .fft_products import HankelSpec, SpectralCache, hankel_xm, make_cache
from .objective import (BTensorKind, ObjectiveEval, ReferenceTensor, b_xm,
                        evaluate, residual)

__all__ = [
    "Extreme",
    "Termination",
    "SolverOptions",
    "IterationRecord",
    "EigenResult",
    "OccurrenceBin",
    "MultistartOutcome",
    "UnsupportedOrderError",
    "LineSearchStallError",
    "cayley_step",
    "step_length",
    "curvilinear_search",
    "bb_initial_step",
    "solve",
    "multistart",
    "power_method_baseline",
]

# Gradient norms at or below this (relative) floor are treated as zero:
# the iterate is already an eigenvector to working precision.
_ZERO_GRAD_FLOOR = 1e-13

# Lower clamp for the Barzilai-Borwein trial step.
_BB_FLOOR = 1e-10

_EIGENVALUE_BIN_TOL = 1e-6


class UnsupportedOrderError(ValueError):
    """The solver requires an even tensor order."""


class LineSearchStallError(RuntimeError):
    """Backtracking exhausted without sufficient decrease (rounding floor)."""


class Extreme(Enum):
    MIN = "min"
    MAX = "max"


class Termination(Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    LINESEARCH_STALL = "linesearch_stall"
    ZERO_GRADIENT = "zero_gradient"


@dataclass(frozen=True)
class SolverOptions:
    """Parameters of the curvilinear search.

    ``tol_rel`` is the coefficient of the stopping rule
    ``|lam_{k+1} - lam_k| / max(1, |lam_k|) < tol_rel * sqrt(n)``.
    ``keep_path`` retains every iterate (for invariant audits).
    """

    eta: float = 1e-3
    beta: float = 0.5
    alpha_max: float = 1e4
    alpha_1: float = 1.0
    tol_rel: float = 1e-12
    max_iter: int = 1000
    max_backtracks: int = 60
    extreme: Extreme = Extreme.MIN
    starts: int = 1
    seed: int = 0
    keep_path: bool = False

    def __post_init__(self):
        if not 0.0 < self.eta <= 0.5:
            raise ValueError(f"eta must lie in (0, 1/2], got {self.eta}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0.0 < self.alpha_1 <= self.alpha_max:
            raise ValueError(
                f"alpha_1 must lie in (0, alpha_max], got {self.alpha_1} "
                f"with alpha_max {self.alpha_max}"
            )
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be nonnegative")
        if self.starts < 1:
            raise ValueError("starts must be at least 1")
        if self.tol_rel <= 0.0:
            raise ValueError("tol_rel must be positive")


@dataclass(frozen=True)
class IterationRecord:
    """One trace row.

    ``alpha_k`` is the accepted step size leaving iterate ``k`` (0.0 on the
    terminal row) and ``backtracks`` counts rejected trials in that search.
    """

    k: int
    lambda_k: float
    grad_norm: float
    alpha_k: float
    backtracks: int


@dataclass
class EigenResult:
    """Outcome of one solver run."""

    eigenvalue: float
    x: np.ndarray
    residual: float
    iterations: int
    termination: Termination
    trace: list[IterationRecord] = field(default_factory=list)
    path: list[np.ndarray] | None = None


@dataclass(frozen=True)
class OccurrenceBin:
    """Distinct eigenvalue found by a multistart run, with its frequency."""

    eigenvalue: float
    count: int
    share: float


@dataclass
class MultistartOutcome:
    """All per-start results plus a summary of distinct eigenvalues."""

    results: list[EigenResult]
    failures: list[tuple[int, str]]
    best: EigenResult | None
    bins: list[OccurrenceBin]


def _sign(extreme: Extreme) -> float:
    return -1.0 if extreme is Extreme.MIN else 1.0


def cayley_step(x: np.ndarray, p: np.ndarray, alpha: float,
                extreme: Extreme) -> np.ndarray:
    """Move along the sphere-preserving Cayley curve.

    For the MIN variant ``x+ = ((1 - a) x - 2 alpha p) / (1 + a)`` with
    ``a = alpha^2 ||p||^2``; the MAX variant flips the sign of the ``p``
    term.  For a unit ``x`` and tangent ``p`` the result has unit norm in
    exact arithmetic; drift beyond 1e-14 is renormalised away.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    t = alpha * float(np.linalg.norm(p))
    u = t * t
    # (1 - u) / (1 + u) rewritten so huge alpha*||p|| degrades to the
    # antipode instead of overflowing to nan.
    cx = 2.0 / (1.0 + u) - 1.0
    cp = 2.0 * alpha / (1.0 + u)
    out = cx * x + _sign(extreme) * cp * p
    nrm = float(np.linalg.norm(out))
    if abs(nrm - 1.0) > 1e-14 and nrm > 0.0:
        out = out / nrm
    return out


def step_length(x: np.ndarray, p: np.ndarray, alpha: float) -> float:
    """Distance ``||cayley_step(x, p, alpha) - x||``, in closed form.

    Equals ``2 t / sqrt(1 + t^2)`` with ``t = alpha * ||p||``; the same for
    both extreme variants.  ``x`` only fixes the geometry and does not enter
    the value.
    """
    del x
    t = alpha * float(np.linalg.norm(np.asarray(p, dtype=float)))
    return 2.0 * t / math.hypot(1.0, t)


def bb_initial_step(dx: np.ndarray, dp: np.ndarray, alpha_max: float,
                    fallback: float | None = None) -> float:
    """Geometric-mean Barzilai-Borwein trial step ``||dx|| / ||dp||``.

    Clamped to ``[1e-10, alpha_max]``.  A zero gradient difference carries
    the previous trial step forward via ``fallback`` (``alpha_max`` if no
    fallback is supplied).
    """
    ndp = float(np.linalg.norm(np.asarray(dp, dtype=float)))
    if ndp == 0.0:
        return fallback if fallback is not None else alpha_max
    ratio = float(np.linalg.norm(np.asarray(dx, dtype=float))) / ndp
    return min(max(ratio, _BB_FLOOR), alpha_max)


def _trial_value(spec: HankelSpec, cache: SpectralCache, kind: ReferenceTensor,
                 x: np.ndarray) -> float:
    return hankel_xm(cache, spec, x) / b_xm(kind, spec.m, x)


def curvilinear_search(spec: HankelSpec, cache: SpectralCache,
                       kind: ReferenceTensor, x_k: np.ndarray,
                       eval_k: ObjectiveEval, alpha_bar: float,
                       opts: SolverOptions
                       ) -> tuple[float, np.ndarray, ObjectiveEval, int]:
    """Backtrack along the Cayley curve until sufficient decrease holds.

    Tries ``alpha = beta^j * alpha_bar`` for ``j = 0, 1, ...`` and accepts
    the first trial with ``f(x+) <= f(x_k) - eta * alpha * ||g||^2`` (MIN;
    the mirrored inequality for MAX).  Returns ``(alpha, x+, eval+, j)``.

    Raises :class:`LineSearchStallError` after ``max_backtracks`` rejected
    trials; that signals the decrease has fallen below rounding resolution.
    """
    if not 0.0 < alpha_bar <= opts.alpha_max:
        raise ValueError(f"alpha_bar must lie in (0, alpha_max], got {alpha_bar}")
    sgn = _sign(opts.extreme)
    f_k = eval_k.f
    gnorm2 = float(eval_k.g @ eval_k.g)
    for j in range(opts.max_backtracks + 1):
        alpha = alpha_bar * opts.beta ** j
        x_trial = cayley_step(x_k, eval_k.g, alpha, opts.extreme)
        f_trial = _trial_value(spec, cache, kind, x_trial)
        # Strict inequality keeps the trace strictly monotone even when the
        # required decrease rounds to nothing.
        if sgn * (f_trial - f_k) >= opts.eta * alpha * gnorm2 and f_trial != f_k:
            return alpha, x_trial, evaluate(spec, cache, kind, x_trial), j
    raise LineSearchStallError(
        f"no sufficient decrease within {opts.max_backtracks} backtracks"
    )


def _draw_start(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        x = rng.standard_normal(n)
        nrm = float(np.linalg.norm(x))
        if nrm > 0.0:
            return x / nrm


def solve(spec: HankelSpec, kind: ReferenceTensor, opts: SolverOptions,
          x_1: np.ndarray | None = None) -> EigenResult:
    """Run the curvilinear search from one starting point.

    ``x_1`` defaults to a normalised Gaussian draw from ``opts.seed``.  The
    trace holds one row per visited iterate; the eigenvalue column is
    strictly monotone in the direction of ``opts.extreme``.
    """
    if spec.m % 2 != 0:
        raise UnsupportedOrderError(
            f"the spherical quotient needs an even order, got m = {spec.m}"
        )
    cache = make_cache(spec)
    if x_1 is None:
        x = _draw_start(np.random.default_rng(opts.seed), spec.n)
    else:
        x = np.asarray(x_1, dtype=float).reshape(-1)
        if x.size != spec.n:
            raise ValueError(f"x_1 must have length n = {spec.n}, got {x.size}")
        nrm = float(np.linalg.norm(x))
        if nrm == 0.0:
            raise ValueError("x_1 must be nonzero")
        x = x / nrm

    ev = evaluate(spec, cache, kind, x)
    alpha_bar = opts.alpha_1
    tol = opts.tol_rel * math.sqrt(spec.n)
    trace: list[IterationRecord] = []
    path: list[np.ndarray] | None = [x.copy()] if opts.keep_path else None
    termination = Termination.MAX_ITER
    k = 1
    while True:
        gnorm = float(np.linalg.norm(ev.g))
        if gnorm <= _ZERO_GRAD_FLOOR * max(1.0, abs(ev.f)):
            termination = Termination.ZERO_GRADIENT
            break
        if k > opts.max_iter:
            termination = Termination.MAX_ITER
            break
        try:
            alpha_k, x_new, ev_new, backtracks = curvilinear_search(
                spec, cache, kind, x, ev, alpha_bar, opts)
        except LineSearchStallError:
            termination = Termination.LINESEARCH_STALL
            break
        trace.append(IterationRecord(k=k, lambda_k=ev.f, grad_norm=gnorm,
                                     alpha_k=alpha_k, backtracks=backtracks))
        if path is not None:
            path.append(x_new.copy())
        rel_change = abs(ev_new.f - ev.f) / max(1.0, abs(ev.f))
        alpha_bar = bb_initial_step(x_new - x, ev_new.g - ev.g,
                                    opts.alpha_max, fallback=alpha_bar)
        x, ev = x_new, ev_new
        k += 1
        if rel_change < tol:
            termination = Termination.CONVERGED
            break

    trace.append(IterationRecord(k=k, lambda_k=ev.f,
                                 grad_norm=float(np.linalg.norm(ev.g)),
                                 alpha_k=0.0, backtracks=0))
    return EigenResult(
        eigenvalue=ev.f,
        x=x,
        residual=residual(spec, cache, kind, x, ev.f),
        iterations=k - 1,
        termination=termination,
        trace=trace,
        path=path,
    )


def _bin_eigenvalues(values: list[float],
                     tol: float = _EIGENVALUE_BIN_TOL) -> list[OccurrenceBin]:
    if not values:
        return []
    ordered = sorted(values)
    groups: list[list[float]] = [[ordered[0]]]
    for lam in ordered[1:]:
        if lam - groups[-1][-1] <= tol:
            groups[-1].append(lam)
        else:
            groups.append([lam])
    total = len(values)
    return [OccurrenceBin(eigenvalue=float(np.median(g)), count=len(g),
                          share=len(g) / total)
            for g in groups]


def multistart(spec: HankelSpec, kind: ReferenceTensor, opts: SolverOptions,
               workers: int = 1) -> MultistartOutcome:
    """Run ``opts.starts`` independent solves from seeds ``seed + i``.

    Per-start failures are collected instead of aborting the sweep.  With
    ``workers > 1`` the starts run on a thread pool; results are merged in
    start order, so the outcome is identical to a serial run.
    """
    def one(i: int) -> EigenResult:
        return solve(spec, kind, replace(opts, seed=opts.seed + i, starts=1))

    indexed: list[tuple[int, EigenResult | None, str | None]] = []
    if workers > 1 and opts.starts > 1:
        def guarded(i: int):
            try:
                return i, one(i), None
            except Exception as exc:  # noqa: BLE001 - reported per start
                return i, None, f"{type(exc).__name__}: {exc}"

        with ThreadPoolExecutor(max_workers=min(workers, opts.starts)) as pool:
            indexed = list(pool.map(guarded, range(opts.starts)))
    else:
        for i in range(opts.starts):
            try:
                indexed.append((i, one(i), None))
            except Exception as exc:  # noqa: BLE001 - reported per start
                indexed.append((i, None, f"{type(exc).__name__}: {exc}"))

    results = [r for _, r, _ in indexed if r is not None]
    failures = [(i, msg) for i, _, msg in indexed if msg is not None]
    best: EigenResult | None = None
    if results:
        pick = min if opts.extreme is Extreme.MIN else max
        best = pick(results, key=lambda r: r.eigenvalue)
    bins = _bin_eigenvalues([r.eigenvalue for r in results])
    return MultistartOutcome(results=results, failures=failures, best=best,
                             bins=bins)


def _power_iteration(spec: HankelSpec, cache: SpectralCache, kind: BTensorKind,
                     opts: SolverOptions, x: np.ndarray) -> EigenResult:
    sgn = _sign(opts.extreme)
    ev = evaluate(spec, cache, kind, x)
    # The shift must dominate |lambda| so the fixed-point multiplier stays
    # positive; it doubles whenever a step breaks monotonicity.
    shift = abs(ev.f) + 1.0
    tol = opts.tol_rel * math.sqrt(spec.n)
    root = 1.0 / (spec.m - 1)
    trace: list[IterationRecord] = []
    termination = Termination.MAX_ITER
    k = 1
    while k <= opts.max_iter:
        gnorm = float(np.linalg.norm(ev.g))
        if gnorm <= _ZERO_GRAD_FLOOR * max(1.0, abs(ev.f)):
            termination = Termination.ZERO_GRADIENT
            break
        repairs = 0
        stalled = False
        while True:
            u = sgn * ev.hxm1 + shift * ev.bxm1
            if kind is BTensorKind.Z_IDENTITY:
                t = u
            else:
                t = np.sign(u) * np.abs(u) ** root
            nt = float(np.linalg.norm(t))
            if nt > 0.0:
                x_new = t / nt
                ev_new = evaluate(spec, cache, kind, x_new)
                if sgn * (ev_new.f - ev.f) >= -1e-14 * max(1.0, abs(ev.f)):
                    break
            repairs += 1
            if repairs > opts.max_backtracks:
                stalled = True
                break
            shift *= 2.0
        if stalled:
            termination = Termination.LINESEARCH_STALL
            break
        trace.append(IterationRecord(k=k, lambda_k=ev.f, grad_norm=gnorm,
                                     alpha_k=shift, backtracks=repairs))
        rel_change = abs(ev_new.f - ev.f) / max(1.0, abs(ev.f))
        x, ev = x_new, ev_new
        shift = max(shift, abs(ev.f) + 1.0)
        k += 1
        if rel_change < tol:
            termination = Termination.CONVERGED
            break

    trace.append(IterationRecord(k=k, lambda_k=ev.f,
                                 grad_norm=float(np.linalg.norm(ev.g)),
                                 alpha_k=0.0, backtracks=0))
    return EigenResult(
        eigenvalue=ev.f,
        x=x,
        residual=residual(spec, cache, kind, x, ev.f),
        iterations=k - 1,
        termination=termination,
        trace=trace,
    )


def power_method_baseline(spec: HankelSpec, kind: BTensorKind,
                          opts: SolverOptions) -> EigenResult:
    """Shifted power iteration over the same FFT products, best of all starts.

    The fixed-point map is ``x+ = normalize(s(H x^{m-1}) + shift * B x^{m-1})``
    (taken through the entrywise ``(m-1)``-th root for the diagonal reference
    tensor), with ``s`` the extreme's sign.  The shift adapts by doubling
    whenever the objective fails to move monotonically, so no Hessian is
    needed.  In the trace, ``alpha_k`` holds the shift and ``backtracks`` the
    number of shift doublings.  Intended only as a cross-check for the
    curvilinear search.
    """
    if spec.m % 2 != 0:
        raise UnsupportedOrderError(
            f"the spherical quotient needs an even order, got m = {spec.m}"
        )
    if not isinstance(kind, BTensorKind):
        raise TypeError(
            "the power iteration needs to invert the reference tensor's "
            "action and supports only the shipped kinds"
        )
    cache = make_cache(spec)
    best: EigenResult | None = None
    sgn = _sign(opts.extreme)
    for i in range(opts.starts):
        x = _draw_start(np.random.default_rng(opts.seed + i), spec.n)
        res = _power_iteration(spec, cache, kind, opts, x)
        if best is None or sgn * (res.eigenvalue - best.eigenvalue) > 0.0:
            best = res
    assert best is not None
    return best
