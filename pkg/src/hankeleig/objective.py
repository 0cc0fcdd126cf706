"""Spherical eigenvalue objective: quotient value, gradient, and residual.

For a Hankel tensor ``H`` and a positive definite reference tensor ``B``
the objective on the unit sphere is ``f(x) = H x^m / B x^m``.  Its critical
points are generalized eigenvectors and the value of ``f`` there is the
eigenvalue.  Two reference tensors ship: the identity mapping onto
Z-eigenpairs (``B x^{m-1} = ||x||^{m-2} x``) and the diagonal identity
mapping onto H-eigenpairs (``(B x^{m-1})_i = x_i^{m-1}``).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .fft_products import HankelSpec, SpectralCache, hankel_xm, hankel_xm1

__all__ = [
    "BTensorKind",
    "ReferenceProducts",
    "ObjectiveEval",
    "InvalidReferenceTensorError",
    "b_xm",
    "b_xm1",
    "b_xm2",
    "evaluate",
    "residual",
]

_UNIT_TOL = 1e-8


class InvalidReferenceTensorError(ValueError):
    """Raised when ``B x^m <= 0``; the quotient objective is then undefined."""


class BTensorKind(Enum):
    """Reference tensor in the generalized eigenproblem ``Hx^{m-1} = lam*Bx^{m-1}``."""

    Z_IDENTITY = "z"
    H_IDENTITY = "h"


@dataclass(frozen=True)
class ReferenceProducts:
    """Extension point: a custom positive definite reference tensor.

    Supply the two products as callables of ``(m, x)``.  Any such pair can
    be passed wherever a :class:`BTensorKind` is accepted by the objective
    and the curvilinear solver.  The caller is responsible for positive
    definiteness (even order); ``B x^m <= 0`` is still caught at evaluation
    time.
    """

    xm: Callable[[int, np.ndarray], float]
    xm1: Callable[[int, np.ndarray], np.ndarray]


ReferenceTensor = BTensorKind | ReferenceProducts


@dataclass(frozen=True)
class ObjectiveEval:
    """One objective evaluation: value, gradient, and the four raw products."""

    f: float
    g: np.ndarray
    hxm: float
    bxm: float
    hxm1: np.ndarray
    bxm1: np.ndarray


def b_xm(kind: ReferenceTensor, m: int, x: np.ndarray) -> float:
    """Scalar product ``B x^m`` for the chosen reference tensor."""
    x = np.asarray(x, dtype=float)
    if isinstance(kind, ReferenceProducts):
        return float(kind.xm(m, x))
    if kind is BTensorKind.Z_IDENTITY:
        return float(np.linalg.norm(x)) ** m
    return float(np.sum(x ** m))


def b_xm1(kind: ReferenceTensor, m: int, x: np.ndarray) -> np.ndarray:
    """Vector product ``B x^{m-1}``."""
    x = np.asarray(x, dtype=float)
    if isinstance(kind, ReferenceProducts):
        return np.asarray(kind.xm1(m, x), dtype=float)
    if kind is BTensorKind.Z_IDENTITY:
        # ||x||^0 == 1 covers m == 2 even at the x == 0 boundary.
        return float(np.linalg.norm(x)) ** (m - 2) * x
    return x ** (m - 1)


def b_xm2(kind: BTensorKind, m: int, x: np.ndarray) -> np.ndarray:
    """Matrix product ``B x^{m-2}``, i.e. the second gradient of ``B x^m``
    divided by ``m*(m-1)``.  Used by the dense Hessian.

    Only the two shipped reference tensors carry this product; the
    :class:`ReferenceProducts` extension point does not.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if isinstance(kind, ReferenceProducts):
        raise TypeError(
            "custom reference tensors supply only the xm and xm1 products"
        )
    if kind is BTensorKind.Z_IDENTITY:
        if m == 2:
            return np.eye(n)
        nrm = float(np.linalg.norm(x))
        return ((m - 2) * nrm ** (m - 4) * np.outer(x, x)
                + nrm ** (m - 2) * np.eye(n)) / (m - 1)
    return np.diag(x ** (m - 2))


def _require_unit(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    nrm = float(np.linalg.norm(x))
    if abs(nrm - 1.0) > _UNIT_TOL:
        raise ValueError(f"expected a unit vector, got norm {nrm!r}")
    return x


def evaluate(spec: HankelSpec, cache: SpectralCache, kind: ReferenceTensor,
             x: np.ndarray) -> ObjectiveEval:
    """Evaluate ``f`` and its gradient at a unit vector.

    The gradient ``g = (m / Bx^m) * (Hx^{m-1} - f * Bx^{m-1})`` lies in the
    tangent plane of the sphere at ``x`` (``x @ g == 0`` up to roundoff),
    because ``f`` is homogeneous of degree zero.  One call to each FFT
    product.
    """
    x = _require_unit(x)
    hxm1 = hankel_xm1(cache, spec, x)
    hxm = hankel_xm(cache, spec, x)
    bxm = b_xm(kind, spec.m, x)
    if bxm <= 0.0:
        raise InvalidReferenceTensorError(
            f"B x^m = {bxm!r} is not positive; the reference tensor is not "
            "positive definite at this point (odd order?)"
        )
    bxm1 = b_xm1(kind, spec.m, x)
    f = hxm / bxm
    g = (spec.m / bxm) * (hxm1 - f * bxm1)
    # The formula is tangent in exact arithmetic; subtracting the normal
    # component removes roundoff that would otherwise dwarf the gradient
    # once the iterate approaches an eigenvector.
    g = g - (x @ g) * x
    return ObjectiveEval(f=f, g=g, hxm=hxm, bxm=bxm, hxm1=hxm1, bxm1=bxm1)


def residual(spec: HankelSpec, cache: SpectralCache, kind: ReferenceTensor,
             x: np.ndarray, lam: float) -> float:
    """Eigenpair residual ``||H x^{m-1} - lam * B x^{m-1}||`` at a unit vector.

    When ``lam == f(x)`` this equals ``B x^m / m`` times the norm of the
    quotient-gradient formula (as reconstructible from an
    :class:`ObjectiveEval`'s product fields), so a small gradient certifies
    a small residual.
    """
    x = _require_unit(x)
    hxm1 = hankel_xm1(cache, spec, x)
    bxm1 = b_xm1(kind, spec.m, x)
    return float(np.linalg.norm(hxm1 - lam * bxm1))
