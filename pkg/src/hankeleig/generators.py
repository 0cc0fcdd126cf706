"""Benchmark Hankel tensor families and their reference values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fft_products import HankelSpec

__all__ = [
    "Family",
    "FamilySpec",
    "generate",
    "vandermonde_reference",
    "hilbert_bounds",
]


class Family(Enum):
    SIN = "sin"
    PARAM_EPS = "param"
    VANDERMONDE = "vandermonde"
    HILBERT = "hilbert"
    RANDOM = "random"


@dataclass(frozen=True)
class FamilySpec:
    """Parameters selecting one member of a benchmark family.

    ``epsilon`` applies to PARAM_EPS only (a fourth order, four dimensional
    family with a fixed 13-entry generating vector); ``seed`` applies to
    RANDOM only.
    """

    family: Family
    m: int
    n: int
    epsilon: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.family is Family.PARAM_EPS:
            if (self.m, self.n) != (4, 4):
                raise ValueError(
                    "the parameterized family is fixed at m=4, n=4, got "
                    f"m={self.m}, n={self.n}"
                )
            if self.epsilon is None:
                raise ValueError("the parameterized family needs epsilon")
        else:
            if self.m < 2 or self.n < 1:
                raise ValueError(f"need m >= 2 and n >= 1, got m={self.m}, n={self.n}")
            if self.epsilon is not None:
                raise ValueError(f"epsilon only applies to {Family.PARAM_EPS}")
        if self.family is Family.VANDERMONDE and self.n < 2:
            raise ValueError("the Vandermonde family needs n >= 2")
        if self.family is Family.RANDOM:
            if self.seed is None:
                raise ValueError("the random family needs a seed")
        elif self.seed is not None:
            raise ValueError(f"seed only applies to {Family.RANDOM}")


def generate(fs: FamilySpec) -> HankelSpec:
    """Build the generating vector for a family member."""
    ell = fs.m * (fs.n - 1) + 1
    if fs.family is Family.SIN:
        v = np.sin(fs.m + np.arange(ell, dtype=float))
    elif fs.family is Family.PARAM_EPS:
        head = 8.0 - fs.epsilon
        v = np.array([head, 0, 2, 0, 1, 0, 1, 0, 1, 0, 2, 0, head])
    elif fs.family is Family.VANDERMONDE:
        alpha = fs.n / (fs.n - 1)
        beta = (1 - fs.n) / fs.n
        k = np.arange(ell, dtype=float)
        # |beta| < 1, so the second term underflows harmlessly for large k.
        v = alpha ** k + beta ** k
    elif fs.family is Family.HILBERT:
        v = 1.0 / np.arange(1, ell + 1, dtype=float)
    else:
        v = np.random.default_rng(fs.seed).standard_normal(ell)
    return HankelSpec(m=fs.m, n=fs.n, v=v)


def vandermonde_reference(m: int, n: int) -> float:
    """Largest Z-eigenvalue of the Vandermonde family member, in closed form.

    For even ``n`` the two generating Vandermonde vectors are orthogonal and
    the maximum of the quotient objective is attained at the dominant one,
    ``u1 = (1, a, ..., a^{n-1})`` with ``a = n/(n-1)``, giving ``||u1||^m``.
    """
    if n % 2 != 0:
        raise ValueError(f"the closed form needs an even dimension, got n = {n}")
    if m % 2 != 0:
        raise ValueError(f"the closed form needs an even order, got m = {m}")
    alpha = n / (n - 1)
    u1_sq = math.fsum(alpha ** (2 * k) for k in range(n))
    return u1_sq ** (m // 2)


def hilbert_bounds(m: int, n: int) -> tuple[float, float]:
    """Upper bounds for the largest Z- and H-eigenvalues of a Hilbert tensor.

    Returns ``(n^{m/2} * sin(pi/n), n^{m-1} * sin(pi/n))``.
    """
    if m % 2 != 0:
        raise ValueError(f"the bounds hold for even order, got m = {m}")
    s = math.sin(math.pi / n)
    return float(n) ** (m // 2) * s, float(n) ** (m - 1) * s
