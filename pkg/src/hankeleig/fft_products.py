"""Fast products of a Hankel tensor with a vector.

An order-``m``, dimension-``n`` Hankel tensor is fully described by its
generating vector ``v`` of length ``ell = m*(n-1) + 1``: the entry at a
(zero-based) multi-index ``(i1, ..., im)`` is ``v[i1 + ... + im]``.  Such a
tensor is the leading block of an anti-circulant tensor of dimension
``ell``, which is diagonalised by the discrete Fourier transform.  This
makes the scalar contraction ``H x^m`` and the vector contraction
``H x^{m-1}`` computable in O(m*n*log(m*n)) time from ``v`` alone, with no
dense storage.

DFT convention: forward transforms are unnormalised and inverse transforms
carry the ``1/ell`` factor (the numpy/scipy default pairing).  Under this
convention the spectral diagonal is ``d = idft(v)``.

The embedding length ``ell`` is whatever ``m*(n-1)+1`` happens to be, so a
direct FFT would inherit the luck of its prime factorisation.  For
``ell >= _BLUESTEIN_MIN`` the transforms instead use Bluestein's chirp-z
algorithm over a power-of-two internal convolution: still the exact
length-``ell`` DFT (the anti-circulant algebra is untouched), but with a
running time that is a smooth function of ``ell``.  Chirp phases are
derived from ``k^2 mod 2*ell`` computed in integer arithmetic, which keeps
them accurate at any size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

__all__ = [
    "HankelSpec",
    "SpectralCache",
    "NumericalConsistencyError",
    "make_cache",
    "hankel_xm",
    "hankel_xm1",
]

# Below this length a direct FFT is overhead-dominated anyway; above it the
# size-oblivious Bluestein path keeps the cost profile smooth in ell.
_BLUESTEIN_MIN = 2048

# A product whose imaginary residue exceeds this (relative) bound indicates
# a mis-sized embedding or corrupted cache rather than ordinary roundoff.
_RESIDUE_LIMIT = 1e-8


class NumericalConsistencyError(ArithmeticError):
    """Raised when a mathematically real result has a large imaginary part."""


@dataclass(frozen=True)
class HankelSpec:
    """Compact description of a Hankel tensor.

    Parameters
    ----------
    m : int
        Tensor order, at least 2.
    n : int
        Dimension, at least 1.
    v : array_like
        Generating vector of length ``m*(n-1) + 1``.
    """

    m: int
    n: int
    v: np.ndarray

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"tensor order m must be an integer >= 2, got {self.m}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        v = np.array(self.v, dtype=float, copy=True).reshape(-1)
        if v.size != self.ell:
            raise ValueError(
                f"generating vector must have length m*(n-1)+1 = {self.ell}, "
                f"got {v.size}"
            )
        v.flags.writeable = False
        object.__setattr__(self, "v", v)

    @property
    def ell(self) -> int:
        """Length of the generating vector (the anti-circulant dimension)."""
        return self.m * (self.n - 1) + 1


class _BluesteinPlan:
    """Exact length-``ell`` DFT as a chirp-modulated power-of-two convolution."""

    def __init__(self, ell: int):
        self.ell = ell
        self.pad = 1 << (2 * ell - 1).bit_length()
        # k^2 mod 2*ell stays exact in int64 for any ell this library meets,
        # so the chirp phase never loses precision to a huge argument.
        k2 = (np.arange(ell, dtype=np.int64) ** 2) % (2 * ell)
        self.chirp = np.exp((-1j * np.pi / ell) * k2)
        kernel = np.zeros(self.pad, dtype=complex)
        kernel[:ell] = np.conj(self.chirp)
        kernel[self.pad - ell + 1:] = np.conj(self.chirp[1:][::-1])
        self.kernel_dft = _fft.fft(kernel)
        self.chirp.flags.writeable = False
        self.kernel_dft.flags.writeable = False

    def dft(self, x: np.ndarray) -> np.ndarray:
        # Fresh buffers per call: the plan itself stays read-only and is
        # therefore safe to share between concurrent solver runs.
        a = np.zeros(self.pad, dtype=complex)
        np.multiply(x, self.chirp, out=a[: self.ell])
        conv = _fft.ifft(_fft.fft(a, overwrite_x=True) * self.kernel_dft,
                         overwrite_x=True)
        out = conv[: self.ell]
        out *= self.chirp
        return out


def _dft(x: np.ndarray, plan: _BluesteinPlan | None) -> np.ndarray:
    if plan is None:
        return _fft.fft(x)
    return plan.dft(x)


def _idft(x: np.ndarray, ell: int, plan: _BluesteinPlan | None) -> np.ndarray:
    if plan is None:
        return _fft.ifft(x)
    return np.conj(plan.dft(np.conj(x))) / ell


@dataclass(frozen=True)
class SpectralCache:
    """Reusable spectral data for one Hankel tensor.

    ``d`` is the inverse DFT of the generating vector (the diagonal of the
    anti-circulant tensor in Fourier space).  The cache also carries the
    transform plan for its length.  All fields are immutable after
    construction, so one cache may serve any number of concurrent product
    calls.
    """

    d: np.ndarray
    ell: int
    plan: _BluesteinPlan | None = None

    def __post_init__(self):
        self.d.flags.writeable = False


def make_cache(spec: HankelSpec) -> SpectralCache:
    """Build the spectral cache (one inverse DFT of the generating vector)."""
    plan = _BluesteinPlan(spec.ell) if spec.ell >= _BLUESTEIN_MIN else None
    d = np.asarray(_idft(spec.v.astype(complex), spec.ell, plan))
    return SpectralCache(d=d, ell=spec.ell, plan=plan)


def _embed(spec: HankelSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != spec.n:
        raise ValueError(f"x must have length n = {spec.n}, got {x.size}")
    y = np.zeros(spec.ell)
    y[: spec.n] = x
    return y


def _xm_with_residue(cache: SpectralCache, spec: HankelSpec,
                     x: np.ndarray) -> tuple[float, float]:
    y = _embed(spec, x)
    z = _dft(y, cache.plan)
    w = z.copy()
    for _ in range(spec.m - 1):
        w *= z
    total = cache.d @ w
    re = float(total.real)
    residue = abs(float(total.imag)) / max(1.0, abs(re))
    return re, residue


def _xm1_with_residue(cache: SpectralCache, spec: HankelSpec,
                      x: np.ndarray) -> tuple[np.ndarray, float]:
    y = _embed(spec, x)
    z = _dft(y, cache.plan)
    w = z.copy()
    for _ in range(spec.m - 2):
        w *= z
    full = _dft(cache.d * w, cache.plan)
    re = full.real
    residue = float(np.linalg.norm(full.imag)) / max(1.0, float(np.linalg.norm(re)))
    return re[: spec.n].copy(), residue


def hankel_xm(cache: SpectralCache, spec: HankelSpec, x: np.ndarray) -> float:
    """Scalar contraction ``H x^m`` computed in Fourier space.

    Equals the dense contraction of the materialised tensor with ``m``
    copies of ``x``.  Raises :class:`NumericalConsistencyError` if the
    imaginary residue of the (mathematically real) result exceeds
    ``1e-8 * max(1, |result|)``.
    """
    value, residue = _xm_with_residue(cache, spec, x)
    if residue > _RESIDUE_LIMIT:
        raise NumericalConsistencyError(
            f"imaginary residue {residue:.3e} exceeds {_RESIDUE_LIMIT:.0e}; "
            "the spectral embedding is inconsistent with the tensor"
        )
    return value


def hankel_xm1(cache: SpectralCache, spec: HankelSpec, x: np.ndarray) -> np.ndarray:
    """Vector contraction ``H x^{m-1}`` computed in Fourier space.

    Returns the leading ``n`` entries of the anti-circulant product; satisfies
    ``x @ hankel_xm1(...) == hankel_xm(...)``.  Raises
    :class:`NumericalConsistencyError` on an excessive imaginary residue.
    """
    vec, residue = _xm1_with_residue(cache, spec, x)
    if residue > _RESIDUE_LIMIT:
        raise NumericalConsistencyError(
            f"imaginary residue {residue:.3e} exceeds {_RESIDUE_LIMIT:.0e}; "
            "the spectral embedding is inconsistent with the tensor"
        )
    return vec
