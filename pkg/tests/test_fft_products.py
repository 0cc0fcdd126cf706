import time

import numpy as np
import pytest

from hankeleig.dense_oracle import dense_xm, dense_xm1, materialize
from hankeleig.fft_products import (
    HankelSpec,
    NumericalConsistencyError,
    SpectralCache,
    _xm1_with_residue,
    _xm_with_residue,
    hankel_xm,
    hankel_xm1,
    make_cache,
)


def test_spec_validation():
    with pytest.raises(ValueError, match="m\\*\\(n-1\\)\\+1 = 13"):
        HankelSpec(m=4, n=4, v=np.zeros(12))
    with pytest.raises(ValueError):
        HankelSpec(m=1, n=3, v=np.zeros(3))
    with pytest.raises(ValueError):
        HankelSpec(m=2, n=0, v=np.zeros(1))
    spec = HankelSpec(m=3, n=2, v=[0.0, 1.0, 2.0, 3.0])
    assert spec.ell == 4
    assert spec.v.dtype == np.float64


def test_cache_trivial_length_one():
    spec = HankelSpec(m=2, n=1, v=[5.0])
    cache = make_cache(spec)
    assert cache.ell == 1
    assert np.allclose(cache.d, [5.0])


def test_cache_matches_explicit_three_point_dft():
    spec = HankelSpec(m=2, n=2, v=[1.0, 2.0, 3.0])
    cache = make_cache(spec)
    # independent oracle: the inverse DFT written out entry by entry
    expected = np.array([
        sum(spec.v[j] * np.exp(2j * np.pi * j * k / 3) for j in range(3)) / 3
        for k in range(3)
    ])
    assert np.allclose(cache.d, expected, atol=1e-15)
    assert np.allclose(cache.d.real, [2.0, -0.5, -0.5])
    assert cache.d[1].imag == pytest.approx(-cache.d[2].imag)


@pytest.mark.parametrize("m,n", [(2, 2), (3, 4), (4, 5), (2, 1300), (4, 700)])
def test_cache_round_trips_generating_vector(m, n):
    rng = np.random.default_rng(m * 100 + n)
    spec = HankelSpec(m=m, n=n, v=rng.standard_normal(m * (n - 1) + 1))
    cache = make_cache(spec)
    # numpy's FFT is the independent reference transform here
    back = np.fft.fft(cache.d)
    assert np.max(np.abs(back - spec.v)) <= 1e-12 * max(1.0, np.max(np.abs(spec.v)))


def test_xm_reads_off_corner_entry():
    spec = HankelSpec(m=2, n=2, v=[1.0, 2.0, 3.0])
    cache = make_cache(spec)
    assert hankel_xm(cache, spec, [1.0, 0.0]) == pytest.approx(1.0, abs=1e-12)


def test_xm_small_enumeration_case():
    # sum over {1,2}^3 of v[i+j+k-3] = v0 + 3 v1 + 3 v2 + v3 = 12
    spec = HankelSpec(m=3, n=2, v=[0.0, 1.0, 2.0, 3.0])
    cache = make_cache(spec)
    assert hankel_xm(cache, spec, [1.0, 1.0]) == pytest.approx(12.0, rel=1e-12)
    assert np.allclose(hankel_xm1(cache, spec, [1.0, 1.0]), [4.0, 8.0], rtol=1e-12)


def test_xm1_matrix_row_and_first_basis_vector():
    spec = HankelSpec(m=2, n=2, v=[1.0, 2.0, 3.0])
    cache = make_cache(spec)
    assert np.allclose(hankel_xm1(cache, spec, [0.0, 1.0]), [2.0, 3.0])

    rng = np.random.default_rng(0)
    for m, n in [(2, 4), (3, 5), (4, 3), (5, 6)]:
        spec = HankelSpec(m=m, n=n, v=rng.standard_normal(m * (n - 1) + 1))
        cache = make_cache(spec)
        e1 = np.zeros(n)
        e1[0] = 1.0
        assert np.allclose(hankel_xm1(cache, spec, e1), spec.v[:n], atol=1e-12)


def test_matches_dense_oracle_on_grid():
    rng = np.random.default_rng(7)
    for m in range(2, 7):
        for n in range(1, 9):
            for _ in range(3):
                spec = HankelSpec(m=m, n=n, v=rng.standard_normal(m * (n - 1) + 1))
                cache = make_cache(spec)
                x = rng.standard_normal(n)
                dense = materialize(spec)
                ref = dense_xm(dense, x)
                assert abs(hankel_xm(cache, spec, x) - ref) <= 1e-10 * (1 + abs(ref))
                ref1 = dense_xm1(dense, x)
                err = np.abs(hankel_xm1(cache, spec, x) - ref1)
                assert np.all(err <= 1e-10 * (1 + np.abs(ref1)))


def test_chirp_z_path_matches_dense_oracle():
    # order two keeps n^m under the oracle cap while ell crosses the
    # Bluestein threshold, so the smooth-cost path gets a dense cross-check
    rng = np.random.default_rng(19)
    for n in (1300, 2500):
        spec = HankelSpec(m=2, n=n, v=rng.standard_normal(2 * n - 1))
        cache = make_cache(spec)
        assert cache.plan is not None
        x = rng.standard_normal(n)
        dense = materialize(spec)
        ref = dense_xm(dense, x)
        assert abs(hankel_xm(cache, spec, x) - ref) <= 1e-10 * (1 + abs(ref))
        ref1 = dense_xm1(dense, x)
        err = np.abs(hankel_xm1(cache, spec, x) - ref1)
        assert np.all(err <= 1e-10 * (1 + np.abs(ref1)))


def test_contraction_identity():
    rng = np.random.default_rng(3)
    for m, n in [(2, 6), (4, 9), (6, 5), (3, 8)]:
        spec = HankelSpec(m=m, n=n, v=rng.standard_normal(m * (n - 1) + 1))
        cache = make_cache(spec)
        for _ in range(20):
            x = rng.standard_normal(n)
            scalar = hankel_xm(cache, spec, x)
            dotted = float(x @ hankel_xm1(cache, spec, x))
            assert abs(scalar - dotted) <= 1e-12 * max(1.0, abs(scalar))


@pytest.mark.parametrize("c", [-2.0, 0.5])
def test_homogeneity(c):
    rng = np.random.default_rng(11)
    for m, n in [(2, 5), (3, 4), (4, 6), (5, 3), (6, 4)]:
        spec = HankelSpec(m=m, n=n, v=rng.standard_normal(m * (n - 1) + 1))
        cache = make_cache(spec)
        x = rng.standard_normal(n)
        base = hankel_xm(cache, spec, x)
        scaled = hankel_xm(cache, spec, c * x)
        assert abs(scaled - c ** m * base) <= 1e-10 * max(1.0, abs(c ** m * base))


def test_imaginary_residue_stays_small():
    rng = np.random.default_rng(5)
    cases = [(m, n) for m in range(2, 7) for n in (1, 4, 8)]
    cases += [(4, 1000), (2, 3000)]  # exercises the chirp-z path as well
    worst = 0.0
    for m, n in cases:
        spec = HankelSpec(m=m, n=n, v=rng.standard_normal(m * (n - 1) + 1))
        cache = make_cache(spec)
        x = rng.standard_normal(n)
        worst = max(worst, _xm_with_residue(cache, spec, x)[1])
        worst = max(worst, _xm1_with_residue(cache, spec, x)[1])
    assert worst <= 1e-10


def test_chirp_z_plan_agrees_with_library_fft_at_random_lengths():
    from hankeleig.fft_products import _BluesteinPlan

    rng = np.random.default_rng(27)
    lengths = [2048, 2049] + sorted(rng.integers(2050, 9000, size=6).tolist())
    for ell in lengths:
        plan = _BluesteinPlan(ell)
        y = rng.standard_normal(ell)
        ref = np.fft.fft(y)
        scale = max(1.0, float(np.max(np.abs(ref))))
        assert np.max(np.abs(plan.dft(y) - ref)) <= 1e-11 * scale, ell


def test_corrupted_cache_is_caught():
    spec = HankelSpec(m=4, n=5, v=np.arange(17.0))
    good = make_cache(spec)
    bad = SpectralCache(
        d=good.d + 1j * np.linspace(0.0, 1.0, spec.ell), ell=good.ell)
    x = np.ones(5)
    with pytest.raises(NumericalConsistencyError):
        hankel_xm(bad, spec, x)
    with pytest.raises(NumericalConsistencyError):
        hankel_xm1(bad, spec, x)


def test_x_length_checked():
    spec = HankelSpec(m=3, n=2, v=np.zeros(4))
    cache = make_cache(spec)
    with pytest.raises(ValueError, match="length n = 2"):
        hankel_xm(cache, spec, [1.0, 2.0, 3.0])


def test_product_time_scales_like_n_log_n():
    # doubling the dimension must cost at most 3x (median of 20, measured
    # interleaved so both sizes see the same machine noise)
    m = 4
    rng = np.random.default_rng(9)
    setups = []
    for n in (2 ** 14, 2 ** 15):
        spec = HankelSpec(m=m, n=n, v=rng.standard_normal(m * (n - 1) + 1))
        cache = make_cache(spec)
        x = rng.standard_normal(n)
        hankel_xm1(cache, spec, x)
        setups.append((spec, cache, x))
    samples = [[], []]
    for _ in range(20):
        for slot, (spec, cache, x) in enumerate(setups):
            tic = time.perf_counter()
            hankel_xm1(cache, spec, x)
            samples[slot].append(time.perf_counter() - tic)
    small, big = (float(np.median(s)) for s in samples)
    assert big <= 3.0 * small, f"time at 2n = {big:.4f}s vs {small:.4f}s at n"
