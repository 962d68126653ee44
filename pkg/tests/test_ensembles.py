"""Tests for random-matrix sampling, unfolding, and seed discipline."""

import numpy as np
import pytest

from rmtdeco.ensembles import (BASE_STREAM, RandomSeed, Spectrum, derive_root,
                               explicit_spectrum, heisenberg_time,
                               rng_from_seed, sample_coupling, sample_goe,
                               sample_gue, sample_spectrum, unfold)
from rmtdeco.errors import ConfigError, DimensionError


def _central_mean_spacing(energies):
    # mean nearest-neighbour spacing over the central 80% of the levels
    n = energies.size
    lo = int(np.floor(0.1 * (n - 1)))
    hi = int(np.ceil(0.9 * (n - 1)))
    return (energies[hi] - energies[lo]) / (hi - lo)


# -- seeds -------------------------------------------------------------------


def test_seed_validation():
    RandomSeed(0, 0)
    RandomSeed(2**64 - 1, 5)
    with pytest.raises(ConfigError):
        RandomSeed(-1, 0)
    with pytest.raises(ConfigError):
        RandomSeed(0, 2**64)


def test_rng_streams_are_reproducible_and_independent():
    a1 = rng_from_seed(RandomSeed(7, 0)).standard_normal(64)
    a2 = rng_from_seed(RandomSeed(7, 0)).standard_normal(64)
    b = rng_from_seed(RandomSeed(7, 1)).standard_normal(64)
    c = rng_from_seed(RandomSeed(8, 0)).standard_normal(64)
    np.testing.assert_array_equal(a1, a2)
    assert not np.allclose(a1, b)
    assert not np.allclose(a1, c)


def test_base_stream_differs_from_realization_streams():
    base = rng_from_seed(RandomSeed(7, BASE_STREAM)).standard_normal(32)
    for i in range(4):
        real = rng_from_seed(RandomSeed(7, i)).standard_normal(32)
        assert not np.allclose(base, real)


def test_derive_root_is_deterministic_and_tag_sensitive():
    r = derive_root(11, 1, 2)
    assert r == derive_root(11, 1, 2)
    assert 0 <= r < 2**64
    assert r != derive_root(11, 2, 1)
    assert r != derive_root(11, 1)
    assert r != derive_root(12, 1, 2)


# -- matrix ensembles --------------------------------------------------------


def test_gue_is_hermitian_with_unit_entry_variance():
    n = 80
    sq_sum = 0.0
    diag_var = 0.0
    draws = 24
    for k in range(draws):
        v = sample_gue(n, RandomSeed(100, k))
        assert np.max(np.abs(v - v.conj().T)) == 0.0
        sq_sum += np.mean(np.abs(v) ** 2)
        diag_var += np.mean(np.diag(v).real ** 2)
    # every entry has <|V_ij|^2> = 1; the diagonal is real with variance 1
    assert abs(sq_sum / draws - 1.0) < 0.02
    assert abs(diag_var / draws - 1.0) < 0.15
    assert np.max(np.abs(np.diag(v).imag)) == 0.0


def test_goe_is_real_symmetric_with_standard_variances():
    n = 80
    off_var = 0.0
    diag_var = 0.0
    draws = 24
    for k in range(draws):
        v = sample_goe(n, RandomSeed(200, k))
        assert np.isrealobj(v)
        np.testing.assert_array_equal(v, v.T)
        mask = ~np.eye(n, dtype=bool)
        off_var += np.mean(v[mask] ** 2)
        diag_var += np.mean(np.diag(v) ** 2)
    assert abs(off_var / draws - 1.0) < 0.05
    assert abs(diag_var / draws - 2.0) < 0.3


def test_trace_of_squared_coupling_scales_with_dim_squared():
    # sum_ij |V_ij|^2 = n^2 on average with the unit-variance convention
    for kind in ("gue", "goe"):
        n = 100
        v = sample_coupling(kind, n, RandomSeed(3, 0))
        ratio = float(np.trace(v @ v).real) / n**2
        assert abs(ratio - 1.0) < 0.05


def test_sample_coupling_validates():
    with pytest.raises(ConfigError):
        sample_coupling("poisson", 8, RandomSeed(0, 0))
    with pytest.raises(DimensionError):
        sample_gue(0, RandomSeed(0, 0))


# -- spectra and unfolding ---------------------------------------------------


def test_unfold_affine_maps_uniform_grid_exactly():
    out = unfold([0.0, 2.0, 4.0, 6.0], method="affine")
    np.testing.assert_allclose(out, [0.0, 1.0, 2.0, 3.0], atol=1e-14)
    out = unfold([5.0, 7.0, 9.0], target_mean_spacing=2.0, method="affine")
    np.testing.assert_allclose(out, [0.0, 2.0, 4.0], atol=1e-14)


def test_unfold_anchors_zero_and_central_spacing():
    rng = rng_from_seed(RandomSeed(42, 0))
    raw = np.sort(rng.standard_normal(300))
    for method in ("affine", "semicircle", "auto"):
        out = unfold(raw, method=method)
        assert out[0] == 0.0
        assert np.all(np.diff(out) >= 0)
        assert np.isclose(_central_mean_spacing(out), 1.0, rtol=1e-12)


def test_auto_unfolding_picks_semicircle_for_raw_eigenvalues():
    raw = np.linalg.eigvalsh(sample_gue(512, RandomSeed(9, 0)))
    aff = unfold(raw, method="affine")
    auto = unfold(raw, method="auto")
    semi = unfold(raw, method="semicircle")
    np.testing.assert_array_equal(auto, semi)

    def central_cv(x):
        s = np.diff(x)
        lo = int(np.floor(0.1 * (x.size - 1)))
        hi = int(np.ceil(0.9 * (x.size - 1)))
        s = s[lo:hi]
        return s.std() / s.mean()

    # the semicircle map flattens the density; affine leaves the bulge in
    assert central_cv(auto) < central_cv(aff)


def test_unfolding_twice_is_the_identity():
    raw = np.linalg.eigvalsh(sample_goe(256, RandomSeed(10, 0)))
    once = unfold(raw, method="auto")
    twice = unfold(once, method="auto")
    np.testing.assert_allclose(twice, once, atol=1e-10)


def test_unfold_input_validation():
    with pytest.raises(ConfigError):
        unfold([1.0])
    with pytest.raises(ConfigError):
        unfold([0.0, 1.0], target_mean_spacing=0.0)
    with pytest.raises(ConfigError):
        unfold([0.0, 1.0, 2.0], method="spline")


def test_sampled_spectra_have_heisenberg_time_two_pi():
    for kind in ("poisson", "goe", "gue"):
        spec = sample_spectrum(kind, 128, RandomSeed(5, 3))
        assert spec.kind == kind
        assert spec.size == 128
        assert np.isclose(heisenberg_time(spec), 2.0 * np.pi, rtol=1e-12)


def test_level_repulsion_separates_gue_from_poisson():
    def central_spacing_cv(kind, seed):
        e = sample_spectrum(kind, 2000, RandomSeed(seed, 0)).energies
        s = np.diff(e)
        lo, hi = 200, 1800
        s = s[lo:hi]
        return s.std() / s.mean()

    cv_gue = central_spacing_cv("gue", 21)
    cv_poisson = central_spacing_cv("poisson", 22)
    # GUE spacings are rigid (cv ~ 0.42); Poisson are exponential (cv ~ 1)
    assert cv_gue < 0.6
    assert 0.85 < cv_poisson < 1.15


def test_spectrum_validation():
    with pytest.raises(ConfigError):
        Spectrum(energies=np.array([1.0, 0.0]), kind="gue")
    with pytest.raises(ConfigError):
        Spectrum(energies=np.array([1.0]), kind="gue")
    with pytest.raises(ConfigError):
        Spectrum(energies=np.array([0.0, 1.0]), kind="wigner")
    with pytest.raises(ConfigError):
        sample_spectrum("explicit", 8, RandomSeed(0, 0))
    with pytest.raises(ConfigError):
        sample_spectrum("bogus", 8, RandomSeed(0, 0))


def test_explicit_spectrum_sorts_and_tags():
    spec = explicit_spectrum([3.0, 1.0, 2.0])
    assert spec.kind == "explicit"
    np.testing.assert_array_equal(spec.energies, [1.0, 2.0, 3.0])


def test_heisenberg_time_on_uniform_grid():
    assert np.isclose(heisenberg_time(np.arange(50.0)), 2.0 * np.pi,
                      rtol=1e-14)
    assert np.isclose(heisenberg_time(explicit_spectrum(0.5 * np.arange(20))),
                      4.0 * np.pi, rtol=1e-12)
    with pytest.raises(ConfigError):
        heisenberg_time(np.array([1.0]))


def test_sampling_is_seed_deterministic():
    a = sample_spectrum("gue", 64, RandomSeed(77, 4)).energies
    b = sample_spectrum("gue", 64, RandomSeed(77, 4)).energies
    c = sample_spectrum("gue", 64, RandomSeed(77, 5)).energies
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
