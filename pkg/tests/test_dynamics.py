"""Tests for Hamiltonian assembly, exact propagation, and ensembles."""

import numpy as np
import pytest

from conftest import random_density, random_pure_state
from rmtdeco.dynamics import (EnsembleConfig, HamiltonianSpec, StateEnsemble,
                              assemble_hamiltonian, echo_operator,
                              ensemble_mean, evolve, generate_ensemble,
                              generate_ensemble_series, make_propagator,
                              reduced_state, shared_components)
from rmtdeco.ensembles import (RandomSeed, Spectrum, explicit_spectrum,
                               sample_gue, sample_spectrum)
from rmtdeco.errors import ConfigError, DimensionError
from rmtdeco.qstate import partial_trace, tensor_product


def small_spec(m1=2, m_rest=None, n=5, lam=0.2, seed=4, splitting=0.8):
    central = (np.linspace(splitting / 2, -splitting / 2, m1),)
    if m_rest is not None:
        central = central + (np.zeros(m_rest),)
    env = sample_spectrum("gue", n, RandomSeed(seed, 0))
    v = sample_gue(m1 * n, RandomSeed(seed, 1))
    return HamiltonianSpec(central_spectra=central, env=env, lam=lam,
                           coupling=v)


# -- HamiltonianSpec ---------------------------------------------------------


def test_spec_validation():
    env = explicit_spectrum(np.arange(4.0))
    with pytest.raises(ConfigError):
        HamiltonianSpec(central_spectra=(), env=env, lam=0.1)
    with pytest.raises(ConfigError):
        HamiltonianSpec(central_spectra=(np.zeros(2),) * 3, env=env, lam=0.1)
    with pytest.raises(ConfigError):
        HamiltonianSpec(central_spectra=(np.zeros(2),), env=np.arange(4.0),
                        lam=0.1)
    with pytest.raises(ConfigError):
        HamiltonianSpec(central_spectra=(np.zeros(2),), env=env, lam=-0.1)
    with pytest.raises(DimensionError):
        HamiltonianSpec(central_spectra=(np.zeros(2),), env=env, lam=0.1,
                        coupling=np.eye(3))
    with pytest.raises(ConfigError):
        bad = np.triu(np.ones((8, 8)))
        HamiltonianSpec(central_spectra=(np.zeros(2),), env=env, lam=0.1,
                        coupling=bad)
    with pytest.raises(DimensionError):
        HamiltonianSpec(central_spectra=(np.zeros(64), np.zeros(65)),
                        env=explicit_spectrum(np.arange(2.0)), lam=0.1)


def test_spec_derived_properties():
    spec = small_spec(m1=2, m_rest=3, n=5)
    assert spec.central_dims == (2, 3)
    assert spec.m == 6
    assert spec.topology == "spectator"
    assert spec.env_dim == 5
    assert spec.coupled_dim == 10
    assert spec.total_dim == 30
    assert small_spec(m1=2, n=5).topology == "plain"


def test_h0_diag_matches_kron_sum():
    spec = small_spec(m1=2, m_rest=3, n=4, splitting=1.0)
    eps = spec.central_spectra[0]
    e_env = spec.env.energies
    expect = (np.kron(np.kron(eps, np.ones(3)), np.ones(4))
              + np.kron(np.ones(6), e_env))
    np.testing.assert_allclose(spec.h0_diag3().ravel(), expect, atol=1e-14)


def test_assemble_matches_explicit_kron_construction():
    spec = small_spec(m1=2, m_rest=3, n=4, lam=0.3)
    h = assemble_hamiltonian(spec)
    v4 = spec.coupling.reshape(2, 4, 2, 4)
    # move the identity spectator factor into the middle slot by hand
    v_full = np.einsum("iKjL,ab->iaKjbL", v4, np.eye(3)).reshape(24, 24)
    expect = np.diag(spec.h0_diag3().ravel()) + 0.3 * v_full
    np.testing.assert_allclose(h, expect, atol=1e-13)
    np.testing.assert_allclose(h, h.conj().T, atol=1e-13)


def test_propagator_reconstructs_the_hamiltonian():
    for kwargs in (dict(m1=2, m_rest=3, n=4), dict(m1=3, n=5)):
        spec = small_spec(**kwargs)
        prop = make_propagator(spec)
        np.testing.assert_allclose(prop.hamiltonian(),
                                   assemble_hamiltonian(spec), atol=1e-12)


def test_propagator_requires_a_coupling():
    spec = HamiltonianSpec(central_spectra=(np.zeros(2),),
                           env=explicit_spectrum(np.arange(3.0)), lam=0.1)
    with pytest.raises(ConfigError):
        make_propagator(spec)
    with pytest.raises(ConfigError):
        assemble_hamiltonian(spec)


# -- propagation -------------------------------------------------------------


def test_echo_operator_contracts():
    spec = small_spec(m1=2, m_rest=2, n=6, lam=0.4)
    d = spec.total_dim
    m0 = echo_operator(spec, 0.0)
    np.testing.assert_allclose(m0, np.eye(d), atol=1e-13)
    mt = echo_operator(spec, 1.7)
    np.testing.assert_allclose(mt @ mt.conj().T, np.eye(d), atol=1e-12)
    # without coupling the echo cancels the free evolution exactly
    free = HamiltonianSpec(central_spectra=spec.central_spectra, env=spec.env,
                           lam=0.0, coupling=spec.coupling)
    np.testing.assert_allclose(echo_operator(free, 2.9), np.eye(d),
                               atol=1e-12)


def test_evolve_matches_direct_matrix_exponential():
    spec = small_spec(m1=2, m_rest=2, n=4, lam=0.5)
    h = assemble_hamiltonian(spec)
    w, u = np.linalg.eigh(h)
    t = 1.3
    u_t = (u * np.exp(-1j * w * t)) @ u.conj().T
    rng = np.random.default_rng(0)
    rho0 = random_density(rng, spec.total_dim)
    expect = u_t @ rho0 @ u_t.conj().T
    got = evolve(rho0, spec, t, picture="schroedinger")
    np.testing.assert_allclose(got, expect, atol=1e-12)


def test_pictures_differ_by_free_phases():
    spec = small_spec(m1=2, m_rest=2, n=5, lam=0.3, splitting=0.9)
    rng = np.random.default_rng(1)
    rho0 = random_density(rng, spec.total_dim)
    t = 0.9
    rho_s = evolve(rho0, spec, t, picture="schroedinger")
    rho_i = evolve(rho0, spec, t, picture="interaction")
    ph = np.exp(-1j * spec.h0_diag3().ravel() * t)
    np.testing.assert_allclose(rho_s, (ph[:, None] * rho_i) * ph.conj(),
                               atol=1e-12)


def test_evolve_validates_inputs():
    spec = small_spec()
    with pytest.raises(DimensionError):
        evolve(np.eye(3) / 3, spec, 1.0)
    with pytest.raises(ConfigError):
        evolve(np.eye(spec.total_dim) / spec.total_dim, spec, 1.0,
               picture="heisenberg")


@pytest.mark.parametrize("kwargs", [dict(m1=2, m_rest=3, n=5),
                                    dict(m1=3, n=6)])
@pytest.mark.parametrize("picture", ["interaction", "schroedinger"])
def test_reduced_state_agrees_with_full_space_evolution(kwargs, picture):
    spec = small_spec(lam=0.35, **kwargs)
    rng = np.random.default_rng(7)
    psi_c = random_pure_state(rng, spec.m)
    psi_e = random_pure_state(rng, spec.env_dim)
    t = 2.1
    fast = reduced_state(spec, psi_c, psi_e, t, picture=picture)
    rho0 = np.outer(tensor_product(psi_c, psi_e),
                    tensor_product(psi_c, psi_e).conj())
    full = evolve(rho0, spec, t, picture=picture)
    slow = partial_trace(full, (spec.m, spec.env_dim), keep=(0,))
    np.testing.assert_allclose(fast, slow, atol=1e-12)


def test_reduced_state_mixed_inputs_are_convex_combinations():
    spec = small_spec(m1=2, m_rest=2, n=5, lam=0.25)
    rng = np.random.default_rng(11)
    psis = [random_pure_state(rng, 4) for _ in range(2)]
    weights = (0.3, 0.7)
    rho_c = sum(w * np.outer(p, p.conj()) for w, p in zip(weights, psis))
    psi_e = random_pure_state(rng, 5)
    t = 1.1
    mixed = reduced_state(spec, rho_c, psi_e, t)
    parts = sum(w * reduced_state(spec, p, psi_e, t)
                for w, p in zip(weights, psis))
    np.testing.assert_allclose(mixed, parts, atol=1e-11)


def test_reduced_state_rejects_zero_vector():
    spec = small_spec(m1=2, m_rest=2, n=5)
    with pytest.raises(ValueError):
        reduced_state(spec, np.zeros(4), np.ones(5) / np.sqrt(5), 1.0)


# -- EnsembleConfig ----------------------------------------------------------


def test_ensemble_config_validation():
    with pytest.raises(ConfigError):
        EnsembleConfig(topology="ring")
    with pytest.raises(ConfigError):
        EnsembleConfig(topology="plain", central_dims=(2, 2))
    with pytest.raises(ConfigError):
        EnsembleConfig(central_dims=(3, 2), central_splitting=1.0,
                       central_state="basis:0")
    with pytest.raises(ConfigError):
        EnsembleConfig(central_splitting=1.0, central_spectrum=(0.5, -0.5))
    with pytest.raises(ConfigError):
        EnsembleConfig(topology="plain", central_dims=(3,),
                       central_state="bell")
    with pytest.raises(ConfigError):
        EnsembleConfig(central_state="basis:7")
    with pytest.raises(ConfigError):
        EnsembleConfig(central_state="explicit:1,0,0")
    with pytest.raises(ConfigError):
        EnsembleConfig(env_state="thermal")
    with pytest.raises(ConfigError):
        EnsembleConfig(realizations=0)
    with pytest.raises(DimensionError):
        EnsembleConfig(central_dims=(2, 64), env_dim=64)


def test_central_spectra_arrays_and_vector():
    cfg = EnsembleConfig(central_splitting=0.6)
    first, rest = cfg.central_spectra_arrays()
    np.testing.assert_allclose(first, [0.3, -0.3])
    np.testing.assert_allclose(rest, [0.0, 0.0])
    np.testing.assert_allclose(cfg.central_vector(),
                               np.array([1, 0, 0, 1]) / np.sqrt(2))
    cfg2 = EnsembleConfig(topology="plain", central_dims=(3,),
                          central_state="explicit:1,1j,0",
                          central_spectrum=(0.0, 1.0, 2.5))
    np.testing.assert_allclose(cfg2.central_vector(),
                               np.array([1, 1j, 0]) / np.sqrt(2))
    np.testing.assert_allclose(cfg2.central_spectra_arrays()[0],
                               [0.0, 1.0, 2.5])


def test_config_hash_tracks_fields():
    a = EnsembleConfig(root_seed=1)
    b = EnsembleConfig(root_seed=2)
    assert a.config_hash() == EnsembleConfig(root_seed=1).config_hash()
    assert a.config_hash() != b.config_hash()
    assert a.config_hash() != EnsembleConfig(root_seed=1,
                                             lam=0.05).config_hash()


# -- ensembles ---------------------------------------------------------------


def quick_config(**kw):
    base = dict(env_dim=12, lam=0.05, realizations=6, root_seed=9)
    base.update(kw)
    return EnsembleConfig(**base)


def test_ensemble_series_shapes_and_determinism():
    cfg = quick_config()
    times = (0.4, 1.9)
    series = generate_ensemble_series(cfg, times)
    assert [e.time for e in series] == list(times)
    for ens in series:
        assert isinstance(ens, StateEnsemble)
        assert ens.states.shape == (6, 4, 4)
        assert ens.size == 6
        assert ens.config_hash == cfg.config_hash()
    again = generate_ensemble_series(cfg, times)
    for e1, e2 in zip(series, again):
        np.testing.assert_array_equal(e1.states, e2.states)


def test_worker_count_does_not_change_results():
    cfg = quick_config(realizations=8)
    serial = generate_ensemble_series(cfg, (0.7, 1.4), workers=0)
    parallel = generate_ensemble_series(cfg, (0.7, 1.4), workers=2)
    for e1, e2 in zip(serial, parallel):
        np.testing.assert_array_equal(e1.states, e2.states)


def test_single_time_helper_matches_series():
    cfg = quick_config()
    one = generate_ensemble(cfg, 1.2)
    ser = generate_ensemble_series(cfg, (1.2,))[0]
    np.testing.assert_array_equal(one.states, ser.states)


def test_realizations_differ_when_resampling():
    ens = generate_ensemble(quick_config(), 1.0)
    assert not np.allclose(ens.states[0], ens.states[1])


def test_resample_switches_pin_components():
    cfg = quick_config(resample_coupling=False, resample_env_spectrum=False,
                       resample_env_state=False)
    ens = generate_ensemble(cfg, 1.0)
    for k in range(1, ens.size):
        np.testing.assert_allclose(ens.states[k], ens.states[0], atol=1e-15)
    # and the pinned components are exactly the shared base draws
    spec_e, v, amp = shared_components(cfg)
    spec = HamiltonianSpec(central_spectra=cfg.central_spectra_arrays(),
                           env=spec_e, lam=cfg.lam, coupling=v)
    direct = reduced_state(spec, cfg.central_vector(), amp, 1.0,
                           picture=cfg.picture)
    np.testing.assert_allclose(ens.states[0], direct, atol=1e-12)


def test_shared_components_returns_safe_copies():
    cfg = quick_config()
    spec1, v1, amp1 = shared_components(cfg)
    v1[:] = 0.0
    amp1[:] = 0.0
    spec2, v2, amp2 = shared_components(cfg)
    assert np.any(v2 != 0.0)
    assert np.any(amp2 != 0.0)
    np.testing.assert_array_equal(spec1.energies, spec2.energies)


def test_env_state_random_phase_has_flat_magnitudes():
    cfg = quick_config(env_state="random_phase")
    spec_e, _, amp = shared_components(cfg)
    np.testing.assert_allclose(np.abs(amp), 1.0 / np.sqrt(cfg.env_dim),
                               atol=1e-14)
    ens = generate_ensemble(cfg, 0.9)
    assert ens.states.shape == (6, 4, 4)


def test_ensemble_mean_is_a_valid_state():
    ens = generate_ensemble(quick_config(realizations=10), 1.5)
    mean = ensemble_mean(ens)
    assert np.isclose(np.trace(mean).real, 1.0, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(mean)) > -1e-12
    # averaging over couplings must not beat the per-realization purity
    mean_purity = float(np.sum(np.abs(mean) ** 2).real)
    per = [float(np.sum(np.abs(s) ** 2).real) for s in ens.states]
    assert mean_purity <= np.mean(per) + 1e-12


def test_series_time_validation():
    cfg = quick_config()
    with pytest.raises(ConfigError):
        generate_ensemble_series(cfg, ())
    with pytest.raises(ConfigError):
        generate_ensemble_series(cfg, (-1.0,))


def test_spectator_marginal_is_untouched_in_interaction_picture():
    # V acts as identity on the spectator factor and H0 adds only phases,
    # so its reduced state stays exactly the initial maximally mixed one.
    cfg = quick_config(central_splitting=0.7, realizations=4)
    ens = generate_ensemble(cfg, 1.3)
    for state in ens.states:
        marg = partial_trace(state, (2, 2), keep=(1,))
        np.testing.assert_allclose(marg, np.eye(2) / 2, atol=1e-12)
