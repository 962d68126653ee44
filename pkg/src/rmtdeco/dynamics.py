"""Hamiltonians, exact evolution, and Monte-Carlo ensembles of reduced states.

The model: a small central system (one factor, or a coupled qubit plus a
spectator factor) attached to an environment drawn from random-matrix theory.
The total Hamiltonian is H0 + lam * V with H0 diagonal in the product basis
and V a GUE/GOE matrix on (first central factor x environment), extended by
identity over any remaining central factor.

Because V never touches the later central factors and H0 is diagonal,
exp(-iHt) factorizes exactly into the coupled-block propagator times free
phases; propagation therefore only diagonalizes the coupled block. The
equivalence with full-matrix evolution is covered by tests.

Reduced states are reported in the interaction picture by default: the echo
operator M(t) = exp(+iH0 t) exp(-iH t) is applied to the initial state and
the environment traced out. The Schroedinger-picture state is the same thing
conjugated with the free central propagator.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from threadpoolctl import threadpool_limits

from .ensembles import (BASE_STREAM, RandomSeed, Spectrum, _coupling,
                        _spectrum, rng_from_seed)
from .errors import ConfigError, DimensionError
from .flatcfg import text_hash, to_text
from .qstate import MAX_DIM, basis_state, bell_state, validate_density

PICTURES = ("interaction", "schroedinger")


@dataclass(frozen=True)
class HamiltonianSpec:
    """One realization of the model: central spectra, env spectrum, coupling.

    central_spectra holds the diagonal entries of each central factor's
    Hamiltonian in product-basis order (one array: plain model; two arrays:
    coupled factor plus spectator factor). ``coupling`` lives on (first
    central factor x environment) and may be None for response-theory work
    that never propagates.
    """
    central_spectra: tuple
    env: Spectrum
    lam: float
    coupling: np.ndarray = None

    def __post_init__(self):
        spectra = tuple(np.asarray(s, dtype=float).ravel()
                        for s in self.central_spectra)
        if not 1 <= len(spectra) <= 2:
            raise ConfigError("expected one or two central factors, "
                              f"got {len(spectra)}")
        if any(s.size < 1 for s in spectra):
            raise ConfigError("central factors need at least one level")
        object.__setattr__(self, "central_spectra", spectra)
        if not isinstance(self.env, Spectrum):
            raise ConfigError("env must be a Spectrum")
        if float(self.lam) < 0:
            raise ConfigError(f"coupling strength must be >= 0, got {self.lam}")
        if self.total_dim > MAX_DIM:
            raise DimensionError(
                f"total dimension {self.total_dim} exceeds MAX_DIM={MAX_DIM}")
        if self.coupling is not None:
            v = np.asarray(self.coupling, dtype=complex)
            d = self.coupled_dim
            if v.shape != (d, d):
                raise DimensionError(
                    f"coupling must be {d}x{d} (coupled factor x env), "
                    f"got {v.shape}")
            scale = max(1.0, float(np.max(np.abs(v))))
            if np.max(np.abs(v - v.conj().T)) > 1e-9 * scale:
                raise ConfigError("coupling matrix must be Hermitian")
            object.__setattr__(self, "coupling", v)

    @property
    def central_dims(self):
        return tuple(s.size for s in self.central_spectra)

    @property
    def m(self):
        return int(np.prod(self.central_dims))

    @property
    def topology(self):
        return "plain" if len(self.central_spectra) == 1 else "spectator"

    @property
    def env_dim(self):
        return self.env.size

    @property
    def coupled_dim(self):
        return self.central_dims[0] * self.env_dim

    @property
    def total_dim(self):
        return self.m * self.env_dim

    def h0_diag3(self):
        """H0 energies as an (m1, m_rest, N) array."""
        m1 = self.central_dims[0]
        rest = self.central_spectra[1] if len(self.central_spectra) > 1 \
            else np.zeros(1)
        e = (self.central_spectra[0][:, None, None]
             + rest[None, :, None]
             + self.env.energies[None, None, :])
        return e.reshape(m1, rest.size, self.env_dim)


def _embed_coupled(block, m1, n, m_rest):
    """Extend an operator on (factor0 x env) by identity on the rest factor."""
    if m_rest == 1:
        return block
    b4 = block.reshape(m1, n, m1, n)
    t6 = np.einsum("iKjL,ab->iaKjbL", b4, np.eye(m_rest))
    d = m1 * m_rest * n
    return t6.reshape(d, d)


def assemble_hamiltonian(spec: HamiltonianSpec):
    """Full Hamiltonian H0 + lam*V as a dense Hermitian matrix."""
    if spec.coupling is None:
        raise ConfigError("spec has no coupling matrix")
    m1 = spec.central_dims[0]
    m_rest = spec.m // m1
    n = spec.env_dim
    h = np.diag(spec.h0_diag3().ravel()).astype(complex)
    h += spec.lam * _embed_coupled(spec.coupling, m1, n, m_rest)
    return h


@dataclass(frozen=True)
class Propagator:
    """Cached eigensystem of the coupled block H0_block + lam*V."""
    spec: HamiltonianSpec
    energies: np.ndarray
    modes: np.ndarray

    def hamiltonian(self):
        """Reconstruct the full Hamiltonian (for consistency checks)."""
        m1 = self.spec.central_dims[0]
        m_rest = self.spec.m // m1
        n = self.spec.env_dim
        blk = (self.modes * self.energies) @ self.modes.conj().T
        h = _embed_coupled(blk, m1, n, m_rest).astype(complex)
        if m_rest > 1:
            rest = (np.zeros(m1)[:, None, None]
                    + self.spec.central_spectra[1][None, :, None]
                    + np.zeros(n)[None, None, :]).ravel()
            h += np.diag(rest)
        return h

    def block_unitary(self, t):
        return (self.modes * np.exp(-1j * self.energies * t)) @ \
            self.modes.conj().T


def make_propagator(spec: HamiltonianSpec) -> Propagator:
    if spec.coupling is None:
        raise ConfigError("cannot build a propagator without a coupling matrix")
    m1 = spec.central_dims[0]
    n = spec.env_dim
    h0_blk = np.add.outer(spec.central_spectra[0], spec.env.energies).ravel()
    blk = np.diag(h0_blk).astype(complex) + spec.lam * spec.coupling
    w, u = np.linalg.eigh(blk)
    return Propagator(spec=spec, energies=w, modes=u)


def _as_propagator(spec_or_prop):
    if isinstance(spec_or_prop, Propagator):
        return spec_or_prop
    if isinstance(spec_or_prop, HamiltonianSpec):
        return make_propagator(spec_or_prop)
    raise ConfigError("expected a HamiltonianSpec or Propagator")


def _full_unitary(prop: Propagator, t):
    spec = prop.spec
    m1 = spec.central_dims[0]
    m_rest = spec.m // m1
    n = spec.env_dim
    u = _embed_coupled(prop.block_unitary(t), m1, n, m_rest)
    if m_rest > 1:
        rest = (np.zeros(m1)[:, None, None]
                + spec.central_spectra[1][None, :, None]
                + np.zeros(n)[None, None, :]).ravel()
        u = u * np.exp(-1j * rest * t)[:, None]
    return u


def echo_operator(spec_or_prop, t):
    """M(t) = exp(+iH0 t) exp(-iH t) on the full space."""
    prop = _as_propagator(spec_or_prop)
    u = _full_unitary(prop, t)
    phases = np.exp(1j * prop.spec.h0_diag3().ravel() * t)
    return phases[:, None] * u


def evolve(rho0, spec_or_prop, t, picture="schroedinger"):
    """Evolve a full-space density matrix to time t."""
    if picture not in PICTURES:
        raise ConfigError(f"unknown picture {picture!r}")
    prop = _as_propagator(spec_or_prop)
    d = prop.spec.total_dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise DimensionError(f"state has shape {rho0.shape}, expected {(d, d)}")
    u = echo_operator(prop, t) if picture == "interaction" \
        else _full_unitary(prop, t)
    return u @ rho0 @ u.conj().T


def _evolved_reduced(prop: Propagator, psi_c, psi_e, t, picture):
    """Reduced central state from a pure product initial state."""
    spec = prop.spec
    m1 = spec.central_dims[0]
    m_rest = spec.m // m1
    n = spec.env_dim
    psi3 = psi_c.reshape(m1, m_rest)[:, :, None] * psi_e[None, None, :]
    y = psi3.transpose(0, 2, 1).reshape(m1 * n, m_rest)
    coef = prop.modes.conj().T @ y
    z = prop.modes @ (np.exp(-1j * prop.energies * t)[:, None] * coef)
    psi3t = z.reshape(m1, n, m_rest).transpose(0, 2, 1).copy()
    if m_rest > 1:
        psi3t *= np.exp(-1j * spec.central_spectra[1] * t)[None, :, None]
    if picture == "interaction":
        psi3t *= np.exp(1j * spec.h0_diag3() * t)
    x = psi3t.reshape(spec.m, n)
    return x @ x.conj().T


def _pure_components(rho, dim, what):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        if rho.size != dim:
            raise DimensionError(f"{what} vector has size {rho.size}, "
                                 f"expected {dim}")
        nrm = np.linalg.norm(rho)
        if nrm == 0:
            raise ValueError(f"{what} vector is zero")
        return [(1.0, rho / nrm)]
    rho = validate_density(rho, tol=1e-10)
    if rho.shape != (dim, dim):
        raise DimensionError(f"{what} has shape {rho.shape}, expected "
                             f"({dim}, {dim})")
    w, v = np.linalg.eigh(rho)
    return [(float(w[k]), v[:, k]) for k in range(dim) if w[k] > 1e-12]


def reduced_state(spec_or_prop, rho_c, rho_e, t, picture="interaction"):
    """Central reduced state at time t from a product initial state.

    ``rho_c`` and ``rho_e`` may be state vectors or density matrices; mixed
    inputs are handled by spectral decomposition. Default output is the
    interaction picture (echo); pass picture="schroedinger" for the lab frame.
    """
    if picture not in PICTURES:
        raise ConfigError(f"unknown picture {picture!r}")
    prop = _as_propagator(spec_or_prop)
    spec = prop.spec
    acc = np.zeros((spec.m, spec.m), dtype=complex)
    for wc, pc in _pure_components(rho_c, spec.m, "central state"):
        for we, pe in _pure_components(rho_e, spec.env_dim, "env state"):
            acc += wc * we * _evolved_reduced(prop, pc, pe, t, picture)
    return validate_density(acc, tol=1e-10)


# ---------------------------------------------------------------------------
# Ensembles


@dataclass(frozen=True)
class EnsembleConfig:
    """Everything needed to reproduce a Monte-Carlo ensemble bit for bit.

    Realization i draws from stream i of ``root_seed`` in a fixed order
    (env spectrum, coupling, env state); components with their resample
    switch off come instead from a reserved shared stream. Results are
    independent of how many workers execute the realizations.
    """
    topology: str = "spectator"
    central_dims: tuple = (2, 2)
    env_dim: int = 64
    env_kind: str = "gue"
    coupling_kind: str = "gue"
    lam: float = 0.03
    central_splitting: float = 0.0
    central_spectrum: tuple = None
    central_state: str = "bell"
    env_state: str = "basis_center"
    picture: str = "interaction"
    resample_coupling: bool = True
    resample_env_spectrum: bool = True
    resample_env_state: bool = True
    realizations: int = 100
    root_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "central_dims",
                           tuple(int(d) for d in self.central_dims))
        if self.topology not in ("plain", "spectator"):
            raise ConfigError(f"unknown topology {self.topology!r}")
        want = 1 if self.topology == "plain" else 2
        if len(self.central_dims) != want:
            raise ConfigError(f"{self.topology} topology needs {want} central "
                              f"factor(s), got dims {self.central_dims}")
        if any(d < 2 for d in self.central_dims):
            raise ConfigError("central factors need dimension >= 2")
        if int(self.env_dim) < 2:
            raise ConfigError("env_dim must be >= 2")
        if self.env_kind not in ("poisson", "goe", "gue"):
            raise ConfigError(f"unknown env_kind {self.env_kind!r}")
        if self.coupling_kind not in ("goe", "gue"):
            raise ConfigError(f"unknown coupling_kind {self.coupling_kind!r}")
        if float(self.lam) < 0:
            raise ConfigError("lam must be >= 0")
        if float(self.central_splitting) != 0.0 and self.central_dims[0] != 2:
            raise ConfigError("central_splitting needs a two-level coupled "
                              "factor")
        if self.central_spectrum is not None:
            cs = tuple(float(x) for x in self.central_spectrum)
            if len(cs) != self.central_dims[0]:
                raise ConfigError("central_spectrum length must match the "
                                  "coupled factor dimension")
            if self.central_splitting != 0.0:
                raise ConfigError("give central_splitting or central_spectrum,"
                                  " not both")
            object.__setattr__(self, "central_spectrum", cs)
        if self.env_state not in ("basis_center", "random_phase"):
            raise ConfigError(f"unknown env_state {self.env_state!r}")
        if self.picture not in PICTURES:
            raise ConfigError(f"unknown picture {self.picture!r}")
        if int(self.realizations) < 1:
            raise ConfigError("realizations must be >= 1")
        if not 0 <= int(self.root_seed) < 2**64:
            raise ConfigError("root_seed must be a u64")
        if self.m * int(self.env_dim) > MAX_DIM:
            raise DimensionError(f"total dimension {self.m * self.env_dim} "
                                 f"exceeds MAX_DIM={MAX_DIM}")
        self.central_vector()  # fail fast on a bad state string

    @property
    def m(self):
        return int(np.prod(self.central_dims))

    @property
    def coupled_dim(self):
        return self.central_dims[0] * int(self.env_dim)

    def central_spectra_arrays(self):
        m1 = self.central_dims[0]
        if self.central_spectrum is not None:
            first = np.asarray(self.central_spectrum, dtype=float)
        elif self.central_splitting != 0.0:
            d = float(self.central_splitting)
            first = np.array([+d / 2.0, -d / 2.0])
        else:
            first = np.zeros(m1)
        if self.topology == "plain":
            return (first,)
        return (first, np.zeros(self.central_dims[1]))

    def central_vector(self):
        s = self.central_state
        if s == "bell":
            if self.m != 4:
                raise ConfigError("central_state 'bell' needs a 4-dim central "
                                  "system")
            return bell_state()
        if s.startswith("basis:"):
            try:
                k = int(s.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad basis state spec {s!r}") from None
            if not 0 <= k < self.m:
                raise ConfigError(f"basis index {k} out of range for "
                                  f"dimension {self.m}")
            return basis_state(self.m, k)
        if s.startswith("explicit:"):
            try:
                amps = np.array([complex(p) for p in
                                 s.split(":", 1)[1].split(",")])
            except ValueError:
                raise ConfigError(f"bad explicit amplitudes in {s!r}") from None
            if amps.size != self.m:
                raise ConfigError(f"explicit state needs {self.m} amplitudes, "
                                  f"got {amps.size}")
            nrm = np.linalg.norm(amps)
            if nrm == 0:
                raise ConfigError("explicit state must be non-zero")
            return amps / nrm
        raise ConfigError(f"unknown central_state {s!r}")

    def to_mapping(self):
        out = {
            "topology": self.topology,
            "central_dims": list(self.central_dims),
            "env_dim": int(self.env_dim),
            "env_kind": self.env_kind,
            "coupling_kind": self.coupling_kind,
            "lam": float(self.lam),
            "central_splitting": float(self.central_splitting),
            "central_state": self.central_state,
            "env_state": self.env_state,
            "picture": self.picture,
            "resample_coupling": self.resample_coupling,
            "resample_env_spectrum": self.resample_env_spectrum,
            "resample_env_state": self.resample_env_state,
            "realizations": int(self.realizations),
            "root_seed": int(self.root_seed),
        }
        if self.central_spectrum is not None:
            out["central_spectrum"] = list(self.central_spectrum)
        return out

    def config_hash(self):
        return text_hash(to_text(self.to_mapping()))


@dataclass(frozen=True)
class StateEnsemble:
    """Reduced states of all realizations at one time."""
    time: float
    states: np.ndarray
    seeds: tuple
    config_hash: str

    @property
    def size(self):
        return self.states.shape[0]


def ensemble_mean(ensemble: StateEnsemble):
    """Validated average state of the ensemble."""
    return validate_density(ensemble.states.mean(axis=0), tol=1e-10)


def _env_amplitudes(config: EnsembleConfig, rng):
    n = int(config.env_dim)
    if config.env_state == "basis_center":
        return basis_state(n, n // 2)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.exp(1j * theta) / np.sqrt(n)


def _draw_components(config: EnsembleConfig, rng):
    """All three stochastic pieces, in the fixed draw order."""
    spec_e = _spectrum(config.env_kind, int(config.env_dim), rng)
    v = _coupling(config.coupling_kind, config.coupled_dim, rng)
    amp = _env_amplitudes(config, rng)
    return spec_e, v, amp


_BASE_CACHE = {}


def _base_components(config: EnsembleConfig):
    key = config.config_hash()
    if key not in _BASE_CACHE:
        rng = rng_from_seed(RandomSeed(config.root_seed, BASE_STREAM))
        _BASE_CACHE[key] = _draw_components(config, rng)
        if len(_BASE_CACHE) > 8:  # keep worker memory bounded
            _BASE_CACHE.pop(next(iter(_BASE_CACHE)))
    return _BASE_CACHE[key]


def shared_components(config: EnsembleConfig):
    """Base-stream draws: (env spectrum, coupling, env amplitudes).

    These are the components a realization reuses when its resample switch
    is off. They also serve as the deterministic representative environment
    for response-theory predictions alongside a Monte-Carlo run.
    """
    spec_e, v, amp = _base_components(config)
    return spec_e, v.copy(), amp.copy()


def _realization_states(config: EnsembleConfig, times, index):
    """Reduced states of realization ``index`` at every requested time."""
    with threadpool_limits(limits=1):
        rng = rng_from_seed(RandomSeed(config.root_seed, index))
        spec_e, v, amp = _draw_components(config, rng)
        if not (config.resample_env_spectrum and config.resample_coupling
                and config.resample_env_state):
            base = _base_components(config)
            if not config.resample_env_spectrum:
                spec_e = base[0]
            if not config.resample_coupling:
                v = base[1]
            if not config.resample_env_state:
                amp = base[2]
        spec = HamiltonianSpec(central_spectra=config.central_spectra_arrays(),
                               env=spec_e, lam=float(config.lam), coupling=v)
        prop = make_propagator(spec)
        psi_c = config.central_vector()
        out = np.empty((len(times), config.m, config.m), dtype=complex)
        for k, t in enumerate(times):
            out[k] = _evolved_reduced(prop, psi_c, amp, float(t),
                                      config.picture)
        return out


def generate_ensemble_series(config: EnsembleConfig, times, workers=0):
    """One StateEnsemble per requested time, sharing realizations.

    The eigensystem of each realization is computed once and reused for
    every time, so prefer this over repeated generate_ensemble calls.
    ``workers`` > 1 distributes realizations over processes; the result is
    bit-identical for any worker count.
    """
    times = tuple(float(t) for t in times)
    if not times:
        raise ConfigError("need at least one time")
    if any(t < 0 for t in times):
        raise ConfigError("times must be >= 0")
    r = int(config.realizations)
    job = partial(_realization_states, config, times)
    if workers and int(workers) > 1:
        chunk = max(1, r // (int(workers) * 8))
        with multiprocessing.Pool(processes=int(workers)) as pool:
            per_real = list(pool.imap(job, range(r), chunksize=chunk))
    else:
        per_real = [job(i) for i in range(r)]
    stacked = np.stack(per_real)  # (R, T, m, m)
    for i in range(r):
        for k in range(len(times)):
            stacked[i, k] = validate_density(stacked[i, k], tol=1e-10)
    seeds = tuple(RandomSeed(config.root_seed, i) for i in range(r))
    chash = config.config_hash()
    return [StateEnsemble(time=times[k], states=stacked[:, k].copy(),
                          seeds=seeds, config_hash=chash)
            for k in range(len(times))]


def generate_ensemble(config: EnsembleConfig, t, workers=0) -> StateEnsemble:
    """Ensemble of reduced central states at a single time."""
    return generate_ensemble_series(config, [t], workers=workers)[0]
