"""Markovian limit of the averaged echo dynamics.

In the golden-rule regime the coupling-averaged interaction-picture state
relaxes toward a stationary target at a single rate:

    drho/dt = -rate * (rho - target(rho))

where target(rho) is the maximally mixed state on the coupled factor times
the untouched spectator marginal (for the plain model the spectator is
trivial and the target is just the maximally mixed state). The rate is
coupled_dim * tau_h * lam**2 with tau_h the environment Heisenberg time.

Because target is idempotent and constant along the flow, the equation has
the exact solution

    rho(t) = exp(-rate*t) * (rho0 - target(rho0)) + target(rho0)

used throughout as the Markov benchmark; a fixed-step RK4 integrator is
provided to cross-check the closed form and for experimenting with modified
rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .qstate import partial_trace, validate_density

__all__ = ["MasterParams", "relaxation_target", "solve_plain",
           "solve_spectator", "integrate_numeric", "werner_beta"]


@dataclass(frozen=True)
class MasterParams:
    """Relaxation rate bookkeeping for the Markovian limit.

    Give tau_h and lam (rate is derived as coupled_dim * tau_h * lam**2),
    or the rate directly, or both (they must then agree).
    """
    coupled_dim: int
    tau_h: float = None
    lam: float = None
    rate: float = None

    def __post_init__(self):
        if int(self.coupled_dim) < 2:
            raise ConfigError("coupled_dim must be >= 2")
        derived = None
        if self.tau_h is not None or self.lam is not None:
            if self.tau_h is None or self.lam is None:
                raise ConfigError("tau_h and lam must be given together")
            if not (self.tau_h > 0 and self.lam >= 0):
                raise ConfigError("need tau_h > 0 and lam >= 0")
            derived = self.coupled_dim * float(self.tau_h) * float(self.lam) ** 2
        if self.rate is None:
            if derived is None:
                raise ConfigError("give rate, or tau_h and lam")
            object.__setattr__(self, "rate", derived)
        else:
            if self.rate < 0:
                raise ConfigError("rate must be >= 0")
            if derived is not None and not math.isclose(
                    self.rate, derived, rel_tol=1e-12, abs_tol=1e-14):
                raise ConfigError(
                    f"rate {self.rate} disagrees with coupled_dim * tau_h * "
                    f"lam**2 = {derived}")


def _split_dims(params, rho0):
    rho0 = validate_density(rho0, tol=1e-9)
    d = rho0.shape[0]
    m1 = int(params.coupled_dim)
    if d % m1:
        raise DimensionError(f"state dimension {d} is not a multiple of the "
                             f"coupled dimension {m1}")
    return rho0, m1, d // m1


def relaxation_target(params, rho0):
    """Stationary state: mixed on the coupled factor, marginal kept beside it."""
    rho0, m1, m2 = _split_dims(params, rho0)
    if m2 == 1:
        return np.eye(m1, dtype=complex) / m1
    rest = partial_trace(rho0, (m1, m2), keep=(1,))
    return np.kron(np.eye(m1, dtype=complex) / m1, rest)


def solve_spectator(params, rho0, t):
    """Closed-form solution with a spectator factor along for the ride."""
    if t < 0:
        raise ConfigError(f"time must be >= 0, got {t}")
    rho0, _, _ = _split_dims(params, rho0)
    target = relaxation_target(params, rho0)
    return np.exp(-params.rate * t) * (rho0 - target) + target


def solve_plain(params, rho0, t):
    """Closed-form solution when the whole central system is coupled."""
    rho0, m1, m2 = _split_dims(params, rho0)
    if m2 != 1:
        raise DimensionError(f"state dimension {rho0.shape[0]} does not match "
                             f"coupled_dim {m1}; use solve_spectator")
    return solve_spectator(params, rho0, t)


def integrate_numeric(params, rho0, t, dt=None):
    """Fixed-step RK4 integration of the relaxation equation.

    Exists to cross-check the closed form; dt defaults to t/1000 and must
    not exceed t.
    """
    if t < 0:
        raise ConfigError(f"time must be >= 0, got {t}")
    rho0, _, _ = _split_dims(params, rho0)
    if t == 0:
        return rho0
    if dt is None:
        dt = t / 1000.0
    if not 0 < dt <= t:
        raise ConfigError(f"dt must satisfy 0 < dt <= t, got dt={dt}, t={t}")
    rate = params.rate
    target = relaxation_target(params, rho0)  # constant along the flow

    def rhs(rho):
        return -rate * (rho - target)

    n = int(round(t / dt))
    h = t / n
    rho = rho0.copy()
    for _ in range(n):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * h * k1)
        k3 = rhs(rho + 0.5 * h * k2)
        k4 = rhs(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def werner_beta(params, t):
    """Bell-state weight of the relaxing two-level coupled factor.

    Starting from a Bell pair with a spectator qubit, the Markovian solution
    stays of Werner form with weight exp(-rate * t).
    """
    if int(params.coupled_dim) != 2:
        raise ConfigError("werner form needs a two-level coupled factor")
    if t < 0:
        raise ConfigError(f"time must be >= 0, got {t}")
    return float(np.exp(-params.rate * t))
