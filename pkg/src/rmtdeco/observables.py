"""State functionals: purity, entropy, concurrence, Werner diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .qstate import bell_state, partial_trace, projector, validate_density

_SY_SY = np.array([[0, 0, 0, -1],
                   [0, 0, 1, 0],
                   [0, 1, 0, 0],
                   [-1, 0, 0, 0]], dtype=complex)


def purity(rho) -> float:
    """tr(rho^2); for Hermitian rho this is the squared Frobenius norm."""
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho) ** 2).real)


def von_neumann_entropy(rho) -> float:
    """-tr(rho ln rho), natural log, 0*ln0 = 0."""
    w = np.linalg.eigvalsh(np.asarray(rho))
    w = np.clip(w.real, 0.0, 1.0)
    nz = w[w > 0]
    return float(-np.sum(nz * np.log(nz)))


def concurrence(rho) -> float:
    """Two-qubit concurrence, max(0, l1 - l2 - l3 - l4).

    The l_i are, in decreasing order, the square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy), with the complex conjugate taken in the
    computational basis. They are computed here as the singular values of
    sqrt(rho) (sy x sy) sqrt(rho)*, which is the same set but avoids taking
    square roots of near-zero eigenvalues of a non-Hermitian product, so
    separable states come out at machine-precision zero.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionError(f"concurrence needs a 4x4 state, got {rho.shape}")
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    lam = np.linalg.svd(root @ _SY_SY @ root.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def werner_state(beta, psi=None):
    """(1-beta) * I/4 + beta |psi><psi| for a maximally entangled |psi|.

    Defaults to the (|00>+|11>)/sqrt(2) Bell state. Rejects beta outside
    [0, 1] and |psi> whose one-qubit marginal is not I/2.
    """
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    psi = bell_state() if psi is None else np.asarray(psi, dtype=complex).ravel()
    if psi.size != 4:
        raise DimensionError("psi must be a two-qubit state vector")
    p = projector(psi)
    marg = partial_trace(p, (2, 2), keep=0)
    if np.max(np.abs(marg - np.eye(2) / 2)) > 1e-10:
        raise ValueError("psi is not maximally entangled "
                         "(its one-qubit marginal is not I/2)")
    return (1.0 - beta) * np.eye(4, dtype=complex) / 4.0 + beta * p


@dataclass(frozen=True)
class WernerDiagnostics:
    """How close a two-qubit state is to the Werner family.

    eigenvalues: all four, descending.
    sigma_werner: population std dev of the most degenerate eigenvalue triple.
    triple_indices: which (descending-order) eigenvalues formed that triple.
    beta_hat: (4*lambda_max - 1)/3, the Werner weight a Werner state would have.
    dominant_concurrence: concurrence of the projector onto the eigenvector
        left out of the triple.
    """
    eigenvalues: np.ndarray
    sigma_werner: float
    triple_indices: tuple
    beta_hat: float
    dominant_concurrence: float


def werner_diagnostics(rho, tie_tol=1e-14) -> WernerDiagnostics:
    """Triple-degeneracy diagnostics of a two-qubit density matrix.

    Among the four leave-one-out eigenvalue triples, picks the one with the
    smallest internal standard deviation (population convention). Ties within
    ``tie_tol`` resolve to the triple that excludes the largest eigenvalue,
    so a maximally mixed state reports the largest eigenvalue as dominant.
    """
    rho = validate_density(rho, tol=1e-9)
    if rho.shape != (4, 4):
        raise DimensionError(f"expected a two-qubit state, got {rho.shape}")
    w, v = np.linalg.eigh(rho)
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]

    stds = []
    for leave_out in range(4):
        triple = np.delete(w, leave_out)
        stds.append(float(np.std(triple)))
    stds = np.asarray(stds)
    best = float(stds.min())
    candidates = np.flatnonzero(stds <= best + tie_tol)
    # Index 0 is the largest eigenvalue; preferring it as the leave-out
    # implements the tie-break.
    leave_out = int(candidates[0])

    triple_idx = tuple(i for i in range(4) if i != leave_out)
    dom = projector(v[:, leave_out])
    return WernerDiagnostics(
        eigenvalues=w,
        sigma_werner=stds[leave_out],
        triple_indices=triple_idx,
        beta_hat=float((4.0 * w[0] - 1.0) / 3.0),
        dominant_concurrence=concurrence(dom),
    )
