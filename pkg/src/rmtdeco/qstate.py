"""Finite-dimensional state and operator helpers.

Conventions used across the package: hbar = 1, composite indices are
big-endian (the first factor of a tensor product varies slowest, i.e.
``kron(A, B)`` places A on the slow index), and density matrices are plain
complex ndarrays that have passed :func:`validate_density`.
"""

from __future__ import annotations

import numpy as np

from .errors import DensityValidationError, DimensionError

# Largest total Hilbert-space dimension any helper will build. Big enough for
# a 4-level system against a 1024-level environment, small enough that a typo
# in a config cannot ask for terabytes.
MAX_DIM = 4096


def tensor_product(*ops):
    """Kronecker product of one or more operators (or state vectors).

    Factors combine big-endian: the first argument varies slowest in the
    composite index.
    """
    if not ops:
        raise ValueError("tensor_product needs at least one factor")
    total = 1
    for op in ops:
        total *= np.asarray(op).shape[0]
        if total > MAX_DIM:
            raise DimensionError(
                f"total dimension {total} exceeds MAX_DIM={MAX_DIM}")
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op))
    return out


def partial_trace(rho, dims, keep):
    """Trace out all tensor factors not listed in ``keep``.

    Parameters
    ----------
    rho : ndarray
        Square matrix on the full product space.
    dims : sequence of int
        Dimension of each tensor factor, slowest index first.
    keep : int or iterable of int
        Indices (into ``dims``) of the factors to keep, in their original
        order.

    Returns
    -------
    ndarray of shape (prod(kept dims), prod(kept dims)).
    """
    rho = np.asarray(rho)
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise DimensionError(f"factor dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionError(
            f"state has shape {rho.shape}, but prod(dims)={total}")
    if np.isscalar(keep):
        keep = [keep]
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep={keep} out of range for {len(dims)} factors")

    k = len(dims)
    r = rho.reshape(dims + dims)
    row = list(range(k))
    col = [i + k if i in keep else i for i in range(k)]
    out = [i for i in keep] + [i + k for i in keep]
    kept = int(np.prod([dims[i] for i in keep]))
    return np.einsum(r, row + col, out).reshape(kept, kept)


def hermitian_eigensystem(h, tol=1e-10):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Refuses input whose anti-Hermitian part exceeds ``tol`` relative to the
    matrix scale, so silent garbage-in cannot propagate.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if dev > tol * scale:
        raise ValueError(
            f"matrix is not Hermitian: max|h - h^dag| = {dev:.3e} "
            f"(tolerance {tol * scale:.3e})")
    return np.linalg.eigh(h)


def validate_density(m, tol=1e-12):
    """Check the density-matrix invariants and return a cleaned copy.

    Checks Hermiticity and unit trace within ``tol`` and positivity down to
    ``-100*tol`` (eigenvalues may dip slightly negative from round-off). On
    success returns the Hermitian part with the trace renormalized exactly
    to 1; on failure raises DensityValidationError saying which invariant
    broke and by how much.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")

    herm_dev = float(np.max(np.abs(m - m.conj().T)))
    if herm_dev > tol:
        raise DensityValidationError(
            f"not Hermitian: max|rho - rho^dag| = {herm_dev:.3e} > {tol:.1e}",
            hermiticity_error=herm_dev)

    tr = complex(np.trace(m))
    trace_dev = abs(tr - 1.0)
    if trace_dev > tol:
        raise DensityValidationError(
            f"trace deviates from 1 by {trace_dev:.3e} > {tol:.1e}",
            trace_error=trace_dev)

    h = 0.5 * (m + m.conj().T)
    w = np.linalg.eigvalsh(h)
    floor = -100.0 * tol
    if w[0] < floor:
        raise DensityValidationError(
            f"not positive semidefinite: min eigenvalue {w[0]:.3e} < {floor:.1e}",
            min_eigenvalue=float(w[0]))

    return h / np.trace(h).real


def projector(psi):
    """|psi><psi| for a normalized state vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    n = np.linalg.norm(psi)
    if n == 0:
        raise ValueError("cannot project the zero vector")
    psi = psi / n
    return np.outer(psi, psi.conj())


def basis_state(dim, index):
    """Computational basis vector |index> in the given dimension."""
    if not 0 <= index < dim:
        raise DimensionError(f"basis index {index} out of range for dim {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def bell_state():
    """(|00> + |11>)/sqrt(2) on two qubits."""
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1.0 / np.sqrt(2.0)
    return v
