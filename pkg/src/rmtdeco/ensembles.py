"""Random-matrix sampling, spectra, and unfolding.

Normalization conventions (used by the response formulas without extra
constants): GUE has <|V_ij|^2> = 1 for every entry (off-diagonal real and
imaginary parts of variance 1/2 each, diagonal real of variance 1); GOE has
off-diagonal variance 1 and diagonal variance 2. Sampled spectra are unfolded
to unit mean level spacing, so the Heisenberg time is 2*pi for all of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

SPECTRUM_KINDS = ("poisson", "goe", "gue", "explicit")

# Stream reserved for draws shared by all realizations of an ensemble.
BASE_STREAM = 2**64 - 1


@dataclass(frozen=True)
class RandomSeed:
    """Deterministic stream address: (root seed, stream index).

    Equal fields give bit-identical draws; distinct stream indices under one
    root give independent streams. Realization i of an ensemble uses stream
    index i.
    """
    root_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("root_seed", "stream_index"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2**64:
                raise ConfigError(f"{name} must be a u64, got {v}")


def rng_from_seed(seed: RandomSeed) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed.root_seed),
                                spawn_key=(int(seed.stream_index),))
    return np.random.Generator(np.random.PCG64(ss))


def derive_root(root_seed: int, *tags: int) -> int:
    """A u64 root for a sub-study, mixed from the parent root and integer tags."""
    ss = np.random.SeedSequence(entropy=(int(root_seed),) + tuple(int(t) for t in tags))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _check_n(n):
    n = int(n)
    if n < 1:
        raise DimensionError(f"matrix dimension must be >= 1, got {n}")
    return n


def _gue(n, rng):
    a = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    # (M + M^dag)/sqrt(2) with M = (a + i b)/sqrt(2):
    # off-diagonal re/im variance 1/2 each, diagonal real variance 1.
    return 0.5 * (a + a.T) + 0.5j * (b - b.T)


def _goe(n, rng):
    a = rng.standard_normal((n, n))
    return (a + a.T) / np.sqrt(2.0)


def sample_gue(n, seed: RandomSeed):
    """n x n GUE matrix with <|V_ij|^2> = 1 entrywise."""
    return _gue(_check_n(n), rng_from_seed(seed))


def sample_goe(n, seed: RandomSeed):
    """n x n GOE matrix: off-diagonal variance 1, diagonal variance 2."""
    return _goe(_check_n(n), rng_from_seed(seed))


def sample_coupling(kind, n, seed: RandomSeed):
    """Coupling matrix from the named ensemble ('gue' or 'goe')."""
    return _coupling(kind, _check_n(n), rng_from_seed(seed))


def _coupling(kind, n, rng):
    if kind == "gue":
        return _gue(n, rng)
    if kind == "goe":
        return _goe(n, rng)
    raise ConfigError(f"unknown coupling ensemble {kind!r}")


@dataclass(frozen=True)
class Spectrum:
    """Sorted energies plus the name of the generating recipe."""
    energies: np.ndarray
    kind: str

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise ConfigError("a spectrum needs at least two levels")
        if np.any(np.diff(e) < 0):
            raise ConfigError("spectrum energies must be sorted ascending")
        if self.kind not in SPECTRUM_KINDS:
            raise ConfigError(f"unknown spectrum kind {self.kind!r}")
        object.__setattr__(self, "energies", e)

    @property
    def size(self):
        return self.energies.size


def _central_window(n):
    lo = int(np.floor(0.1 * (n - 1)))
    hi = int(np.ceil(0.9 * (n - 1)))
    if hi <= lo:
        lo, hi = 0, n - 1
    return lo, hi


def _central_spacing(x):
    lo, hi = _central_window(x.size)
    return (x[hi] - x[lo]) / (hi - lo)


def _affine_map(x, target):
    d = _central_spacing(x)
    if d <= 0:
        raise ConfigError("cannot unfold a spectrum with zero central width")
    return (x - x[0]) * (target / d)


def _semicircle_map(x, target):
    # Integrated semicircle density with radius estimated from the sample
    # (variance of a semicircle of radius R is R^2/4).
    mu = x.mean()
    r = 2.0 * np.sqrt(np.mean((x - mu) ** 2))
    if r <= 0:
        raise ConfigError("cannot unfold a spectrum with zero width")
    u = np.clip((x - mu) / r, -1.0, 1.0)
    n = x.size
    eta = n * (0.5 + (u * np.sqrt(1.0 - u * u) + np.arcsin(u)) / np.pi)
    return _affine_map(eta, target)


def _spacing_cv(x):
    s = np.diff(x)
    lo, hi = _central_window(x.size)
    s = s[lo:hi]
    m = s.mean()
    return np.inf if m <= 0 else float(s.std() / m)


def unfold(raw, target_mean_spacing=1.0, method="auto"):
    """Map raw energies to a spectrum of uniform mean density.

    The central 80% of the output has mean nearest-neighbour spacing exactly
    ``target_mean_spacing``; the lowest level is anchored at 0. ``method``
    chooses the integrated-density model: "semicircle" (raw GOE/GUE
    eigenvalues), "affine" (input already of uniform density), or "auto",
    which evaluates both and keeps the one producing the more uniform central
    spacings. Re-applying auto unfolding to an unfolded spectrum therefore
    reduces to the affine map and is a near identity.
    """
    x = np.sort(np.asarray(raw, dtype=float).ravel())
    if x.size < 2:
        raise ConfigError("need at least two levels to unfold")
    t = float(target_mean_spacing)
    if t <= 0:
        raise ConfigError(f"target mean spacing must be positive, got {t}")
    if method == "affine":
        return _affine_map(x, t)
    if method == "semicircle":
        return _semicircle_map(x, t)
    if method != "auto":
        raise ConfigError(f"unknown unfolding method {method!r}")
    aff = _affine_map(x, t)
    semi = _semicircle_map(x, t)
    # Prefer affine on a tie; correct unfolding minimizes the systematic
    # density variation left in the spacings.
    return aff if _spacing_cv(aff) <= _spacing_cv(semi) else semi


def explicit_spectrum(energies):
    """Wrap user-provided energies unchanged (sorted ascending)."""
    e = np.sort(np.asarray(energies, dtype=float).ravel())
    return Spectrum(energies=e, kind="explicit")


def sample_spectrum(kind, n, seed: RandomSeed) -> Spectrum:
    """Sample an n-level spectrum with unit mean spacing.

    Kinds: "poisson" (ordered partial sums of unit-mean exponentials, then
    affine-normalized), "goe"/"gue" (eigenvalues of a sampled matrix, unfolded
    with the semicircle integrated density). For "explicit" use
    :func:`explicit_spectrum`.
    """
    return _spectrum(kind, _check_n(n), rng_from_seed(seed))


def _spectrum(kind, n, rng):
    if n < 2:
        raise DimensionError("a spectrum needs at least two levels")
    if kind == "poisson":
        raw = np.cumsum(rng.exponential(scale=1.0, size=n))
        return Spectrum(unfold(raw, method="affine"), kind="poisson")
    if kind in ("goe", "gue"):
        raw = np.linalg.eigvalsh(_coupling(kind, n, rng))
        return Spectrum(unfold(raw, method="semicircle"), kind=kind)
    if kind == "explicit":
        raise ConfigError("explicit spectra are not sampled; "
                          "use explicit_spectrum(energies)")
    raise ConfigError(f"unknown spectrum kind {kind!r}")


def heisenberg_time(spectrum) -> float:
    """2*pi over the mean level spacing of the central 80% of the spectrum."""
    e = spectrum.energies if isinstance(spectrum, Spectrum) else \
        np.asarray(spectrum, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise ConfigError("need at least two levels")
    d = _central_spacing(e)
    if d <= 0:
        raise ConfigError("mean level spacing is zero")
    return 2.0 * np.pi / d
