"""Reproducible studies: config files, runners, and tabular export.

A study is described by a flat ``key = value`` config (see flatcfg), run
deterministically from a root seed, and exported as a CSV table plus a JSON
schema sidecar and a plain-text run manifest that embeds the canonical
config. Re-running the same config produces byte-identical files; nothing
time- or host-dependent is written.

Studies
-------
convergence
    Sweep the environment dimension. For each size, compare Monte-Carlo
    purity statistics against the second-order predictions.
werner
    Partition the realizations of a Bell pair with a spectator into groups
    of several sizes and measure how far each group-mean state is from
    Werner form (sigma_werner), plus the recovered Werner weight.
layers
    One scenario, three descriptions: exact Monte-Carlo, second-order
    kernel integrals, and the Markovian relaxation benchmark. The coupling
    matrix is the only resampled component here, so the response integrals
    refer to the same fixed environment the ensemble saw; the config's
    resample switches are forced accordingly.
ensemble
    Plain summary table of one Monte-Carlo ensemble over the requested
    times.

Times in configs are in units of the environment Heisenberg time by default
(sampled spectra are unfolded to unit mean spacing, so that unit is 2*pi);
set time_unit = absolute to bypass the conversion.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, fields

import numpy as np

from . import flatcfg
from .dynamics import (EnsembleConfig, HamiltonianSpec, ensemble_mean,
                       generate_ensemble_series, shared_components)
from .ensembles import RandomSeed, derive_root, heisenberg_time, rng_from_seed
from .errors import ConfigError
from .linear_response import Quadrature, purity_report
from .master_equation import MasterParams, solve_plain, solve_spectator
from .observables import (concurrence, purity, von_neumann_entropy,
                          werner_diagnostics)

__all__ = ["ExperimentConfig", "StudyResult", "export_result",
           "load_manifest_config", "run_convergence_study",
           "run_werner_study", "run_layer_comparison",
           "run_ensemble_summary", "run_study"]

STUDY_KINDS = ("convergence", "werner", "layers", "ensemble")

HEISENBERG_UNIT = 2.0 * math.pi  # sampled spectra are unfolded to spacing 1

# seed-derivation tags, one namespace per consumer
_TAG_CONVERGENCE = 1
_TAG_WERNER = 2
_TAG_BOOTSTRAP = 4


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one study.

    Study-specific fields: ``env_dims`` only for convergence, ``env_dim``
    for everything else, ``deltas`` and ``partition_sizes`` only for werner
    (each partition size must divide ``realizations``). The layers study
    pins the resample switches to coupling-only and the config reflects the
    pinned values.
    """
    study: str = "ensemble"
    topology: str = "spectator"
    central_dims: tuple = (2, 2)
    env_dim: int = None
    env_dims: tuple = None
    env_kind: str = "gue"
    coupling_kind: str = "gue"
    lam: float = 0.03
    central_splitting: float = 0.0
    deltas: tuple = None
    central_state: str = "bell"
    env_state: str = "random_phase"
    picture: str = "interaction"
    resample_coupling: bool = True
    resample_env_spectrum: bool = True
    resample_env_state: bool = True
    realizations: int = 100
    partition_sizes: tuple = None
    times: tuple = (0.5, 1.0)
    time_unit: str = "heisenberg"
    quad_step: float = None
    root_seed: int = 0

    def __post_init__(self):
        if self.study not in STUDY_KINDS:
            raise ConfigError(f"unknown study {self.study!r}; expected one "
                              f"of {STUDY_KINDS}")
        for name in ("central_dims", "times"):
            val = getattr(self, name)
            object.__setattr__(self, name, tuple(val))
        for name in ("env_dims", "deltas", "partition_sizes"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, tuple(val))
        if not self.times:
            raise ConfigError("times must be non-empty")
        if any(t < 0 for t in self.times):
            raise ConfigError("times must be >= 0")
        if self.time_unit not in ("heisenberg", "absolute"):
            raise ConfigError(f"unknown time_unit {self.time_unit!r}")
        if self.quad_step is not None and not self.quad_step > 0:
            raise ConfigError("quad_step must be > 0")

        if self.study == "convergence":
            if not self.env_dims:
                raise ConfigError("convergence needs env_dims")
            if self.env_dim is not None:
                raise ConfigError("convergence sweeps env_dims; drop env_dim")
        else:
            if self.env_dims is not None:
                raise ConfigError(f"env_dims is only for the convergence "
                                  f"study, not {self.study!r}")
            if self.env_dim is None:
                raise ConfigError(f"{self.study} study needs env_dim")

        if self.study == "werner":
            if not self.partition_sizes:
                raise ConfigError("werner needs partition_sizes")
            if self.deltas is None:
                object.__setattr__(self, "deltas", (0.0,))
            bad = [p for p in self.partition_sizes
                   if p < 2 or self.realizations % p]
            if bad:
                raise ConfigError(f"partition sizes {bad} must be >= 2 and "
                                  f"divide realizations={self.realizations}")
            if (self.topology, self.central_dims, self.central_state) != \
                    ("spectator", (2, 2), "bell"):
                raise ConfigError("werner study needs a (2, 2) spectator "
                                  "topology with central_state = bell")
            if self.central_splitting != 0.0:
                raise ConfigError("werner sweeps deltas; drop "
                                  "central_splitting")
        else:
            self._forbid("deltas", "partition_sizes")

        if self.study == "layers":
            # the comparison is only meaningful against a fixed environment
            object.__setattr__(self, "resample_coupling", True)
            object.__setattr__(self, "resample_env_spectrum", False)
            object.__setattr__(self, "resample_env_state", False)

        # delegate the rest of the validation to the ensemble layer
        for delta in (self.deltas or (self.central_splitting,)):
            self.ensemble_config(
                env_dim=(self.env_dims or (self.env_dim,))[0], delta=delta)

    def _forbid(self, *names):
        for name in names:
            if getattr(self, name) is not None:
                raise ConfigError(f"{name} is not used by the {self.study!r} "
                                  f"study")

    # -- derived pieces ----------------------------------------------------

    def resolved_times(self):
        """Times in absolute units."""
        scale = HEISENBERG_UNIT if self.time_unit == "heisenberg" else 1.0
        return tuple(scale * t for t in self.times)

    def ensemble_config(self, env_dim=None, delta=None, root_seed=None):
        """The EnsembleConfig for one cell of the study grid."""
        return EnsembleConfig(
            topology=self.topology,
            central_dims=self.central_dims,
            env_dim=int(env_dim if env_dim is not None else self.env_dim),
            env_kind=self.env_kind,
            coupling_kind=self.coupling_kind,
            lam=self.lam,
            central_splitting=(self.central_splitting if delta is None
                               else float(delta)),
            central_state=self.central_state,
            env_state=self.env_state,
            picture=self.picture,
            resample_coupling=self.resample_coupling,
            resample_env_spectrum=self.resample_env_spectrum,
            resample_env_state=self.resample_env_state,
            realizations=self.realizations,
            root_seed=(self.root_seed if root_seed is None
                       else int(root_seed)),
        )

    # -- serialization -----------------------------------------------------

    def to_mapping(self):
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if val is None:
                continue
            out[f.name] = list(val) if isinstance(val, tuple) else val
        return out

    def to_text(self):
        return flatcfg.to_text(self.to_mapping())

    def config_hash(self):
        return flatcfg.text_hash(self.to_text())

    @classmethod
    def from_text(cls, text):
        raw = flatcfg.parse_text(text)
        kwargs = {}
        conv = {
            "study": flatcfg.as_str, "topology": flatcfg.as_str,
            "central_dims": flatcfg.as_ints, "env_dim": flatcfg.as_int,
            "env_dims": flatcfg.as_ints, "env_kind": flatcfg.as_str,
            "coupling_kind": flatcfg.as_str, "lam": flatcfg.as_float,
            "central_splitting": flatcfg.as_float,
            "deltas": flatcfg.as_floats, "central_state": flatcfg.as_str,
            "env_state": flatcfg.as_str, "picture": flatcfg.as_str,
            "resample_coupling": flatcfg.as_bool,
            "resample_env_spectrum": flatcfg.as_bool,
            "resample_env_state": flatcfg.as_bool,
            "realizations": flatcfg.as_int,
            "partition_sizes": flatcfg.as_ints,
            "times": flatcfg.as_floats, "time_unit": flatcfg.as_str,
            "quad_step": flatcfg.as_float, "root_seed": flatcfg.as_int,
        }
        for key in list(raw):
            if key not in conv:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = conv[key](raw.pop(key), key)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())


@dataclass(frozen=True)
class StudyResult:
    """Tabular outcome of a study plus the config that produced it."""
    study: str
    columns: tuple
    rows: tuple
    config_text: str
    config_hash: str


def _block_bootstrap_se(values, seed, n_blocks=50, n_boot=200):
    """Standard error of the mean via a contiguous-block bootstrap.

    Realizations are independent here, but blocks keep the estimate honest
    if a caller ever feeds correlated per-realization statistics.
    """
    values = np.asarray(values, dtype=float)
    n_blocks = min(int(n_blocks), values.size)
    if n_blocks < 2:
        return 0.0
    chunks = np.array_split(values, n_blocks)
    means = np.array([c.mean() for c in chunks])
    sizes = np.array([c.size for c in chunks], dtype=float)
    rng = rng_from_seed(RandomSeed(seed, 0))
    draws = rng.integers(0, n_blocks, size=(int(n_boot), n_blocks))
    boot = (means[draws] * sizes[draws]).sum(axis=1) / sizes[draws].sum(axis=1)
    return float(np.std(boot, ddof=1))


def _beta_hat_or_nan(state):
    if state.shape != (4, 4):
        return float("nan")
    try:
        return float(werner_diagnostics(state).beta_hat)
    except ValueError:
        return float("nan")


def _lr_env_weights(config):
    return "uniform" if config.env_state == "random_phase" else "basis_center"


def _lr_curves(config, ecfg, times_abs):
    env_spec = shared_components(ecfg)[0]
    hspec = HamiltonianSpec(central_spectra=ecfg.central_spectra_arrays(),
                            env=env_spec, lam=float(config.lam))
    quad = Quadrature(step=config.quad_step)
    return env_spec, purity_report(hspec, ecfg.central_vector(), times_abs,
                                   env_weights=_lr_env_weights(config),
                                   quad=quad)


def run_convergence_study(config: ExperimentConfig, workers=0) -> StudyResult:
    """Monte-Carlo statistics against second-order predictions over env sizes.

    Besides the purity pair, the table carries the mean-vs-mean-state gaps
    of entropy and concurrence (the latter only for a two-qubit central
    system, nan otherwise), whose decay with the environment size is the
    main convergence diagnostic.
    """
    if config.study != "convergence":
        raise ConfigError(f"config is for study {config.study!r}")
    times_abs = config.resolved_times()
    rows = []
    for j, n in enumerate(config.env_dims):
        ecfg = config.ensemble_config(
            env_dim=n, root_seed=derive_root(config.root_seed,
                                             _TAG_CONVERGENCE, j))
        series = generate_ensemble_series(ecfg, times_abs, workers=workers)
        _, curves = _lr_curves(config, ecfg, times_abs)
        two_qubit = ecfg.m == 4
        for k, ens in enumerate(series):
            purities = np.array([purity(s) for s in ens.states])
            se = _block_bootstrap_se(
                purities, derive_root(config.root_seed, _TAG_BOOTSTRAP, j, k))
            mean_state = ensemble_mean(ens)
            entropies = np.array([von_neumann_entropy(s)
                                  for s in ens.states])
            if two_qubit:
                concs = np.array([concurrence(s) for s in ens.states])
                conc_mean, conc_of_mean = (float(concs.mean()),
                                           float(concurrence(mean_state)))
            else:
                conc_mean = conc_of_mean = float("nan")
            rows.append((
                int(n), config.times[k], times_abs[k], config.realizations,
                float(purities.mean()), se,
                float(purity(mean_state)),
                float(entropies.mean()),
                float(von_neumann_entropy(mean_state)),
                conc_mean, conc_of_mean,
                float(curves.average_purity[k]),
                float(curves.purity_of_average[k]),
                float(curves.purity_gap[k]),
            ))
    columns = ("env_dim", "time", "time_abs", "realizations",
               "mc_average_purity", "mc_average_purity_se",
               "mc_purity_of_mean", "mc_average_entropy",
               "mc_entropy_of_mean", "mc_average_concurrence",
               "mc_concurrence_of_mean", "lr_average_purity",
               "lr_purity_of_average", "lr_purity_gap")
    return StudyResult(study=config.study, columns=columns, rows=tuple(rows),
                       config_text=config.to_text(),
                       config_hash=config.config_hash())


def run_werner_study(config: ExperimentConfig, workers=0) -> StudyResult:
    """Distance from Werner form of partition-mean states, per group size."""
    if config.study != "werner":
        raise ConfigError(f"config is for study {config.study!r}")
    times_abs = config.resolved_times()
    rows = []
    for di, delta in enumerate(config.deltas):
        ecfg = config.ensemble_config(
            delta=delta, root_seed=derive_root(config.root_seed,
                                               _TAG_WERNER, di))
        series = generate_ensemble_series(ecfg, times_abs, workers=workers)
        for k, ens in enumerate(series):
            for n_par in config.partition_sizes:
                n_groups = config.realizations // n_par
                groups = ens.states.reshape(n_groups, n_par, 4, 4).mean(axis=1)
                diags = [werner_diagnostics(g) for g in groups]
                sigma = np.array([d.sigma_werner for d in diags])
                beta = np.array([d.beta_hat for d in diags])
                conc = np.array([d.dominant_concurrence for d in diags])
                pur = np.array([purity(g) for g in groups])
                sig_se = (float(np.std(sigma, ddof=1) / np.sqrt(n_groups))
                          if n_groups > 1 else 0.0)
                rows.append((
                    float(delta), config.times[k], times_abs[k],
                    int(n_par), int(n_groups),
                    float(sigma.mean()), sig_se, float(beta.mean()),
                    float(conc.mean()), float(pur.mean()),
                ))
    columns = ("delta", "time", "time_abs", "partition_size", "groups",
               "sigma_werner_mean", "sigma_werner_se", "beta_hat_mean",
               "dominant_concurrence_mean", "mean_state_purity")
    return StudyResult(study=config.study, columns=columns, rows=tuple(rows),
                       config_text=config.to_text(),
                       config_hash=config.config_hash())


def run_layer_comparison(config: ExperimentConfig, workers=0) -> StudyResult:
    """Exact sampling vs kernel integrals vs Markovian benchmark."""
    if config.study != "layers":
        raise ConfigError(f"config is for study {config.study!r}")
    times_abs = config.resolved_times()
    ecfg = config.ensemble_config()
    series = generate_ensemble_series(ecfg, times_abs, workers=workers)
    env_spec, curves = _lr_curves(config, ecfg, times_abs)
    params = MasterParams(coupled_dim=config.central_dims[0],
                          tau_h=heisenberg_time(env_spec),
                          lam=float(config.lam))
    psi_c = ecfg.central_vector()
    rho0 = np.outer(psi_c, psi_c.conj())
    solve = solve_plain if config.topology == "plain" else solve_spectator
    rows = []
    for k, ens in enumerate(series):
        purities = np.array([purity(s) for s in ens.states])
        se = _block_bootstrap_se(
            purities, derive_root(config.root_seed, _TAG_BOOTSTRAP, 0, k))
        mean_state = ensemble_mean(ens)
        markov_state = solve(params, rho0, times_abs[k])
        rows.append((
            config.times[k], times_abs[k], config.realizations,
            float(purities.mean()), se, float(purity(mean_state)),
            _beta_hat_or_nan(mean_state),
            float(curves.average_purity[k]),
            float(curves.purity_of_average[k]),
            float(curves.purity_gap[k]),
            float(purity(markov_state)),
            _beta_hat_or_nan(markov_state),
        ))
    columns = ("time", "time_abs", "realizations", "mc_average_purity",
               "mc_average_purity_se", "mc_purity_of_mean", "mc_beta_hat",
               "lr_average_purity", "lr_purity_of_average", "lr_purity_gap",
               "markov_purity_of_average", "markov_beta")
    return StudyResult(study=config.study, columns=columns, rows=tuple(rows),
                       config_text=config.to_text(),
                       config_hash=config.config_hash())


def run_ensemble_summary(config: ExperimentConfig, workers=0) -> StudyResult:
    """Summary statistics of one Monte-Carlo ensemble over the times."""
    if config.study != "ensemble":
        raise ConfigError(f"config is for study {config.study!r}")
    times_abs = config.resolved_times()
    series = generate_ensemble_series(config.ensemble_config(), times_abs,
                                      workers=workers)
    rows = []
    for k, ens in enumerate(series):
        purities = np.array([purity(s) for s in ens.states])
        se = _block_bootstrap_se(
            purities, derive_root(config.root_seed, _TAG_BOOTSTRAP, 0, k))
        mean_state = ensemble_mean(ens)
        rows.append((
            config.times[k], times_abs[k], config.realizations,
            float(purities.mean()), se, float(purity(mean_state)),
            float(von_neumann_entropy(mean_state)),
            _beta_hat_or_nan(mean_state),
        ))
    columns = ("time", "time_abs", "realizations", "mc_average_purity",
               "mc_average_purity_se", "mc_purity_of_mean",
               "mc_mean_state_entropy", "mc_beta_hat")
    return StudyResult(study=config.study, columns=columns, rows=tuple(rows),
                       config_text=config.to_text(),
                       config_hash=config.config_hash())


_RUNNERS = {
    "convergence": run_convergence_study,
    "werner": run_werner_study,
    "layers": run_layer_comparison,
    "ensemble": run_ensemble_summary,
}


def run_study(config: ExperimentConfig, workers=0) -> StudyResult:
    """Dispatch to the runner matching config.study."""
    return _RUNNERS[config.study](config, workers=workers)


# ---------------------------------------------------------------------------
# Export


def _cell_text(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _dtype_name(value):
    if isinstance(value, bool):
        return "str"
    if isinstance(value, (int, np.integer)):
        return "int"
    if isinstance(value, (float, np.floating)):
        return "float"
    return "str"


def export_result(result: StudyResult, out_dir, fmt="csv"):
    """Write <study>.csv, <study>.schema.json, and run_manifest.txt.

    Everything written is a pure function of the result, so re-running the
    same config yields byte-identical files. Returns the paths written.
    """
    if fmt != "csv":
        raise ConfigError(f"unsupported format {fmt!r}; only csv is written")
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{result.study}.csv")
    schema_path = os.path.join(out_dir, f"{result.study}.schema.json")
    manifest_path = os.path.join(out_dir, "run_manifest.txt")

    lines = [",".join(result.columns)]
    for row in result.rows:
        if len(row) != len(result.columns):
            raise ConfigError("row width does not match the column list")
        lines.append(",".join(_cell_text(v) for v in row))
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

    dtypes = [_dtype_name(v) for v in result.rows[0]] if result.rows else \
        ["str"] * len(result.columns)
    schema = {
        "study": result.study,
        "config_hash": result.config_hash,
        "row_count": len(result.rows),
        "columns": [{"name": c, "dtype": d}
                    for c, d in zip(result.columns, dtypes)],
    }
    with open(schema_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(schema, indent=2, sort_keys=True) + "\n")

    from . import __version__
    header = [
        "# rmtdeco run manifest",
        f"# version: {__version__}",
        f"# study: {result.study}",
        f"# config_hash: {result.config_hash}",
        f"# table: {os.path.basename(csv_path)}",
        f"# rows: {len(result.rows)}",
    ]
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(header) + "\n\n" + result.config_text)

    return csv_path, schema_path, manifest_path


def load_manifest_config(path) -> ExperimentConfig:
    """Re-read the config embedded in a run manifest."""
    with open(path, "r", encoding="utf-8") as fh:
        return ExperimentConfig.from_text(fh.read())
