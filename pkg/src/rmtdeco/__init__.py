"""Random-matrix decoherence toolkit.

Exact echo dynamics of a small central system coupled to a random-matrix
environment, second-order (linear-response) predictions for the averaged
state and purities, the Markovian relaxation benchmark, and reproducible
Monte-Carlo studies built on top of them.
"""

from .ensembles import (BASE_STREAM, RandomSeed, Spectrum, derive_root,
                        explicit_spectrum, heisenberg_time, rng_from_seed,
                        sample_coupling, sample_goe, sample_gue,
                        sample_spectrum, unfold)
from .errors import (ConfigError, DensityValidationError, DimensionError,
                     LinearResponseRegimeError, NumericalRegimeError)
from .qstate import (MAX_DIM, basis_state, bell_state, hermitian_eigensystem,
                     partial_trace, projector, tensor_product,
                     validate_density)
from .observables import (WernerDiagnostics, concurrence, purity,
                          von_neumann_entropy, werner_diagnostics,
                          werner_state)
from .dynamics import (EnsembleConfig, HamiltonianSpec, Propagator,
                       StateEnsemble, assemble_hamiltonian, echo_operator,
                       ensemble_mean, evolve, generate_ensemble,
                       generate_ensemble_series, make_propagator,
                       reduced_state, shared_components)
from .linear_response import (CorrelationKernel, DeltaKernel, PurityCurves,
                              Quadrature, average_purity, average_state,
                              dephasing_map, fgr_delta_kernel, gain_term,
                              kernel_matrix, kernel_scalar, loss_term,
                              matrix_weight_survival, purity_gap,
                              purity_of_average, purity_report,
                              spectator_dephasing_map, survival_function)
from .master_equation import (MasterParams, integrate_numeric,
                              relaxation_target, solve_plain,
                              solve_spectator, werner_beta)
from .experiments import (ExperimentConfig, StudyResult, export_result,
                          load_manifest_config, run_convergence_study,
                          run_ensemble_summary, run_layer_comparison,
                          run_study, run_werner_study)

__version__ = "0.1.0"

__all__ = [
    "BASE_STREAM", "RandomSeed", "Spectrum", "derive_root",
    "explicit_spectrum", "heisenberg_time", "rng_from_seed",
    "sample_coupling", "sample_goe", "sample_gue", "sample_spectrum",
    "unfold",
    "ConfigError", "DensityValidationError", "DimensionError",
    "LinearResponseRegimeError", "NumericalRegimeError",
    "MAX_DIM", "basis_state", "bell_state", "hermitian_eigensystem",
    "partial_trace", "projector", "tensor_product", "validate_density",
    "WernerDiagnostics", "concurrence", "purity", "von_neumann_entropy",
    "werner_diagnostics", "werner_state",
    "EnsembleConfig", "HamiltonianSpec", "Propagator", "StateEnsemble",
    "assemble_hamiltonian", "echo_operator", "ensemble_mean", "evolve",
    "generate_ensemble", "generate_ensemble_series", "make_propagator",
    "reduced_state", "shared_components",
    "CorrelationKernel", "DeltaKernel", "PurityCurves", "Quadrature",
    "average_purity", "average_state", "dephasing_map", "fgr_delta_kernel",
    "gain_term", "kernel_matrix", "kernel_scalar", "loss_term",
    "matrix_weight_survival", "purity_gap", "purity_of_average",
    "purity_report", "spectator_dephasing_map", "survival_function",
    "MasterParams", "integrate_numeric", "relaxation_target", "solve_plain",
    "solve_spectator", "werner_beta",
    "ExperimentConfig", "StudyResult", "export_result",
    "load_manifest_config", "run_convergence_study", "run_ensemble_summary",
    "run_layer_comparison", "run_study", "run_werner_study",
    "__version__",
]
