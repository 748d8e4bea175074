"""Characterization and classical correction of noisy quantum readout.

The workflow mirrors how the toolkit is meant to be used on hardware:
reconstruct the detector from calibration counts (:mod:`.tomography`),
split its noise into a stochastic part and a coherent residual
(:mod:`.noise`), quantify detector quality (:mod:`.distances`), correct
measured statistics with a certified error budget (:mod:`.mitigation`),
and validate the whole pipeline on synthetic experiments
(:mod:`.simulate`).
"""

__version__ = "0.1.0"

from ._accel import HAS_NUMBA
from .distances import (
    DistanceBound,
    classical_operational_distance,
    operational_distance_bound,
    operational_distance_exact,
    operational_distance_lower,
    subadditive_upper,
    tv_distance,
    uncorrelated_product_distance,
)
from .fixtures import FIXTURE_NAMES, device_povm, fixture_path
from .mitigation import (
    ErrorBudget,
    MitigationReport,
    assess,
    correct,
    delta_bound,
    mitigate,
    project_to_simplex,
    statistical_epsilon,
)
from .noise import (
    Correction,
    NoiseDecomposition,
    classical_part,
    correction_matrix,
    one_to_one_norm,
    product_stochastic,
    single_qubit_stochastic,
)
from .povm import (
    born_probabilities,
    computational_basis_povm,
    diagonal_projective,
    readout_params,
    tensor_povm,
    validate_povm,
)
from .simulate import (
    FractionReport,
    coherent_readout_povm,
    coherent_sweep,
    fraction_f,
    haar_state,
    max_coherent_magnitude,
    sample_counts,
    synthetic_calibration,
)
from .tomography import (
    CalibrationRecord,
    MleDiagnostics,
    calibration_matrices,
    linear_inversion,
    mle_fit,
    pauli_state,
    probe_labels,
)

__all__ = [
    "HAS_NUMBA",
    "__version__",
    "DistanceBound",
    "classical_operational_distance",
    "operational_distance_bound",
    "operational_distance_exact",
    "operational_distance_lower",
    "subadditive_upper",
    "tv_distance",
    "uncorrelated_product_distance",
    "FIXTURE_NAMES",
    "device_povm",
    "fixture_path",
    "ErrorBudget",
    "MitigationReport",
    "assess",
    "correct",
    "delta_bound",
    "mitigate",
    "project_to_simplex",
    "statistical_epsilon",
    "Correction",
    "NoiseDecomposition",
    "classical_part",
    "correction_matrix",
    "one_to_one_norm",
    "product_stochastic",
    "single_qubit_stochastic",
    "born_probabilities",
    "computational_basis_povm",
    "diagonal_projective",
    "readout_params",
    "tensor_povm",
    "validate_povm",
    "FractionReport",
    "coherent_readout_povm",
    "coherent_sweep",
    "fraction_f",
    "haar_state",
    "max_coherent_magnitude",
    "sample_counts",
    "synthetic_calibration",
    "CalibrationRecord",
    "MleDiagnostics",
    "calibration_matrices",
    "linear_inversion",
    "mle_fit",
    "pauli_state",
    "probe_labels",
]
