"""Random two-qubit states, Bell-functional maximization, and fidelity tools."""

from .chsh import (
    CLASSICAL_BOUND,
    QUANTUM_BOUND,
    BellResult,
    MeasurementSetting,
    ProbabilityTable,
    SettingsQuad,
    bell_operator,
    bell_value,
    born_probabilities,
    correlation,
    correlation_matrix,
    horodecki_max,
    observable,
    optimize_bell,
)
from .errors import (
    BadDimension,
    BellkitError,
    BoundViolation,
    DegenerateSample,
    DimensionMismatch,
    NotConverged,
    NotHermitian,
    NotPSD,
    NotUnitary,
    SingularMarginal,
)
from .experiments import (
    EnsembleStats,
    Histogram,
    NeighborhoodSpec,
    TargetState,
    central_moments,
    fidelity_pdf,
    run_scatter,
    run_typicality,
    sample_neighborhood,
)
from .fidelity import bures_distance, check_fvg, fidelity, FidelityRecord, trace_distance
from .linalg import DensityMatrix, Spectrum, partial_trace, realign
from .sampling import (
    EnsembleKind,
    RngStream,
    bures_state,
    filter_normal_form,
    filtered_state,
    ginibre,
    haar_unitary,
    hs_state,
    operator_schmidt_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BadDimension",
    "BellkitError",
    "BellResult",
    "BoundViolation",
    "CLASSICAL_BOUND",
    "DegenerateSample",
    "DensityMatrix",
    "DimensionMismatch",
    "EnsembleKind",
    "EnsembleStats",
    "FidelityRecord",
    "Histogram",
    "MeasurementSetting",
    "NeighborhoodSpec",
    "NotConverged",
    "NotHermitian",
    "NotPSD",
    "NotUnitary",
    "ProbabilityTable",
    "QUANTUM_BOUND",
    "RngStream",
    "SettingsQuad",
    "SingularMarginal",
    "Spectrum",
    "TargetState",
    "bell_operator",
    "bell_value",
    "born_probabilities",
    "bures_distance",
    "bures_state",
    "central_moments",
    "check_fvg",
    "correlation",
    "correlation_matrix",
    "fidelity",
    "fidelity_pdf",
    "filter_normal_form",
    "filtered_state",
    "ginibre",
    "haar_unitary",
    "horodecki_max",
    "hs_state",
    "observable",
    "operator_schmidt_spectrum",
    "optimize_bell",
    "partial_trace",
    "realign",
    "run_scatter",
    "run_typicality",
    "sample_neighborhood",
    "trace_distance",
    "__version__",
]
