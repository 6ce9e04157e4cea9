"""RT-symmetric non-Hermitian spin chains: builders, surface predictions,
exact-diagonalization sweeps and two-site entanglement diagnostics."""

from .analytic import (
    MomentumBlock,
    ParitySector,
    SurfacePrediction,
    dispersion,
    dispersion_squared,
    extremal_momentum,
    grid_spectrum_is_real,
    lattice_sum,
    momentum_block,
    reality_threshold,
)
from .eig import (
    SpectrumReport,
    SweepParam,
    SweepRecord,
    detect_onset,
    diagonalize,
    ground_state,
    verify_sufficiency,
)
from .errors import DimensionCapError, NumericalError, SpecError
from .model import (
    DenseOperator,
    ModelKind,
    ModelSpec,
    build_hamiltonian,
    build_parity,
    pauli_string,
)
from .observables import (
    ThermalState,
    TwoSiteState,
    log_negativity,
    parity_expectation,
    partial_trace_two_site,
    partial_transpose_b,
    thermal_state,
)

__version__ = "0.1.0"

__all__ = [
    "DenseOperator", "DimensionCapError", "ModelKind", "ModelSpec", "MomentumBlock",
    "NumericalError", "ParitySector", "SpecError", "SpectrumReport", "SurfacePrediction",
    "SweepParam", "SweepRecord", "ThermalState", "TwoSiteState", "build_hamiltonian",
    "build_parity", "detect_onset", "diagonalize", "dispersion", "dispersion_squared",
    "extremal_momentum", "grid_spectrum_is_real", "ground_state", "lattice_sum",
    "log_negativity", "momentum_block", "parity_expectation", "partial_trace_two_site",
    "partial_transpose_b", "pauli_string", "reality_threshold", "thermal_state",
    "verify_sufficiency", "__version__",
]
