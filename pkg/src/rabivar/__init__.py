"""Variational coherent-squeezed-state solver for the anisotropic Rabi model."""

__version__ = "0.1.0"

from .errors import (
    DegenerateAnsatz,
    InvalidTau,
    NoConvergence,
    NotIsotropic,
    TruncationNotConverged,
)
from .model import ModelParams, Truncation
from .fock import boson_ops, build_hamiltonian, parity_diag
from .exactdiag import (
    SpectrumResult,
    SpinFockVector,
    mean_photon_ed,
    solve_lowest,
    solve_parity_sector,
    spin_x_projection,
)
from .states import (
    CoherentSqueezedParams,
    WavefunctionProfile,
    css_fock_amplitudes,
    hermite_osc_wavefunction,
    overlap_css,
    position_profile,
)
from .variational import (
    Ansatz1Params,
    Ansatz2Params,
    AnsatzKind,
    asymptotic_params,
    energy_1css,
    energy_2css,
    mean_photon_1css,
    mean_photon_2css,
    parity_splitting_2css,
    stationarity_residuals_iso,
)
from .optimize import OptResult, minimize_scalar_field, solve_ansatz
