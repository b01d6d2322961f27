"""zsf: inverse-spectral construction of potentials for the Riemann zeros.

A symmetric 1D Schrodinger potential is built whose lowest eigenvalues
match the imaginary parts of the nontrivial zeta zeros: a semiclassical
march produces the smooth starting potential, conjugate-gradient
refinement pins the eigenvalues, one-zero-at-a-time matching yields the
correction functions, and the closed-form model (amplitude law, doubled
WKB phase, universal tail) rebuilds them.
"""

from .analysis import (
    CorrectionProfile,
    OscillationSummary,
    TailSamples,
    TailTemplate,
    amplitude_law_residuals,
    average_tails,
    extract_tail,
    summarize_oscillation,
    wavelength_curvature,
    wavelength_zero_crossing,
    wkb_wavelength,
)
from .eigensolver import (
    EigenPair,
    count_below,
    eigenvector,
    lowest_eigenpairs,
    lowest_eigenvalues,
)
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    NumericalError,
    StageError,
    ZsfError,
)
from .grid import (
    Grid,
    SampledPotential,
    TridiagonalOperator,
    build_hamiltonian,
    hamiltonian_from_values,
    make_grid,
    read_potential_csv,
    sample_symmetric,
    write_potential_csv,
)
from .matching import MatchConfig, MatchSequence, build_targets, match_sequence
from .optimize import (
    OptimizerConfig,
    OptimizerReport,
    TargetSpectrum,
    gradient,
    objective,
    refine,
    spectrum_of,
)
from .reconstruct import (
    ReconstructionModel,
    VerificationReport,
    assemble_and_verify,
    attach_tails,
    build_model,
    fit_shift,
    model_amplitude,
    model_shift,
    reconstruct_oscillation,
)
from .wkb import HalfProfile, ground_value, march_potential, phase_integral
from .zeta import (
    ZeroTable,
    approximation_error,
    bundled_zeros,
    counting_function,
    lambert_w,
    load_zeros,
    phase_rhs,
    smooth_zero,
    smooth_zero_phase_root,
)

__version__ = "0.1.0"
