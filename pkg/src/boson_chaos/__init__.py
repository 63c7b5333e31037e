"""Exact-diagonalization chaos and survival-probability toolkit for
interacting bosons on a quasiperiodic chain."""

__version__ = "0.1.0"

from .fock import BasisTable, build_basis, hop_image  # noqa: E402,F401
from .hamiltonian import ModelParams, assemble, diagonal_expectation  # noqa: F401
from .spectral import (  # noqa: F401
    SpectralDecomposition,
    diagonalize,
    dos_histogram,
    mean_ratio_trimmed,
    ratio_vs_energy,
    spacing_ratios,
)
from .classify import (  # noqa: F401
    classify_all,
    crowding,
    participation_ratio,
    select_extremes,
)
from .dynamics import (  # noqa: F401
    TimeGrid,
    analytic_sp,
    b2,
    detect_hole,
    estimate_eta,
    exact_ldos,
    fit_gaussian,
    fit_power_law,
    long_time_average,
    rolling_average,
    smooth_ldos,
    survival_probability,
)
from .ensemble import RunConfig, sample_phases  # noqa: F401
