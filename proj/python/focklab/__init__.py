"""Truncated Fock-space convolution laboratory (C++ core bindings)."""

from ._core import (  # noqa: F401
    CutoffViolationError,
    DegenerateInputError,
    DensityMatrix,
    DimensionCeilingError,
    GridError,
    TailBudgetError,
    UnsupportedFrameError,
    annihilation_matrix,
    char_fn,
    chi_rate_probe,
    convolve,
    covariance,
    displacement_matrix,
    estimate_gap,
    fisher_distance,
    gaussian_char_fn,
    gaussify_fock,
    hs_distance,
    kmb_fisher,
    lsi_alpha,
    lsi_dirichlet,
    moment,
    pad_to,
    partial_trace,
    plancherel_hs_norm,
    pure_state,
    relative_entropy,
    run_invariant_suite,
    self_convolve,
    sld_fisher,
    tensor,
    thermal_state,
    trace_distance,
    vacuum_state,
    wigner,
    williamson,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
