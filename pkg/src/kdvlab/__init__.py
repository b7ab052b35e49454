"""kdvlab: a desk-scale spectral laboratory for periodic KdV.

Fourier-side evolution of the KdV family on the 2pi torus, the
differentiation-by-parts (normal form) reduction and its resonance algebra,
brute-force verification of the smoothing multiplier bounds, nonlinear-minus-
linear smoothing ladders, the dispersive-quantization probe for the linear
flow, and the Miura pipeline tying the cubic equation to the quadratic one.
"""

from .airy import LinearOp, airy_evolve, jump_metric, talbot_profile
from .estimates import (
    bilinear_ratio_ensemble,
    multiplier_scan,
    resonant_sharpness,
    resonant_term,
    sharpness_datum,
)
from .evolve import (
    ConservationReport,
    PotentialMode,
    PotentialSpec,
    SolverConfig,
    SolverInstability,
    TrajectorySample,
    conservation_report,
    evolve,
    evolve_mkdv,
    gauge_mean,
    rhs_fourier,
    rhs_mkdv,
)
from .fields import (
    DECAY_MARGIN,
    FourierField,
    GridSpec,
    SobolevIndex,
    analyze,
    convolve,
    cosine_field,
    crop_to,
    derivative,
    dump_coefficients,
    field_from_modes,
    load_coefficients,
    mean_square,
    pad_to,
    project_mean_zero,
    random_sobolev_data,
    sine_field,
    sobolev_norm,
    square_wave,
    synthesize,
    zero_field,
)
from .normal_form import (
    ResonanceClass,
    bilinear_phase_identity,
    boundary_bilinear,
    cubic_sum_identity,
    duhamel_residual,
    inner_pair_identity,
    interaction_rhs,
    lin_comb,
    nonresonant_trilinear,
    normal_form_residual,
    resonance_partition,
    resonant_cubic,
    resonant_set_sum,
    sweep_bilinear_identity,
    sweep_cubic_sum_identity,
)
from .smoothing import (
    ExperimentReport,
    GrowthFit,
    LadderStudy,
    MiuraInverseResult,
    galilean_shift,
    galilean_shift_field,
    growth_fit,
    miura,
    miura_inverse,
    miura_kdv_residual,
    mkdv_smoothing,
    nonlinear_minus_linear,
    resolution_stability_study,
)

__version__ = "0.1.0"
