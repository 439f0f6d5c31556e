"""2D singular Roesser systems: stability certificates, feedback synthesis,
grid simulation. Thin wrapper over the C++ core."""

from roesser2d._core import (
    PartitionDims,
    Roesser2D,
    Roesser2DError,
    analyze,
    build_heat_model,
    certify,
    char_poly,
    char_poly_oracle,
    check_stability_certificate,
    export_trajectory,
    is_causal,
    is_regular,
    lyapunov_delta,
    rank_decompose,
    read_model,
    simulate,
    synthesize_output_feedback,
    synthesize_state_feedback,
    validate,
    verify_gain,
    write_model,
)

__all__ = [
    "PartitionDims",
    "Roesser2D",
    "Roesser2DError",
    "analyze",
    "build_heat_model",
    "certify",
    "char_poly",
    "char_poly_oracle",
    "check_stability_certificate",
    "export_trajectory",
    "is_causal",
    "is_regular",
    "lyapunov_delta",
    "rank_decompose",
    "read_model",
    "simulate",
    "synthesize_output_feedback",
    "synthesize_state_feedback",
    "validate",
    "verify_gain",
    "write_model",
]

__version__ = "0.1.0"
