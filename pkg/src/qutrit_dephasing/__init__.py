"""Pure dephasing of two qutrits: channels, negativity and timescales."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    ClassLabel, RateComparison, TimescaleSet, classify_state, coherence_trace, compare_rates,
    extract_timescales, is_decoherence_free,
)
from .channels import (  # noqa: E402
    ChannelSpec, DecayParams, KrausSet, build_collective_kraus, build_local_kraus, evolve,
    evolve_with, reduced_evolution,
)
from .entanglement import (  # noqa: E402
    fragile_closed_form, negativity, negativity_general_multilocal, negativity_robust_multilocal,
)
from .linalg import basis_state, partial_trace, partial_transpose, projector, random_state  # noqa: E402
from .noise import NoiseModel, ensemble_evolve, oracle_compare  # noqa: E402

__all__ = [
    "ChannelSpec", "ClassLabel", "DecayParams", "KrausSet", "NoiseModel", "RateComparison",
    "TimescaleSet", "basis_state", "build_collective_kraus", "build_local_kraus", "classify_state",
    "coherence_trace", "compare_rates", "ensemble_evolve", "evolve", "evolve_with",
    "extract_timescales", "fragile_closed_form", "is_decoherence_free", "negativity",
    "negativity_general_multilocal", "negativity_robust_multilocal", "oracle_compare",
    "partial_trace", "partial_transpose", "projector", "random_state", "reduced_evolution",
]
