from .rng import RngStream
from .thinning import (
    HybridState,
    JumpEvent,
    ThinningOutcome,
    next_jump,
    psi,
    sample_post_jump,
)
from .path import (
    PathRecord,
    first_jump_times,
    flip_frequencies,
    output_times,
    pathwise_bound_violations,
    simulate_path,
)

__all__ = [
    'RngStream',
    'HybridState',
    'JumpEvent',
    'ThinningOutcome',
    'next_jump',
    'psi',
    'sample_post_jump',
    'PathRecord',
    'first_jump_times',
    'flip_frequencies',
    'output_times',
    'pathwise_bound_violations',
    'simulate_path'
]
