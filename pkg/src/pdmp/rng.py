"""
Per-path random streams.

Each path draws from its own PCG64 generator seeded by
SeedSequence([master_seed, path_index]), so a path is reproducible on its
own and independent of how paths are scheduled across workers.
"""

import math

import numpy as np


class RngStream:
    """Uniform stream U_1, U_2, ... with inverse-transform exponentials."""

    def __init__(self, seed: int, path_index: int = 0):
        if seed < 0 or path_index < 0:
            raise ValueError("seed and path index must be nonnegative")
        self.seed = int(seed)
        self.path_index = int(path_index)
        sequence = np.random.SeedSequence([self.seed, self.path_index])
        self.generator = np.random.Generator(np.random.PCG64(sequence))
        self.draws = 0

    def uniform(self) -> float:
        self.draws += 1
        return float(self.generator.random())

    def exponential(self, rate: float) -> float:
        """ξ = −ln(1 − U) / rate."""
        return -math.log1p(-self.uniform()) / rate
