"""Counter-based random substreams.

Every randomized procedure derives an independent generator from
``(seed, *key)`` rather than advancing one shared stream, so results do not
depend on execution order or thread count. The default seed is a fixed
constant: running with no flags is reproducible.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 1729

_MASK = (1 << 64) - 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """An independent generator for the given seed and key tuple."""
    return np.random.default_rng((seed & _MASK, *(k & _MASK for k in key)))
