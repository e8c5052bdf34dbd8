"""Deterministic random streams split from one 64-bit seed."""

from __future__ import annotations

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the path ``keys`` under ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(ss)


# stream keys, fixed so that adding a consumer never shifts another one
FRT = 1
GENERATOR = 2
