"""Deterministic random-stream management.

One root seed expands into independent substreams through
``numpy.random.SeedSequence`` spawn keys.  Each simulator consumes a fixed
set of purpose streams (index jumps, diffusion noise, bridge tests), and
experiment harnesses derive one child seed per replica, so adding replicas
or reordering parallel execution never perturbs existing draws.
"""

from __future__ import annotations

import zlib

import numpy as np

# Purpose tags for the per-simulation substreams.
INDEX = 1
NOISE = 2
BRIDGE = 3
ANALYSIS = 4


def substream(seed: int, purpose: int, *extra: int) -> np.random.Generator:
    """Generator for one purpose stream of ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(purpose, *extra))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(root_seed: int, label: str, *indices: int) -> int:
    """Stable child seed for a named stage and replica indices.

    The label is hashed (crc32) into the spawn key, so distinct experiment
    stages draw from disjoint streams even with equal replica indices.
    """
    key = (zlib.crc32(label.encode("utf-8")), *indices)
    ss = np.random.SeedSequence(root_seed, spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])
