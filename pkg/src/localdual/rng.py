"""Seed discipline.

Every run owns a master seed. Client m draws from the child stream with
spawn key (m,); stream key M (one past the last client) is reserved for
algorithm-level randomness such as shared initial points. Expanding the
grid or reordering runs therefore never perturbs any client's sample path.
"""

from __future__ import annotations

import numpy as np


def client_stream(master_seed: int, m: int) -> np.random.Generator:
    """Independent generator for client m under the given master seed."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(m,))
    return np.random.Generator(np.random.PCG64(ss))


def algorithm_stream(master_seed: int, M: int) -> np.random.Generator:
    """Generator for algorithm-level draws, disjoint from all client streams."""
    return client_stream(master_seed, M)


def derived_seed(master_seed: int, tag: int) -> int:
    """Stable integer sub-seed, e.g. one per Catalyst outer iteration.

    Tags live in their own spawn-key plane so they cannot collide with
    client stream keys.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(1, tag))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
