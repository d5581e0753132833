"""Independent random streams keyed by (master seed, replicate, purpose).

Streams come from numpy's ``SeedSequence`` spawn keys feeding a Philox
counter-based generator, so a replicate's draws do not depend on which
process runs it or in what order.
"""

from __future__ import annotations

import numpy as np

PURPOSES = {"init": 0, "rewards": 1, "config": 2}


def stream(master_seed: int, replicate: int, purpose: str) -> np.random.Generator:
    key = (int(replicate), PURPOSES[purpose])
    seq = np.random.SeedSequence(entropy=int(master_seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))
