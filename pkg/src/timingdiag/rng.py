"""Deterministic keyed random substreams.

Every stochastic draw in the simulator comes from a Generator keyed by the
master seed plus a stream tag and integer context ids. Streams are therefore
independent of execution order and safe to draw concurrently.
"""

from __future__ import annotations

import numpy as np

# Stream tags. Values are part of the reproducibility contract: changing them
# changes every simulated campaign.
STREAM_SEGMENT = 1       # functional-segment delay/jitter draws
STREAM_BRANCH = 2        # observation-branch segment draws
STREAM_FIELD = 3         # spatial stress-field realizations
STREAM_WANDER = 4        # per-sweep local offsets at perturbed taps
STREAM_WINDOW = 5        # Monte Carlo sampling-window counts
STREAM_SUBSET = 6        # monitor-subset draws for scaling analysis


def substream(seed: int, tag: int, *ids: int) -> np.random.Generator:
    """Return the Generator for (seed, tag, *ids).

    The same key always yields an identical stream regardless of how many
    other streams were created before it.
    """
    ss = np.random.SeedSequence(entropy=(int(seed), int(tag)) + tuple(int(i) for i in ids))
    return np.random.Generator(np.random.PCG64(ss))
