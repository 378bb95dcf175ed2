"""Seeded random streams.

Every source of randomness in a run is a named stream derived from a single
master seed. Stream labels are hashed into the seed sequence, so adding an
agent (a new label) never perturbs the draws of existing streams.
"""

import hashlib

import numpy as np


class RngStream:
    """Reproducible random stream identified by (seed, stream_id).

    The same (seed, stream_id) pair yields a bit-identical draw sequence
    across runs and platforms.
    """

    def __init__(self, seed: int, stream_id: str):
        self.seed = int(seed)
        self.stream_id = str(stream_id)
        digest = hashlib.sha256(self.stream_id.encode("utf-8")).digest()
        # fold the label into the spawn key as four 32-bit words
        words = tuple(
            int.from_bytes(digest[k : k + 4], "little") for k in range(0, 16, 4)
        )
        self.rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=words)
        )

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id!r})"


def horizon_stream(seed: int, replication: int = 0) -> RngStream:
    """Horizon stream shared by all agents within one replication."""
    return RngStream(seed, f"rep{replication}/horizon")


def action_streams(seed: int, n_agents: int, replication: int = 0) -> list:
    """Per-agent action-sampling streams."""
    return [RngStream(seed, f"rep{replication}/action/{i}") for i in range(n_agents)]


def init_stream(seed: int, replication: int = 0) -> RngStream:
    """Stream used to draw the initial policy parameters."""
    return RngStream(seed, f"rep{replication}/init")


def draw_geometric(stream: RngStream, success_prob: float) -> int:
    """Draw from the geometric distribution with support {0, 1, ...}.

    P(T = x) = (1 - p)^x * p for success probability p in (0, 1].
    """
    if not 0.0 < success_prob <= 1.0:
        raise ValueError(f"success_prob must be in (0, 1], got {success_prob}")
    # numpy's geometric counts trials until first success (support {1, 2, ...})
    return int(stream.rng.geometric(success_prob)) - 1
