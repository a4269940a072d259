"""Counter-based random streams.

Every stochastic component in this package draws from its own Philox stream,
keyed by (user seed, domain, index).  Streams are independent by key, so the
permutation b of a test, the replicate r of a benchmark and the noise
component of a scenario never interact: adding draws to one stream cannot
shift any other.  Philox is counter-based, which keeps the keying scheme
portable and immune to generator-state coupling.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Domain tags; one namespace per kind of consumer.
DOMAIN_SYNTH = 1
DOMAIN_PERMUTE = 2
DOMAIN_SCAN = 3
DOMAIN_BENCH = 4


def stream(seed: int, domain: int, index: int = 0) -> np.random.Generator:
    """Return the generator for the (seed, domain, index) stream."""
    key = np.array(
        [
            np.uint64(int(seed) & _MASK64),
            np.uint64(((int(domain) & 0xFFFF) << 48) | (int(index) & ((1 << 48) - 1))),
        ],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, domain: int, index: int) -> int:
    """Deterministically derive a child seed for a nested consumer."""
    return int(stream(seed, domain, index).integers(0, 1 << 63))
