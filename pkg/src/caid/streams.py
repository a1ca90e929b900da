"""Deterministic random-stream derivation.

Every stochastic component draws from a generator derived from the master
seed plus a structural key (generation, individual, repetition, ...), so a
result depends only on its inputs and seed, never on execution order or
worker count.
"""

import numpy as np

# Role tags keep sibling streams (e.g. "mutation at generation 7" vs
# "selection at generation 7") statistically independent.
ROLE_INIT = 0
ROLE_SUBSET = 1
ROLE_BREED = 2
ROLE_EVAL = 3
ROLE_CONFIRM = 4
ROLE_GENERATE = 5
ROLE_DEGRADE = 6
ROLE_RUN = 7


def derived_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator keyed by (seed, *key); identical arguments give identical streams."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def derived_seed(seed: int, *key: int) -> int:
    """Stable 63-bit child seed for handing to components that want an int."""
    ss = np.random.SeedSequence([int(seed), *map(int, key)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)
