"""Deterministic seed derivation.

A small splitmix64 chain mixes a base seed with integer context words
(wavelet levels, cluster count, role tags) so that every job in a sweep gets
an independent, order-free seed that is stable across platforms and library
versions.
"""

_MASK = (1 << 64) - 1

# role tags for seeds that are not tied to a resolution point
TAG_SPECTRAL = 0x5BEC7EA1
TAG_TIEBREAK = 0x71EB8EA6


def splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(base: int, *words: int) -> int:
    """Mix ``base`` with context ``words`` into a 64-bit seed."""
    s = splitmix64(base & _MASK)
    for w in words:
        s = splitmix64(s ^ (w & _MASK))
    return s
