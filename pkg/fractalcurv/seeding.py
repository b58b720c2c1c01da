"""Counter-based 64-bit mixing used for all randomness.

``mix64(a, b)`` is the splitmix64 finalizer applied to ``a + (b + 1) * golden``
(all arithmetic modulo 2**64). Draws are addressed by integer keys, so any level,
replica or tree node can be reached in O(1) and results do not depend on the
order in which they are requested.
"""
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(a: int, b: int) -> int:
    z = (a + (b + 1) * GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(a: np.ndarray, b) -> np.ndarray:
    """Vectorized ``mix64``; bit-identical to the scalar version."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = a + (b + np.uint64(1)) * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def to_unit(z: int) -> float:
    """Top 53 bits of a 64-bit word as a float in [0, 1)."""
    return (z >> 11) * 2.0 ** -53


def to_unit_array(z: np.ndarray) -> np.ndarray:
    return (np.asarray(z, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def replica_seed(master_seed: int, replica: int) -> int:
    return mix64(master_seed & MASK64, replica)
