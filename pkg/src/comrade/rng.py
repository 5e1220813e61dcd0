"""Seedable 64-bit RNG with explicit, serializable state.

splitmix64 keeps every draw a pure function of a single u64, so game
states and decision logs replay identically on any platform.
"""

MASK64 = 0xFFFFFFFFFFFFFFFF


class Rng:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        # 53 bits of mantissa, value in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return self.next_u64() % n

    def fork(self, salt: int) -> "Rng":
        return Rng(self.next_u64() ^ (salt * 0x9E3779B97F4A7C15))


def mix_seed(seed: int, stream: int) -> int:
    """Derive an independent stream seed from a base seed."""
    r = Rng((seed & MASK64) ^ (stream * 0xD1B54A32D192ED03))
    return r.next_u64()
