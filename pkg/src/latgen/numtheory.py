"""Small integer helpers: primality and unit-group generators of prime powers."""

from __future__ import annotations

from functools import lru_cache
from math import isqrt


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for p in range(3, isqrt(n) + 1, 2):
        if n % p == 0:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of the unit group modulo ``p**2`` for an odd prime p.

    Such a generator also generates the units modulo every power ``p**k``.
    """
    if p == 2 or not is_prime(p):
        raise ValueError(f"primitive roots of prime powers need an odd prime, got {p}")
    order = p - 1
    factors = _prime_factors(order)
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            # g generates mod p; lift to mod p^2 if g^(p-1) == 1 there
            return g if pow(g, order, p * p) != 1 else g + p
    raise AssertionError("unreachable")  # pragma: no cover


def ilog(b: int, n: int) -> int:
    """Largest k with ``b**k <= n`` (n >= 1)."""
    k, v = 0, b
    while v <= n:
        k += 1
        v *= b
    return k
