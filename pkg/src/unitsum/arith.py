"""Small exact integer helpers: roots, perfect powers and desk-scale factoring."""

from functools import lru_cache
from math import isqrt

from .errors import Unverifiable

TRIAL_LIMIT = 10**6


def iroot(n: int, k: int) -> int:
    """Floor of the real k-th root of n >= 0."""
    if n < 0:
        raise ValueError("iroot needs n >= 0")
    if n < 2:
        return n
    if k == 2:
        return isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def exact_root(n: int, k: int) -> int | None:
    """Integer a with a**k == n, or None.  Negative n allowed for odd k."""
    if n < 0:
        if k % 2 == 0:
            return None
        r = exact_root(-n, k)
        return None if r is None else -r
    r = iroot(n, k)
    return r if r**k == n else None


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def is_cube(n: int) -> bool:
    return exact_root(n, 3) is not None


@lru_cache(maxsize=1)
def small_primes(limit: int = TRIAL_LIMIT) -> tuple[int, ...]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def trial_factor(n: int, limit: int = TRIAL_LIMIT) -> tuple[dict[int, int], int]:
    """Strip all prime factors <= limit from |n|.

    Returns (factors, cofactor); every prime dividing the cofactor exceeds
    ``limit``.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    factors: dict[int, int] = {}
    for p in small_primes(limit):
        if p * p > n:
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    if 1 < n <= limit * limit:
        # no factor up to sqrt(n) remains, so n is prime
        factors[n] = factors.get(n, 0) + 1
        n = 1
    return factors, n


def _free_of_powers(n: int, k: int) -> bool:
    factors, cofactor = trial_factor(n)
    if any(e >= k for e in factors.values()):
        return False
    if cofactor == 1:
        return True
    # prime factors of the cofactor exceed TRIAL_LIMIT, so below this bound
    # there are at most k of them and a k-th power divisor means p**k
    if cofactor < TRIAL_LIMIT ** (k + 1):
        return exact_root(cofactor, k) is None
    raise Unverifiable(
        f"cannot certify {k}-power-freeness of {n} at desk scale",
        {"factors": factors, "cofactor": cofactor},
    )


def is_squarefree(n: int) -> bool:
    """Exact squarefreeness test for |n| below 10**18; larger inputs raise.

    After trial division to 10**6 the cofactor has only large prime
    factors, so below 10**18 it is either prime, a product of two distinct
    primes, or a prime square.
    """
    if n == 0:
        return False
    return _free_of_powers(n, 2)


def is_cubefree(n: int) -> bool:
    """Exact cubefreeness for |n| below 10**24."""
    if n == 0:
        return False
    return _free_of_powers(n, 3)


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of |n|; raises if a large cofactor remains."""
    factors, cofactor = trial_factor(n)
    if cofactor != 1:
        raise Unverifiable(f"cannot fully factor {n}", {"factors": factors, "cofactor": cofactor})
    return sorted(factors)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    factors, cofactor = trial_factor(n)
    if cofactor != 1:
        raise Unverifiable(f"primality of {n} not decidable by trial division")
    return factors == {n: 1}
