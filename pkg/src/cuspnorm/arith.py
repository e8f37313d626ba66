"""Exact integer number theory: factorization, valuations, splits, CRT, sieves.

Everything here is deterministic and exact; inputs are desk-scale
(roughly 64-bit), so trial division backed by a smallest-prime-factor
sieve is plenty.
"""

from math import gcd, isqrt, lcm

from .errors import Inconsistent

_SIEVE_LIMIT = 1 << 20
_spf = None  # lazily built smallest-prime-factor table for n < _SIEVE_LIMIT


def _spf_table():
    global _spf
    if _spf is None:
        spf = list(range(_SIEVE_LIMIT))
        for i in range(2, isqrt(_SIEVE_LIMIT) + 1):
            if spf[i] == i:
                for j in range(i * i, _SIEVE_LIMIT, i):
                    if spf[j] == j:
                        spf[j] = i
        _spf = spf
    return _spf


def factor(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as sorted (p, e) pairs; factor(1) == []."""
    if n < 1:
        raise ValueError(f"factor expects n >= 1, got {n}")
    out = []
    if n < _SIEVE_LIMIT:
        spf = _spf_table()
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out
    # trial division for the rare large input
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 2 if p % 6 == 5 else 4
    if n > 1:
        out.append((n, 1))
    return out


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def divisors(n: int) -> list[int]:
    """All positive divisors of n >= 1, ascending."""
    divs = [1]
    for p, e in factor(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def squarefree_split(n: int) -> tuple[int, int]:
    """Write n = n2 * n0**2 with n2 squarefree and n0 maximal; return (n2, n0)."""
    n2 = n0 = 1
    for p, e in factor(n):
        n0 *= p ** (e // 2)
        if e % 2:
            n2 *= p
    return n2, n0


def smooth_part(n: int, m: int) -> int:
    """Largest divisor of |n| supported on the primes of m, i.e. (|n|, m^oo).

    Computed by the finite loop stripping gcd(n, m) factors; stabilizes
    because each pass removes at least one shared prime factor.
    """
    if n == 0:
        raise ValueError("smooth_part expects n != 0")
    n = abs(n)
    out = 1
    g = gcd(n, m)
    while g > 1:
        out *= g
        n //= g
        g = gcd(n, m)
    return out


def ceil_sqrt_div(f: int) -> int:
    """prod p**ceil(e/2) over the factorization f = prod p**e.

    The result squares to a multiple of f, and divides any a with f | a**2.
    """
    out = 1
    for p, e in factor(f):
        out *= p ** ((e + 1) // 2)
    return out


def euler_phi(n: int) -> int:
    """Euler phi: the order of (Z/n)^x, with euler_phi(1) == 1."""
    out = 1
    for p, e in factor(n):
        out *= p ** (e - 1) * (p - 1)
    return out


def primes_up_to(n: int) -> list[int]:
    """Sieve of Eratosthenes up to n inclusive."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = bytearray(len(range(start, n + 1, p)))
    return [i for i, v in enumerate(sieve) if v]


def primes_in_progression(lam: int, m: int) -> list[int]:
    """Primes p with lam < p < 2*lam and p == 1 (mod m), ascending.

    m == 1 imposes no congruence; an empty list is a valid result.
    """
    if lam < 1 or m < 1:
        raise ValueError("primes_in_progression expects positive arguments")
    return [p for p in primes_up_to(2 * lam - 1) if p > lam and p % m == 1 % m]


def crt_solve(congruences: list[tuple[int, int]]) -> tuple[int, int]:
    """Solve x == r_i (mod m_i) simultaneously; return (x, lcm) with 0 <= x < lcm.

    Raises Inconsistent when two congruences conflict on a shared factor.
    """
    r, m = 0, 1
    for ri, mi in congruences:
        if mi < 1:
            raise ValueError("moduli must be >= 1")
        g = gcd(m, mi)
        if (ri - r) % g:
            raise Inconsistent(f"x == {r} (mod {m}) conflicts with x == {ri} (mod {mi})")
        lcm_i = lcm(m, mi)
        # combine: x = r + m*t with m*t == ri - r (mod mi)
        t = ((ri - r) // g * pow(m // g, -1, mi // g)) % (mi // g) if mi != g else 0
        r = (r + m * t) % lcm_i
        m = lcm_i
    return r, m
