"""Cusp combinatorics of Gamma0(N): denominators, widths, enumeration,
per-prime local profiles, and a p-local double-coset normal form.

Conventions: a cusp is a Gamma0(N)-orbit on P^1(Q); representatives are
coprime pairs (a, c) with c >= 0, infinity encoded as (1, 0).  The
denominator of a class is the unique positive divisor of N appearing as
the reduced denominator of some representative; gcd(0, N) = N makes the
formula C = gcd(c, N) total.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import divisors, factor, valuation
from .modgroup import Mat2


@dataclass(frozen=True)
class CuspClass:
    """One Gamma0(N)-orbit: representative a/c, denominator and width."""

    a: int
    c: int
    denominator: int
    width: int

    def rep(self) -> tuple[int, int]:
        return (self.a, self.c)


@dataclass(frozen=True)
class LocalProfile:
    """Per-prime data (p, n_p, c_p, w_p) for the primes dividing the level."""

    entries: tuple[tuple[int, int, int, int], ...]

    def denominator(self) -> int:
        out = 1
        for p, _np, cp, _wp in self.entries:
            out *= p**cp
        return out

    def width(self) -> int:
        out = 1
        for p, _np, _cp, wp in self.entries:
            out *= p**wp
        return out


def cusp_denominator(tau: Mat2, n: int) -> int:
    """C(tau) = gcd(c, N) for tau in SL2(Z), with gcd(0, N) = N."""
    tau.require_sl2()
    return gcd(int(tau.c), n)


def cusp_width(tau: Mat2, n: int) -> int:
    """W(tau) = N / gcd(C(tau)^2, N); equals 1 iff N | C(tau)^2."""
    c = cusp_denominator(tau, n)
    return n // gcd(c * c, n)


def local_profile(tau: Mat2, n: int) -> LocalProfile:
    """c_p = min(v_p(c), n_p) and w_p = max(n_p - 2*c_p, 0) for each p | N."""
    tau.require_sl2()
    c = int(tau.c)
    entries = []
    for p, np_ in factor(n):
        cp = np_ if c == 0 else min(valuation(c, p), np_)
        wp = max(np_ - 2 * cp, 0)
        entries.append((p, np_, cp, wp))
    return LocalProfile(tuple(entries))


def enumerate_cusps(n: int) -> list[CuspClass]:
    """One representative per cusp of Gamma0(N), sorted by (denominator, a).

    For each divisor c | N there are phi(gcd(c, N/c)) classes, indexed by
    residues a mod gcd(c, N/c) coprime to it; the representative numerator
    is lifted to be coprime to c.  The unique denominator-N class is the
    cusp at infinity, stored as (1, 0).
    """
    out = []
    for c in divisors(n):
        g = gcd(c, n // c)
        width = n // gcd(c * c, n)
        for a0 in range(1, g + 1):
            if gcd(a0, g) != 1:
                continue
            a = a0
            while gcd(a, c) != 1:
                a += g
            if c == n:
                out.append(CuspClass(1, 0, n, 1))
            else:
                out.append(CuspClass(a, c, c, width))
    return sorted(out, key=lambda k: (k.denominator, k.a))


def cusp_table_json(n: int) -> dict:
    return {
        "level": n,
        "cusps": [
            {"rep": [k.a, k.c], "denominator": k.denominator, "width": k.width}
            for k in enumerate_cusps(n)
        ],
    }


def _unit_generators(n: int) -> list[int]:
    """A small generating set of (Z/n)^x, found greedily."""
    if n <= 2:
        return []
    units = [u for u in range(1, n) if gcd(u, n) == 1]
    gens: list[int] = []
    span = {1}
    for u in units:
        if u in span:
            continue
        gens.append(u)
        span = {1}
        stack = [1]
        while stack:
            v = stack.pop()
            for g in gens:
                w = v * g % n
                if w not in span:
                    span.add(w)
                    stack.append(w)
        if len(span) == len(units):
            break
    return gens


def brute_force_cusp_orbits(n: int) -> dict[tuple[int, int], int]:
    """Orbit id for every pair (a, c) mod N with gcd(a, c, N) = 1 under the
    image of Gamma0(N) acting on column vectors.

    Independent validation oracle for enumerate_cusps: BFS closure under the
    generators T: (a, c) -> (a + c, c) and diag(u, 1/u): (a, c) -> (ua, c/u),
    which generate the full upper-triangular image of Gamma0(N) mod N.
    """
    if n == 1:
        return {(0, 0): 0}
    gens = _unit_generators(n)
    gen_pairs = [(u, pow(u, -1, n)) for u in gens]
    if n > 2:
        gen_pairs.append((n - 1, n - 1))  # -I
    orbit: dict[tuple[int, int], int] = {}
    next_id = 0
    for a0 in range(n):
        for c0 in range(n):
            if gcd(gcd(a0, c0), n) != 1 or (a0, c0) in orbit:
                continue
            stack = [(a0, c0)]
            orbit[(a0, c0)] = next_id
            while stack:
                a, c = stack.pop()
                nbrs = [((a + c) % n, c)]
                for u, uinv in gen_pairs:
                    nbrs.append((u * a % n, uinv * c % n))
                for pr in nbrs:
                    if pr not in orbit:
                        orbit[pr] = next_id
                        stack.append(pr)
            next_id += 1
    return orbit


def brute_force_cusp_count(n: int) -> int:
    """Number of cusps of Gamma0(N) by explicit orbit enumeration."""
    orbits = brute_force_cusp_orbits(n)
    return len(set(orbits.values()))


def doublecoset_normal_form(tau: Mat2, p: int, np_: int) -> tuple[Mat2, Mat2, Fraction]:
    """Return (k, nu, v) with k * tau * nu == (1, 0; p**c_p, v), v a p-adic unit.

    k is p-integral with p-unit determinant and lower-left entry divisible
    by p**np_; nu is upper-unitriangular and p-integral.  Three cases by
    v_p(c): c a unit, 0 < v_p(c) < np_, and v_p(c) >= np_.
    """
    tau.require_sl2()
    a, b, c, d = tau.entries()
    vpc = np_ if c == 0 else valuation(c, p)
    if vpc == 0:
        k = Mat2(1, Fraction(1 - a, c), 0, Fraction(1, c))
        nu = Mat2(1, Fraction(a * d - b * c - d, c), 0, 1)
    elif vpc < np_:
        c1 = c // p**vpc
        k = Mat2(Fraction(1, a), 0, 0, Fraction(1, c1))
        nu = Mat2(1, Fraction(-b, a), 0, 1)
    else:
        k = Mat2(Fraction(1, a), 0, Fraction(p**np_ - c, a), 1)
        nu = Mat2(1, Fraction(-b, a), 0, 1)
    prod = k * tau * nu
    cp = min(vpc, np_)
    v = Fraction(prod.d)
    assert prod.a == 1 and prod.b == 0 and prod.c == p**cp, prod
    return k, nu, v
