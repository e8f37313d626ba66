"""Right-coset decompositions of Delta(l, N; M) under Gamma0(N; M), coset
count comparisons across M, and conjugation invariance by width-one
conjugators.

Gamma0(N; M) is the group of integer matrices of determinant one with
lower-left entry divisible by N and both diagonal entries 1 mod M; its
image mod N is the Borel-type subgroup B_M of upper-triangular matrices
with upper-left entry 1 mod M, and Gamma(N) lies in the kernel, so coset
bookkeeping reduces faithfully to SL2(Z/N).

Pair method: every integer matrix of determinant l > 0 factors uniquely
as u * h with u in SL2(Z) and h an upper-triangular Hermite representative
(a, b; 0, d), ad = l, a, d > 0, 0 <= b < d.  Since Gamma0(N; M) absorbs
Delta(l, N; M) on the left, the right cosets correspond to pairs
(B_M-coset of u, h) whose product lands in the family; B_M-cosets are
bottom rows (c, d) mod N up to scaling by units that are 1 mod M.
"""

import random
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .counting import in_delta
from .errors import InvalidM, PrereqFailed
from .modgroup import Mat2

_ROW_CACHE_SIZE = 256


def hnf_reps(l: int) -> list[Mat2]:
    """All (a, b; 0, d) with a*d = l, a, d > 0, 0 <= b < d; sigma_1(l) of them."""
    if l < 1:
        raise ValueError(f"hnf_reps expects l >= 1, got {l}")
    out = []
    for a in range(1, l + 1):
        if l % a:
            continue
        d = l // a
        for b in range(d):
            out.append(Mat2(a, b, 0, d))
    return out


def hnf_decompose(gamma: Mat2) -> tuple[Mat2, Mat2]:
    """Factor an integer matrix of determinant l > 0 as u * h, u in SL2(Z),
    h the Hermite representative.  Row-reduces the first column by SL2(Z)
    operations on the left, then normalizes signs and the off-diagonal."""
    g = gamma.to_int()
    if g.det <= 0:
        raise ValueError(f"hnf_decompose expects det > 0, got {g.det}")
    left = Mat2.identity()  # accumulated SL2 row operations
    a, b, c, d = g.entries()
    while c:
        # r1 <- r1 - q r2, then swap rows with a sign; |c| strictly drops
        quo = a // c
        a, b = a - quo * c, b - quo * d
        left = Mat2(1, -quo, 0, 1) * left
        a, b, c, d = -c, -d, a, b
        left = Mat2(0, -1, 1, 0) * left
    if a < 0:
        a, b, c, d = -a, -b, -c, -d
        left = Mat2(-1, 0, 0, -1) * left
    # clear b into [0, d)
    quo = b // d
    b -= quo * d
    left = Mat2(1, -quo, 0, 1) * left
    h = Mat2(a, b, c, d)
    u = left.inverse().to_int()
    assert u.det == 1 and (u * h).entries() == g.entries()
    return u, h


@lru_cache(maxsize=_ROW_CACHE_SIZE)
def _scalars(n: int, m: int) -> tuple[int, ...]:
    """Units mod N that are 1 mod M (the row-scaling stabilizer of B_M)."""
    if n == 1:
        return (0,)
    return tuple(u for u in range(1, n) if gcd(u, n) == 1 and u % m == 1 % m)


@lru_cache(maxsize=_ROW_CACHE_SIZE)
def _row_cosets(n: int, m: int) -> tuple[tuple[int, int], ...]:
    """Canonical bottom rows for B_M \\ SL2(Z/N): pairs (c, d) mod N with
    gcd(c, d, N) = 1, minimized over scaling by _scalars(n, m)."""
    if m < 1 or n % m:
        raise InvalidM(f"M = {m} does not divide N = {n}")
    if n == 1:
        return ((0, 0),)
    scalars = _scalars(n, m)
    reps = set()
    for c in range(n):
        for d in range(n):
            if gcd(gcd(c, d), n) != 1:
                continue
            reps.add(min(((s * c) % n, (s * d) % n) for s in scalars))
    return tuple(sorted(reps))


def _canonical_row(c: int, d: int, n: int, m: int) -> tuple[int, int]:
    if n == 1:
        return (0, 0)
    return min(((s * c) % n, (s * d) % n) for s in _scalars(n, m))


def sl2_lift_from_row(c: int, d: int, n: int) -> Mat2:
    """Some u in SL2(Z) whose bottom row is (c, d) mod N."""
    if n == 1:
        return Mat2.identity()
    c0 = c % n
    d0 = d % n
    if c0 == 0:
        c0 = n
    while gcd(c0, d0) != 1:
        d0 += n
    # a*d0 - b*c0 = 1 via extended Euclid
    a, b = _bezout(d0, c0)
    return Mat2(a, -b, c0, d0)


def _bezout(p: int, q: int) -> tuple[int, int]:
    """(x, y) with x*p + y*q = 1 for coprime p, q."""
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


@dataclass
class CosetTable:
    """Representatives of Gamma0(N; M) \\ Delta(l, N; M)."""

    l: int
    n: int
    m: int
    reps: list[Mat2]
    method: str = "pair"

    @property
    def count(self) -> int:
        return len(self.reps)

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "N": self.n,
            "M": self.m,
            "count": self.count,
            "method": self.method,
            "reps": [g.to_json() for g in self.reps],
        }


def coset_reps_delta(l: int, n: int, m: int) -> CosetTable:
    """One representative per right coset of Gamma0(N; M) in Delta(l, N; M).

    A pair (row (c, d), h = (a1, b1; 0, d1)) contributes iff
    c * a1 == 0 (mod N) and a_lift * a1 == 1 (mod M); both conditions are
    invariant on the B_M-coset once the first holds.
    """
    if l < 1:
        raise ValueError(f"coset_reps_delta expects l >= 1, got {l}")
    if m < 1 or n % m:
        raise InvalidM(f"M = {m} does not divide N = {n}")
    reps = []
    for c, d in _row_cosets(n, m):
        u = sl2_lift_from_row(c, d, n)
        a_lift = int(u.a)
        for h in hnf_reps(l):
            a1 = int(h.a)
            if (c * a1) % n:
                continue
            if (a_lift * a1) % m != 1 % m:
                continue
            gamma = (u * h).to_int()
            assert in_delta(gamma, l, n, m), (gamma, l, n, m)
            reps.append(gamma)
    table = CosetTable(l, n, m, reps)
    return table


def coset_key(gamma: Mat2, n: int, m: int) -> tuple:
    """Canonical label of the right coset Gamma0(N; M) * gamma."""
    u, h = hnf_decompose(gamma)
    row = _canonical_row(int(u.c) % n, int(u.d) % n, n, m)
    return (row, h.entries())


def same_coset(g1: Mat2, g2: Mat2, n: int, m: int) -> bool:
    """Exact test g1 * g2^-1 in Gamma0(N; M) (integer arithmetic only)."""
    l = g2.det
    prod = g1 * g2.adjugate()  # l * (g1 g2^-1)
    if any(int(e) % l for e in prod.entries()):
        return False
    q = Mat2(*(int(e) // l for e in prod.entries()))
    return q.det == 1 and q.c % n == 0 and q.a % m == 1 % m and q.d % m == 1 % m


@dataclass
class CountInvariance:
    count_nm: int
    count_n: int

    @property
    def equal(self) -> bool:
        return self.count_nm == self.count_n

    def to_json(self) -> dict:
        return {
            "count_NM": self.count_nm,
            "count_N": self.count_n,
            "equal": self.equal,
        }


def coset_count_invariance(l: int, n: int, m: int) -> CountInvariance:
    """Compare |Gamma0(N;M) \\ Delta(l,N;M)| with |Gamma0(N) \\ Delta(l,N;1)|,
    the coset-level shadow of the Hecke algebra isomorphism."""
    return CountInvariance(
        coset_reps_delta(l, n, m).count, coset_reps_delta(l, n, 1).count
    )


@dataclass
class ConjugationResult:
    passed: bool
    witness: Mat2 | None
    checked: int
    note: str = ""

    def to_json(self) -> dict:
        out = {"passed": self.passed, "checked": self.checked, "note": self.note}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def random_gamma0nm_element(n: int, m: int, rng: random.Random) -> Mat2:
    """A pseudo-random element of Gamma0(N; M), built from T, the lower
    N-shear, and lifted diagonal-type units that are 1 mod M."""
    g = Mat2.identity()
    units = _scalars(n, m) if n > 1 else (1,)
    for _ in range(rng.randint(2, 5)):
        kind = rng.randrange(3)
        if kind == 0:
            g = g * Mat2(1, rng.randint(-3, 3), 0, 1)
        elif kind == 1:
            g = g * Mat2(1, 0, n * rng.randint(-3, 3), 1)
        else:
            u = units[rng.randrange(len(units))] or 1
            d0 = pow(u, -1, n) if n > 1 else 1
            k = (u * d0 - 1) // n
            g = g * Mat2(u, k, n, d0)
    return g


def conjugation_invariance(
    sigma: Mat2,
    l: int,
    n: int,
    m: int,
    budget: int = 200,
    seed: int = 0,
) -> ConjugationResult:
    """Check sigma * gamma * sigma^-1 and sigma^-1 * gamma * sigma stay in
    Delta(l, N; M) over all coset representatives plus `budget` random
    Gamma0(N; M)-translates of them.

    Requires C(sigma) = N/M and M^2 | N; when l != 1 (mod M) nothing is
    asserted by the theory, which the result's note records.
    """
    from .cusps import cusp_denominator

    sigma.require_sl2()
    if n % (m * m):
        raise PrereqFailed(f"M^2 = {m * m} does not divide N = {n}")
    if cusp_denominator(sigma, n) != n // m:
        raise PrereqFailed(
            f"C(sigma) = {cusp_denominator(sigma, n)} != N/M = {n // m}"
        )
    note = "" if l % m == 1 % m else "l != 1 (mod M): invariance is not asserted"
    sig_inv = sigma.adjugate()
    table = coset_reps_delta(l, n, m)
    rng = random.Random(seed)
    samples = list(table.reps)
    for _ in range(budget):
        g = random_gamma0nm_element(n, m, rng)
        samples.append(g * samples[rng.randrange(table.count)])
    checked = 0
    for gamma in samples:
        for cand in (sigma * gamma * sig_inv, sig_inv * gamma * sigma):
            checked += 1
            if not in_delta(cand, l, n, m):
                return ConjugationResult(False, gamma, checked, note)
    return ConjugationResult(True, None, checked, note)
