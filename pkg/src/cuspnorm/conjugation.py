"""Atkin-Lehner operators, conjugation of an arbitrary cusp to a width-one
cusp, and the gap-principle reduction with exact certificate verification.

The pipeline: fd-reduce z, read off the local profile of the reducing
matrix tau, pick the prime set S where the local width is positive, build
an Atkin-Lehner operator W of determinant N_S, and solve a congruence for
the unipotent correction n so that

    sigma = W * tau * n * diag(1/M1, M1/N_S)

is integral of determinant one with denominator N/M.  Every postcondition
is re-verified on the constructed certificate rather than trusted.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd, isqrt

from .arith import crt_solve, factor, valuation
from .cusps import cusp_denominator, local_profile
from .errors import InternalSolveFailure, InvalidM, InvalidPrimeSet
from .modgroup import Mat2, PointH, fd_reduce, mobius_act


@dataclass(frozen=True)
class AtkinLehnerOp:
    """Integer matrix W of determinant N_S with the defining congruences
    W == (0 *; 0 0) mod N_S and W upper-triangular mod N."""

    w: Mat2
    s_primes: frozenset[int]
    n_s: int
    level: int

    def __post_init__(self):
        w, n_s, n = self.w, self.n_s, self.level
        assert w.det == n_s, (w, n_s)
        assert w.a % n_s == 0 and w.c % n_s == 0 and w.d % n_s == 0
        assert w.c % n == 0


def atkin_lehner_matrix(n: int, s: set[int]) -> AtkinLehnerOp:
    """Canonical Atkin-Lehner operator for a prime subset S of the level.

    For S empty the identity is returned.  Otherwise W = (N_S*al, be; N, N_S)
    where al*N_S - be*(N/N_S) = 1, with al the least positive inverse of
    N_S modulo N/N_S.
    """
    n_s = 1
    prime_set = frozenset(s)
    level_primes = {p for p, _ in factor(n)}
    for p in prime_set:
        if p not in level_primes:
            raise InvalidPrimeSet(f"prime {p} does not divide level {n}")
        n_s *= p ** valuation(n, p)
    if not prime_set:
        return AtkinLehnerOp(Mat2.identity(), prime_set, 1, n)
    m = n // n_s  # coprime to n_s by construction
    al = (pow(n_s, -1, m) - 1) % m + 1 if m > 1 else 1
    be = (al * n_s - 1) // m
    return AtkinLehnerOp(Mat2(n_s * al, be, n, n_s), prime_set, n_s, n)


def w_squared_in_center_gamma0(op: AtkinLehnerOp) -> bool:
    """Check W^2 = lambda * gamma with lambda rational and gamma in Gamma0(N)."""
    w2 = op.w * op.w
    for lam in (op.n_s, -op.n_s):
        g = Mat2(
            Fraction(w2.a, lam),
            Fraction(w2.b, lam),
            Fraction(w2.c, lam),
            Fraction(w2.d, lam),
        )
        if g.is_integral() and g.det == 1 and int(g.c) % op.level == 0:
            return True
    return False


@dataclass
class GapVerdict:
    """Outcome of the weighted-lattice inequality check at a point."""

    passed: bool
    worst_pair: tuple[int, int]
    min_margin: Fraction
    min_lhs: Fraction
    bound_at_worst: Fraction

    def to_json(self):
        return {
            "passed": self.passed,
            "worst_pair": list(self.worst_pair),
            "min_margin": str(self.min_margin),
            "min_lhs": str(self.min_lhs),
            "bound_at_worst": str(self.bound_at_worst),
        }


@dataclass
class ReductionCertificate:
    """Full output of the width-one / gap-principle pipeline.

    sigma = W * tau * n * diag(1/M1, M1/N_S) exactly; verification holds
    the re-checked postconditions (and, in gap mode, the point z' with its
    height and lattice verdicts).

    method is "construction" for the local-profile algorithm, whose n is
    upper-unitriangular, or "search" for a certificate found by the
    verified fallback scan (its n is the exact rational solving matrix,
    not necessarily unipotent).
    """

    level: int
    tau: Mat2
    s_primes: tuple[int, ...]
    w: AtkinLehnerOp
    m1: int
    m: int
    n_s: int
    n_shift: Mat2
    sigma: Mat2
    z_prime: PointH | None = None
    z0: PointH | None = None
    verification: dict = field(default_factory=dict)
    method: str = "construction"

    def to_json(self):
        out = {
            "level": self.level,
            "method": self.method,
            "tau": self.tau.to_json(),
            "S": sorted(self.s_primes),
            "W": self.w.w.to_json(),
            "N_S": self.n_s,
            "M1": self.m1,
            "M": self.m,
            "n": self.n_shift.to_json(),
            "sigma": self.sigma.to_json(),
            "verification": {
                k: (v.to_json() if isinstance(v, GapVerdict) else v)
                for k, v in self.verification.items()
            },
        }
        if self.z_prime is not None:
            out["z_prime"] = self.z_prime.serialize()
        if self.z0 is not None:
            out["z0"] = self.z0.serialize()
        return out


def width_one_conjugate(tau: Mat2, n: int) -> ReductionCertificate:
    """Conjugate the cusp of tau to a width-one cusp of Gamma0(N).

    Chooses S = {p : w_p(tau) > 0}, M1 = prod_{p in S} p^{c_p}, and
    M = M1 * prod_{p | N, p not in S} p^{n_p - c_p}; solves
    A*u == -B*M1, C*u == -D*M1 (mod N_S) for the shift n = (1, u/M1; 0, 1),
    prime-by-prime with a brute scan then CRT.  All claims about sigma are
    verified before returning.
    """
    tau.require_sl2()
    prof = local_profile(tau, n)
    s_primes = tuple(p for p, _np, _cp, wp in prof.entries if wp > 0)
    m1 = 1
    m = 1
    n_s = 1
    for p, np_, cp, wp in prof.entries:
        if wp > 0:
            m1 *= p**cp
            m *= p**cp
            n_s *= p**np_
        else:
            m *= p ** (np_ - cp)
    op = atkin_lehner_matrix(n, set(s_primes))
    wt = op.w * tau
    a_, b_, c_, d_ = wt.entries()
    congruences = []
    for p, np_, _cp, wp in prof.entries:
        if wp == 0:
            continue
        q = p**np_
        sols = [
            u
            for u in range(q)
            if (a_ * u + b_ * m1) % q == 0 and (c_ * u + d_ * m1) % q == 0
        ]
        if not sols:
            raise InternalSolveFailure(
                f"no unipotent shift solves the congruences at p={p} for tau={tau!r}, N={n}"
            )
        congruences.append((sols[0], q))
    u = crt_solve(congruences)[0] if congruences else 0
    n_shift = Mat2(1, Fraction(u, m1), 0, 1)
    scale = Mat2(Fraction(1, m1), 0, 0, Fraction(m1, n_s))
    sigma = op.w * tau * n_shift * scale
    if not sigma.is_sl2():
        raise InternalSolveFailure(f"constructed sigma {sigma!r} is not in SL2(Z)")
    sigma = sigma.to_int()
    verification = {
        "sigma_in_sl2": True,
        "c_sigma": cusp_denominator(sigma, n),
        "c_sigma_equals_n_over_m": cusp_denominator(sigma, n) == n // m,
        "m_squared_divides_n": n % (m * m) == 0,
        "m1_is_gcd_m_n_s": m1 == gcd(m, n_s),
        "m1_squared_divides_n_s": n_s % (m1 * m1) == 0,
    }
    if not all(v for v in verification.values() if isinstance(v, bool)):
        raise InternalSolveFailure(f"postcondition failed: {verification}")
    return ReductionCertificate(
        level=n,
        tau=tau,
        s_primes=s_primes,
        w=op,
        m1=m1,
        m=m,
        n_s=n_s,
        n_shift=n_shift,
        sigma=sigma,
        verification=verification,
    )


def _verify_lattice_floor(z_prime: PointH, n: int, m: int, bound) -> GapVerdict:
    """Decide |c z' + d|^2 >= bound(c) for all (c, d) != (0, 0), where bound
    never exceeds 3/4.

    Finite search: only pairs with |c z' + d|^2 < 3/4 can violate, which
    forces c^2 y'^2 < 3/4 and (c x' + d)^2 < 3/4, a finite box scanned
    exactly.  The sign symmetry (c, d) -> (-c, -d) reduces to c >= 0.
    """
    if m < 1 or n % (m * m) != 0:
        raise InvalidM(f"M^2 = {m * m} does not divide N = {n}")
    x, y = z_prime.x, z_prime.y

    def lhs(c: int, d: int) -> Fraction:
        return (c * x + d) ** 2 + (c * y) ** 2

    worst = (0, 1)
    min_lhs = lhs(0, 1)
    min_margin = min_lhs - bound(0)
    passed = min_margin >= 0
    c = 1
    while c * c * y * y * 4 < 3:
        center = -c * x
        for d in range(ceil(center - 1), floor(center + 1) + 1):
            val = lhs(c, d)
            margin = val - bound(c)
            if margin < min_margin:
                min_margin = margin
                min_lhs = val
                worst = (c, d)
                if margin < 0:
                    passed = False
        c += 1
    return GapVerdict(passed, worst, min_margin, min_lhs, bound(worst[0]))


def verify_gap_certificate(z_prime: PointH, n: int, m: int) -> GapVerdict:
    """Check the target lattice floor
    |c z' + d|^2 >= 3 M^2 gcd(c, N/M^2) / (4N) for all (c, d) != (0, 0).

    The right side is at most 3/4 since gcd(c, N/M^2) <= N/M^2, so the
    finite-box scan of _verify_lattice_floor decides the full quantifier.
    """
    n_over_m2 = n // (m * m) if m >= 1 and n % (m * m) == 0 else 1

    def bound(c: int) -> Fraction:
        g = gcd(c, n_over_m2) if c else n_over_m2
        return Fraction(3 * m * m * g, 4 * n)

    return _verify_lattice_floor(z_prime, n, m, bound)


def verify_gap_provable(z_prime: PointH, n: int, m: int) -> GapVerdict:
    """Check the weaker floor |c z' + d|^2 >= 3 M^4 gcd(c, N/M^2)^2 / (4 N^2).

    This is the constant the width-one construction actually guarantees
    (the target floor of verify_gap_certificate can fail for it); the right
    side is again at most 3/4.
    """
    n_over_m2 = n // (m * m) if m >= 1 and n % (m * m) == 0 else 1

    def bound(c: int) -> Fraction:
        g = gcd(c, n_over_m2) if c else n_over_m2
        return Fraction(3 * m**4 * g * g, 4 * n * n)

    return _verify_lattice_floor(z_prime, n, m, bound)


def _attach_gap_verdicts(cert: ReductionCertificate, z: PointH, n: int) -> bool:
    """Compute z' = sigma^-1 W z and record the height, scale and lattice
    verdicts on the certificate; returns True when all hold."""
    g = cert.sigma.inverse() * cert.w.w  # det = N_S > 0
    z_prime = mobius_act(g, z)
    cert.z_prime = z_prime
    yp = z_prime.y
    cert.verification["y_bound_ok"] = yp * yp * 4 * n * n >= 3 * cert.m**4
    if cert.z0 is not None:
        cert.verification["scale_identity_ok"] = (
            yp == Fraction(cert.m1 * cert.m1, cert.n_s) * cert.z0.y
        )
    verdict = verify_gap_certificate(z_prime, n, cert.m)
    cert.verification["lattice"] = verdict
    cert.verification["lattice_ok"] = verdict.passed
    cert.verification["lattice_provable_ok"] = verify_gap_provable(
        z_prime, n, cert.m
    ).passed
    return cert.verification["y_bound_ok"] and verdict.passed


def _first_column_candidates(w: PointH, n: int, m: int, budget: int = 4000):
    """Coprime first columns (a, c) of sigma with gcd(c, N) = N/M and
    Im(sigma^-1 w) >= sqrt(3) M^2 / (2N), i.e.
    (a - c x_w)^2 + c^2 y_w^2 <= 2 N y_w / (sqrt(3) M^2).

    Uses the rational over-cover 6 N y_w / (5 M^2) >= the true threshold;
    every emitted candidate is re-verified exactly downstream.
    """
    cap = Fraction(6 * n * w.y, 5 * m * m)
    step = n // m
    out = [(1, 0)] if m == 1 else []  # sigma with first column (1, 0)
    cc = step
    while cc * cc * w.y * w.y <= cap and len(out) < budget:
        for c in (cc, -cc):
            if gcd(c, n) != n // m:
                continue
            rem = cap - c * c * w.y * w.y
            center = c * w.x
            half = isqrt(rem.numerator // rem.denominator) + 1
            for a in range(ceil(center - half), floor(center + half) + 1):
                if (a - center) ** 2 <= rem and gcd(a, c) == 1:
                    out.append((a, c))
        cc += step
    return out[:budget]


def _complete_first_column(a: int, c: int) -> Mat2:
    """Some sigma in SL2(Z) with first column (a, c)."""
    old_r, r = a, c
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    # a*old_s + c*old_t = 1  ->  sigma = (a, -old_t; c, old_s)
    return Mat2(a, -old_t, c, old_s)


def gap_reduce(z: PointH, n: int) -> ReductionCertificate:
    """Move z by a width-one conjugation to z' = sigma^{-1} W z with
    certified height and lattice lower bounds.

    Records, exactly: C(sigma) = N/M, y'^2 >= 3 M^4 / (4 N^2), the full
    (c, d)-quantified inequality, and (construction mode) the scale
    identity Im z' = (M1^2/N_S) Im z0.

    The local-profile construction is tried first.  Its lattice bound can
    genuinely fail (the constant in the target inequality is stronger than
    what the construction guarantees), so on failure a deterministic
    verified search runs over M^2 | N, prime subsets S, and the finitely
    many sigma-columns compatible with the height bound; the first
    certificate passing every check is returned.  If nothing passes, the
    construction certificate is returned with its failing verdicts intact.
    """
    tau, z0 = fd_reduce(z)
    cert = width_one_conjugate(tau, n)
    cert.z0 = z0
    if _attach_gap_verdicts(cert, z, n):
        return cert
    fallback = cert
    m_values = [m for m in range(1, n + 1) if n % (m * m) == 0]
    subsets = [set()]
    for p, _e in factor(n):
        subsets += [s | {p} for s in subsets]
    subsets.sort(key=lambda s: (len(s), sorted(s)))
    for m in m_values:
        for s in subsets:
            op = atkin_lehner_matrix(n, s)
            w_point = mobius_act(op.w, z)
            for a, c in _first_column_candidates(w_point, n, m):
                sigma = _complete_first_column(a, c)
                if cusp_denominator(sigma, n) != n // m:
                    continue
                m1 = gcd(m, op.n_s)
                shift = (
                    tau.inverse()
                    * op.w.inverse()
                    * sigma
                    * Mat2(m1, 0, 0, Fraction(op.n_s, m1))
                )
                cand = ReductionCertificate(
                    level=n,
                    tau=tau,
                    s_primes=tuple(sorted(s)),
                    w=op,
                    m1=m1,
                    m=m,
                    n_s=op.n_s,
                    n_shift=shift,
                    sigma=sigma,
                    z0=z0,
                    method="search",
                    verification={
                        "sigma_in_sl2": sigma.is_sl2(),
                        "c_sigma": cusp_denominator(sigma, n),
                        "c_sigma_equals_n_over_m": True,
                        "m_squared_divides_n": n % (m * m) == 0,
                        "m1_is_gcd_m_n_s": True,
                        "m1_squared_divides_n_s": op.n_s % (m1 * m1) == 0,
                    },
                )
                g = cand.sigma.inverse() * cand.w.w
                z_prime = mobius_act(g, z)
                cand.z_prime = z_prime
                yp = z_prime.y
                cand.verification["y_bound_ok"] = yp * yp * 4 * n * n >= 3 * m**4
                if not cand.verification["y_bound_ok"]:
                    continue
                verdict = verify_gap_certificate(z_prime, n, m)
                cand.verification["lattice"] = verdict
                cand.verification["lattice_ok"] = verdict.passed
                cand.verification["lattice_provable_ok"] = verify_gap_provable(
                    z_prime, n, m
                ).passed
                if verdict.passed:
                    return cand
    return fallback
