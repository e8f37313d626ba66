"""Exact enumeration of determinant-l matrices near a point of the upper
half-plane, classification into generic / upper-triangular / parabolic
counts, parabolic certificates, amplifier weights and envelope bounds.

The family counted is Delta(l, N; M): integer matrices of determinant l
with lower-left entry divisible by N and upper-left entry 1 mod M.  The
closeness condition is u(gamma z, z) <= delta for the point-pair invariant
u(z, w) = |z - w|^2 / (4 Im z Im w).

Enumeration strategy.  u <= delta forces |cz + d|^2 <= l*K with
K = 1 + 2*delta + 2*sqrt(delta^2 + delta); the rational window
Kbar = 2 + 4*delta >= K keeps everything in integer arithmetic.  This
bounds c (a multiple of N) and, per c, the entry d.  For fixed (c, d)
with c != 0 the image gamma z lies in a Euclidean disc of radius
2 y sqrt(delta^2 + delta) <= y (2 delta + 1), pinning a = c*Re(gamma z)
+ l*q*(c*x + d*q)/... to a short interval, inside which a runs over the
arithmetic progression solving a*d == l (mod |c|) and a == 1 (mod M);
b = (a*d - l)/c is then forced.  For c = 0 the pairs (a, d) are the
divisor factorizations of l and b runs over a short interval.  Every
candidate passes a final exact filter, so the output is both sound and
complete.
"""

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm

import mpmath

from .arith import primes_in_progression, smooth_part, squarefree_split
from .conjugation import verify_gap_certificate
from .errors import BudgetExceeded, InvalidM
from .modgroup import Mat2, PointH, mobius_act, point_pair_u
from .precision import default_dps


def in_delta(gamma: Mat2, l: int, n: int, m: int) -> bool:
    """Membership of an integer matrix in Delta(l, N; M)."""
    return (
        gamma.is_integral()
        and gamma.det == l
        and int(gamma.c) % n == 0
        and int(gamma.a) % m == 1 % m
    )


def is_in_G(z: PointH, n: int, m: int) -> bool:
    """Membership in the region G(N; M): height y >= sqrt(3) M^2 / (2N) and
    |cz + d|^2 >= 3 M^2 gcd(c, N/M^2) / (4N) for all (c, d) != (0, 0)."""
    if m < 1 or n % (m * m) != 0:
        raise InvalidM(f"M^2 = {m * m} does not divide N = {n}")
    if z.y * z.y * 4 * n * n < 3 * m**4:
        return False
    return verify_gap_certificate(z, n, m).passed


def _ceildiv(a: int, b: int) -> int:
    return -((-a) // b)


def _floordiv(a: int, b: int) -> int:
    return a // b


def _merge_progression(r1: int, m1: int, r2: int, m2: int):
    """Intersect a == r1 (mod m1) with a == r2 (mod m2); None if empty."""
    g = gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    mm = m1 // g * m2
    if m2 // g == 1:
        return r1 % mm, mm
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g)
    return (r1 + m1 * t) % mm, mm


def _divisor_sign_pairs(l: int):
    """All (a, d) in Z^2 with a*d = l > 0, both sign patterns."""
    small = [e for e in range(1, isqrt(l) + 1) if l % e == 0]
    divs = small + [l // e for e in reversed(small) if e * e != l]
    for a in divs:
        d = l // a
        yield a, d
        yield -a, -d


def enumerate_delta_near(
    z: PointH,
    l: int,
    delta,
    n: int,
    m: int,
    c_budget: int = 400_000,
) -> list[Mat2]:
    """The complete set of gamma in Delta(l, N; M) with u(gamma z, z) <= delta,
    sorted lexicographically by (c, a, d, b).

    Raises BudgetExceeded when the c-window holds more than c_budget
    multiples of N (guards against extremely small y).
    """
    delta = Fraction(delta)
    if l < 1 or delta < 0 or n < 1 or m < 1:
        raise ValueError("need l >= 1, delta >= 0, N >= 1, M >= 1")
    x, y = z.x, z.y
    q = lcm(x.denominator, y.denominator)
    px = int(x * q)
    py = int(y * q)
    dn, dd = delta.numerator, delta.denominator
    # l*Kbar = WN/dd with Kbar = 2 + 4*delta
    wn = 2 * l * (dd + 2 * dn)
    found: list[tuple[int, int, int, int]] = []

    # exact final filter: |-c z^2 + (a-d) z + b|^2 <= 4 l delta y^2,
    # cleared to integers over the common denominator q
    pxx_pyy = px * px - py * py
    exact_rhs = 4 * l * dn * py * py * q * q

    def exact_ok(c: int, a: int, d: int, b: int) -> bool:
        s = a - d
        re = -c * pxx_pyy + s * px * q + b * q * q
        im = -2 * c * px * py + s * py * q
        return (re * re + im * im) * dd <= exact_rhs

    # -- c = 0 stratum: a*d = l, b in a short window --------------------
    for a, d in _divisor_sign_pairs(l):
        if (a - 1) % m:
            continue
        s = a - d
        rhs2 = py * py * (4 * l * dn - s * s * dd)
        if rhs2 < 0:
            continue
        rb = isqrt(rhs2 // dd)
        for b in range(_ceildiv(-s * px - rb, q), _floordiv(-s * px + rb, q) + 1):
            if exact_ok(0, a, d, b):
                found.append((0, a, d, b))

    # -- c != 0 strata ---------------------------------------------------
    cmax_sq = (wn * q * q) // (py * py * dd)
    cmax = isqrt(cmax_sq)
    n_c_values = 2 * (cmax // n)
    if n_c_values > c_budget:
        raise BudgetExceeded(
            f"c-window holds {n_c_values} multiples of N={n}, budget {c_budget}"
        )
    half_factor = py * (2 * dn + dd)  # |c| * r_hat numerator piece
    for cc in range(n, cmax + 1, n):
        for c in (cc, -cc):
            rc_num = wn * q * q - c * c * py * py * dd
            rd = isqrt(rc_num // dd)
            cpx = c * px
            d_lo = _ceildiv(-cpx - rd, q)
            d_hi = _floordiv(-cpx + rd, q)
            for d in range(d_lo, d_hi + 1):
                g = gcd(d, cc)
                if l % g:
                    continue
                c1 = cc // g
                if c1 == 1:
                    prog = (1 % m, m)
                else:
                    a0 = (l // g) * pow((d // g) % c1, -1, c1) % c1
                    prog = _merge_progression(a0, c1, 1 % m, m)
                    if prog is None:
                        continue
                r_a, m_a = prog
                # disc window for a: |a - c(x + Re w)| <= |c| * y * (2 delta + 1)
                qd = (cpx + d * q) ** 2 + (c * py) ** 2
                center_num = (cpx * qd + l * q * q * (cpx + d * q)) * dd
                half_num = cc * half_factor * qd
                den = q * qd * dd
                a_lo = _ceildiv(center_num - half_num, den)
                a_hi = _floordiv(center_num + half_num, den)
                a = a_lo + (r_a - a_lo) % m_a
                while a <= a_hi:
                    b = (a * d - l) // c
                    if exact_ok(c, a, d, b):
                        found.append((c, a, d, b))
                    a += m_a

    found.sort()
    return [Mat2(a, b, c, d) for c, a, d, b in found]


@dataclass
class CountReport:
    """Classified enumeration result for one (z, l, delta, N, M) cell."""

    z: PointH
    l: int
    delta: Fraction
    n: int
    m: int
    star: list[Mat2]  # c != 0, tr^2 != 4l
    upper: list[Mat2]  # c == 0, tr^2 != 4l
    parabolic: list[Mat2]  # tr^2 == 4l

    @property
    def n_star(self) -> int:
        return len(self.star)

    @property
    def n_u(self) -> int:
        return len(self.upper)

    @property
    def n_p(self) -> int:
        return len(self.parabolic)

    @property
    def total(self) -> int:
        return self.n_star + self.n_u + self.n_p

    def to_json(self, include_matrices: bool = False) -> dict:
        out = {
            "z": self.z.serialize(),
            "l": self.l,
            "delta": str(self.delta),
            "N": self.n,
            "M": self.m,
            "n_star": self.n_star,
            "n_u": self.n_u,
            "n_p": self.n_p,
            "total": self.total,
        }
        if include_matrices:
            out["star"] = [g.to_json() for g in self.star]
            out["upper"] = [g.to_json() for g in self.upper]
            out["parabolic"] = [g.to_json() for g in self.parabolic]
        return out


def classify_counts(
    z: PointH, l: int, delta, n: int, m: int, c_budget: int = 400_000
) -> CountReport:
    """Partition the enumeration by (c != 0, tr^2 != 4l) / (c = 0, tr^2 != 4l)
    / (tr^2 = 4l)."""
    delta = Fraction(delta)
    star, upper, para = [], [], []
    for g in enumerate_delta_near(z, l, delta, n, m, c_budget):
        if g.trace * g.trace == 4 * l:
            para.append(g)
        elif g.c != 0:
            star.append(g)
        else:
            upper.append(g)
    return CountReport(z, l, delta, n, m, star, upper, para)


@dataclass
class ParabolicCertificate:
    """Conjugation data for one parabolic matrix: tau(inf) is the fixed
    point, tau^-1 gamma tau = sign * (m_root, t; 0, m_root), and t splits
    as t0 * t1 with t1 the part of t supported on the primes of N."""

    gamma: Mat2
    m_root: int
    sign: int
    tau: Mat2
    t: int
    t0: int
    t1: int
    c_tau: int
    d_tau: int
    scalar: bool
    checks: dict

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma.to_json(),
            "m": self.m_root,
            "sign": self.sign,
            "tau": self.tau.to_json(),
            "t": self.t,
            "t0": self.t0,
            "t1": self.t1,
            "c_tau": self.c_tau,
            "d_tau": self.d_tau,
            "scalar": self.scalar,
            "checks": dict(self.checks),
        }


def _fixed_point_conjugator(gamma: Mat2) -> Mat2:
    """tau in SL2(Z) with tau(inf) = the fixed point of a parabolic gamma.

    Normalized so that the lower-left entry of tau^-1 is >= 0; tau is the
    identity when the fixed point is inf.
    """
    a, b, c, d = gamma.entries()
    if c == 0:
        return Mat2.identity()
    p0 = a - d
    q0 = 2 * c
    g = gcd(p0, q0)
    p0 //= g
    q0 //= g
    if q0 > 0:
        p0, q0 = -p0, -q0
    # solve p0*w + q0*v = 1; tau = (p0, -v; q0, w)
    old_r, r = p0, q0
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return Mat2(p0, -old_t, q0, old_s)


def parabolic_certify(
    z: PointH, l: int, delta, n: int, m: int, c_budget: int = 400_000
) -> list[ParabolicCertificate]:
    """Certificates for every parabolic matrix counted at (z, l, delta, N, M).

    Empty for non-square l (consistent with the parabolic count being 0).
    Each certificate records exact verdicts: N | c_tau^2 * t, the
    divisibility inequality t0^2 M^2 / N0^2 <= t^2 M^4 gcd(c_tau, N/M^2)^2
    / N^2 for t != 0, and u(gamma z, z) * 4 l y^2 = t^2 |c_tau z + d_tau|^4.
    """
    delta = Fraction(delta)
    ml = isqrt(l)
    if ml * ml != l:
        return []
    _n2, n0 = squarefree_split(n)
    n_over_m2 = n // (m * m) if n % (m * m) == 0 else None
    report = classify_counts(z, l, delta, n, m, c_budget)
    certs = []
    for gamma in report.parabolic:
        tau = _fixed_point_conjugator(gamma)
        conj = tau.inverse() * gamma * tau
        conj = conj.to_int()
        assert conj.c == 0 and conj.a == conj.d and abs(conj.a) == ml, conj
        sign = 1 if conj.a > 0 else -1
        t = sign * conj.b
        if t:
            t1 = smooth_part(t, n)
            t0 = t // t1
        else:
            t1, t0 = 1, 0
        tinv = tau.adjugate()
        c_tau, d_tau = int(tinv.c), int(tinv.d)
        checks = {
            "n_divides_c_tau_sq_t": (c_tau * c_tau * t) % n == 0,
            "scalar_case": t == 0,
        }
        if t and n_over_m2 is not None:
            g = gcd(abs(c_tau), n_over_m2) if c_tau else n_over_m2
            checks["t0_divisibility"] = (
                t0 * t0 * m * m * n * n <= t * t * m**4 * g * g * n0 * n0
            )
        u_val = point_pair_u(mobius_act(gamma, z), z)
        lat = (c_tau * z.x + d_tau) ** 2 + (c_tau * z.y) ** 2
        checks["u_identity"] = u_val * 4 * l * z.y * z.y == t * t * lat * lat
        certs.append(
            ParabolicCertificate(
                gamma, ml, sign, tau, t, t0, t1, c_tau, d_tau, t == 0, checks
            )
        )
    return certs


@dataclass(frozen=True)
class AmplifierWeights:
    """Nonnegative weights y_l supported on 1 and products of primes
    p == 1 (mod M) in (Lambda, 2*Lambda): y_1 = Lambda/M and y_l = 1 for
    l in {l1, l1*l2, l1*l2^2, l1^2*l2^2}."""

    lam: int
    m: int
    primes: tuple[int, ...]
    weights: dict[int, Fraction]

    def support(self) -> list[int]:
        return sorted(self.weights)


def amplifier_weights(lam: int, m: int) -> AmplifierWeights:
    primes = tuple(primes_in_progression(lam, m))
    weights = {1: Fraction(lam, m)}
    one = Fraction(1)
    for p in primes:
        weights[p] = one
        for p2 in primes:
            weights[p * p2] = one
            weights[p * p2 * p2] = one
            weights[p * p * p2 * p2] = one
    return AmplifierWeights(lam, m, primes, weights)


def amplified_count_sum(
    z: PointH,
    lam: int,
    delta,
    n: int,
    m: int,
    c_budget: int = 400_000,
    dps: int | None = None,
):
    """Weighted count sum_l y_l / sqrt(l) * N(z, l, delta, N; M).

    Returns (value, pairs, weights) with value an mpmath float at >= dps
    significant digits and pairs the exact list of (l, y_l, count).

    The envelope bound assumes M^2 <= Lambda and z in G(N; M); the sum is
    still well-defined otherwise, so violations only warn.
    """
    if m * m > lam:
        warnings.warn(f"amplifier envelope assumes M^2 <= Lambda, got M={m}, Lambda={lam}")
    if not is_in_G(z, n, m):
        warnings.warn(f"point {z!r} lies outside G({n};{m}); bounds may not apply")
    dps = dps or default_dps()
    w = amplifier_weights(lam, m)
    pairs = []
    with mpmath.workdps(dps + 10):
        total = mpmath.mpf(0)
        for l in w.support():
            cnt = len(enumerate_delta_near(z, l, delta, n, m, c_budget))
            yl = w.weights[l]
            pairs.append((l, yl, cnt))
            if cnt:
                term = mpmath.mpf(yl.numerator) / yl.denominator * cnt
                total += term / mpmath.sqrt(l)
    return total, pairs, w


def bound_rhs_ampl(n: int, m: int, lam: int, y, dps: int | None = None):
    """Four-term envelope Lambda/M + Lambda^2 y N0 / M^3
    + Lambda^(5/2) / (M^2 sqrt(N)) + Lambda^4 / (M N)."""
    if m < 1 or n % (m * m) != 0:
        raise InvalidM(f"M^2 = {m * m} does not divide N = {n}")
    y = Fraction(y)
    dps = dps or default_dps()
    n0 = squarefree_split(n)[1]
    with mpmath.workdps(dps + 10):
        yf = mpmath.mpf(y.numerator) / y.denominator
        lamf = mpmath.mpf(lam)
        return (
            lamf / m
            + lamf**2 * yf * n0 / m**3
            + lamf ** mpmath.mpf("2.5") / (m * m * mpmath.sqrt(n))
            + lamf**4 / (m * n)
        )


@dataclass
class SchmidtCheck:
    """Exact |L cap D| against the 1 + R/lambda1 + R^2/covol envelope for a
    rank-2 lattice and a centered disc (sanity utility, not a shortcut)."""

    count: int
    lambda1_sq: Fraction
    covolume: Fraction
    radius_sq: Fraction

    def envelope(self) -> float:
        r = float(self.radius_sq) ** 0.5
        return 1 + r / float(self.lambda1_sq) ** 0.5 + float(self.radius_sq) / float(
            self.covolume
        )

    def ratio(self) -> float:
        return self.count / self.envelope()


def schmidt_disc_count(v1, v2, radius_sq) -> SchmidtCheck:
    """Count lattice points of Z*v1 + Z*v2 in the closed disc |P|^2 <= radius_sq.

    Coefficient bounds come from Cramer's rule: |i| <= R |v2| / covol and
    |j| <= R |v1| / covol; the scan inside the box is exact.
    """
    v1 = (Fraction(v1[0]), Fraction(v1[1]))
    v2 = (Fraction(v2[0]), Fraction(v2[1]))
    radius_sq = Fraction(radius_sq)
    det = v1[0] * v2[1] - v1[1] * v2[0]
    if det == 0:
        raise ValueError("vectors do not span a rank-2 lattice")
    covol = abs(det)
    norm1 = v1[0] ** 2 + v1[1] ** 2
    norm2 = v2[0] ** 2 + v2[1] ** 2

    def coeff_bound(norm_other: Fraction) -> int:
        bound_sq = radius_sq * norm_other / (covol * covol)
        return isqrt(bound_sq.numerator // bound_sq.denominator) + 1

    imax = coeff_bound(norm2)
    jmax = coeff_bound(norm1)
    count = 0
    for i in range(-imax, imax + 1):
        for j in range(-jmax, jmax + 1):
            p = (i * v1[0] + j * v2[0], i * v1[1] + j * v2[1])
            if p[0] ** 2 + p[1] ** 2 <= radius_sq:
                count += 1
    # shortest vector: |v| <= min(|v1|, |v2|) bounds the coefficient box
    ub = min(norm1, norm2)
    lambda1_sq = ub

    def sv_bound(norm_other: Fraction) -> int:
        bound_sq = ub * norm_other / (covol * covol)
        return isqrt(bound_sq.numerator // bound_sq.denominator) + 1

    for i in range(-sv_bound(norm2), sv_bound(norm2) + 1):
        for j in range(-sv_bound(norm1), sv_bound(norm1) + 1):
            if (i, j) == (0, 0):
                continue
            p = (i * v1[0] + j * v2[0], i * v1[1] + j * v2[1])
            nrm = p[0] ** 2 + p[1] ** 2
            if nrm < lambda1_sq:
                lambda1_sq = nrm
    return SchmidtCheck(count, lambda1_sq, covol, radius_sq)


def __getattr__(name):
    if name == "lemma_harness":
        from .harness import lemma_harness

        return lemma_harness
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
