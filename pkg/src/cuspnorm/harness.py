"""Sweep harness: evaluates the counting envelopes cell by cell and reports
exact left-hand sides, envelope right-hand sides (all N^epsilon factors set
to 1), and their ratios.

A cell is (lemma, N, M, L-or-Lambda, sample index); its point z is drawn
from a per-cell seeded generator and rejection-sampled into G(N; M), so the
output is byte-identical across reruns and worker counts.  Cells are
independent pure computations; with jobs > 1 they are fanned out to a
process pool and merged in canonical order.
"""

import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import mpmath

from .arith import primes_up_to, squarefree_split
from .counting import (
    amplified_count_sum,
    bound_rhs_ampl,
    classify_counts,
    is_in_G,
)
from .errors import ConfigError
from .modgroup import PointH
from .precision import default_dps

LEMMAS = ("eq1", "eq2", "eq3", "eq4", "eq5", "eq6", "eq7", "para", "ampl")

CSV_VERSION = "cuspnorm-harness-csv v1"
CSV_HEADER = "lemma,N,M,L_or_Lambda,delta,x,y,lhs,rhs,ratio"


@dataclass
class HarnessConfig:
    lemma: str
    n_lo: int = 1
    n_hi: int = 60
    delta: Fraction = Fraction(1)
    samples: int = 1
    seed: int = 0
    jobs: int = 1
    l1: int = 1  # fixed first determinant factor for eq3
    dps: int | None = None

    def __post_init__(self):
        self.delta = Fraction(self.delta)
        if self.lemma not in LEMMAS:
            raise ConfigError(f"unknown lemma {self.lemma!r}; expected one of {LEMMAS}")
        if self.n_lo < 1 or self.n_hi < self.n_lo:
            raise ConfigError(f"bad level range {self.n_lo}..{self.n_hi}")
        if self.delta < 0:
            raise ConfigError("delta must be >= 0")
        if self.samples < 1 or self.jobs < 1:
            raise ConfigError("samples and jobs must be >= 1")


def _cell_seed(seed: int, lemma: str, n: int, m: int, lval: int, k: int) -> int:
    """Stable per-cell seed, independent of execution order and platform."""
    key = f"{seed}|{lemma}|{n}|{m}|{lval}|{k}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def _ceil_sqrt_ratio(a: int, b: int) -> int:
    """Smallest s >= 0 with s*s*b >= a (a >= 0, b >= 1)."""
    s = isqrt(a // b)
    while s * s * b < a:
        s += 1
    return s


def sample_point_in_g(
    n: int,
    m: int,
    rng: random.Random,
    y_hi_sq: Fraction,
    max_tries: int = 200,
) -> PointH | None:
    """Rational z with x = k/(2N+1), y = j/(4N^2), rejection-sampled into
    G(N; M); y ranges over [sqrt(3) M^2/(2N), sqrt(y_hi_sq)]."""
    den = 4 * n * n
    num_lo = _ceil_sqrt_ratio(3 * m**4 * den * den, 4 * n * n)
    hi = y_hi_sq * den * den
    num_hi = isqrt(hi.numerator // hi.denominator)
    if num_hi < num_lo:
        return None
    xden = 2 * n + 1
    for _ in range(max_tries):
        z = PointH(
            Fraction(rng.randint(-n, n), xden),
            Fraction(rng.randint(num_lo, num_hi), den),
        )
        if is_in_G(z, n, m):
            return z
    return None


def default_l_values(n: int) -> tuple[int, ...]:
    """The sweep's amplifier-length rule: ceil(N^(1/3)) and its double."""
    c = 1
    while c * c * c < n:
        c += 1
    return (c, 2 * c)


def _primes_cong(limit: int, m: int) -> list[int]:
    return [p for p in primes_up_to(limit) if p % m == 1 % m]


def _run_cell(args: tuple) -> dict | None:
    (lemma, n, m, lval, k, seed, delta_s, l1, dps) = args
    delta = Fraction(delta_s)
    dps = dps or default_dps()
    rng = random.Random(_cell_seed(seed, lemma, n, m, lval, k))
    if lemma == "ampl":
        y_hi_sq = Fraction(1, n)  # the amplifier envelope needs y <= N^(-1/2)
    else:
        y_hi_sq = Fraction(1)
    z = sample_point_in_g(n, m, rng, y_hi_sq)
    if z is None:
        return None
    x, y = z.x, z.y
    with mpmath.workdps(dps + 10):
        yf = mpmath.mpf(y.numerator) / y.denominator
        sq_n = mpmath.sqrt(n)
        n0 = squarefree_split(n)[1]
        L = mpmath.mpf(lval)
        if lemma == "ampl":
            lhs, _pairs, _w = amplified_count_sum(z, lval, delta, n, m, dps=dps)
            rhs = bound_rhs_ampl(n, m, lval, y, dps=dps)
        elif lemma == "para":
            root = isqrt(lval)
            cnt = classify_counts(z, lval, delta, n, m).n_p
            lhs = mpmath.mpf(cnt)
            if root * root == lval:
                rhs = 1 + root * yf * n0 / m + mpmath.mpf(root) * n0 / n
            else:
                rhs = mpmath.mpf(1)
        elif lemma in ("eq1", "eq2", "eq3", "eq7"):
            total = 0
            for l0 in range(1, lval + 1):
                if l0 % m != 1 % m:
                    continue
                if lemma == "eq1":
                    total += classify_counts(z, l0, delta, n, m).n_star
                elif lemma == "eq2":
                    total += classify_counts(z, l0 * l0, delta, n, m).n_star
                elif lemma == "eq3":
                    total += classify_counts(z, l1 * l0 * l0, delta, n, m).n_star
                else:
                    total += classify_counts(z, l0, delta, n, m).n_u
            lhs = mpmath.mpf(total)
            if lemma == "eq1":
                rhs = L / (m * n * yf) + L ** mpmath.mpf("1.5") / (m * m * sq_n) \
                    + L**2 / (m * m * n)
            elif lemma == "eq2":
                rhs = L / (n * yf) + L**2 / (m * sq_n) + L**3 / (m * n)
            elif lemma == "eq3":
                rhs = L ** mpmath.mpf("1.5") / (n * yf) + L**3 / (m * sq_n) \
                    + L ** mpmath.mpf("4.5") / (m * n)
            else:
                rhs = 1 + mpmath.sqrt(L) * yf * sq_n / m + L * yf / m
        else:  # eq4, eq5, eq6: double sums over primes == 1 mod M up to L
            primes = _primes_cong(lval, m)
            products: dict[int, int] = {}
            for p in primes:
                for p2 in primes:
                    if lemma == "eq4":
                        val = p * p2
                    elif lemma == "eq5":
                        val = p * p2 * p2
                    else:
                        val = p * p * p2 * p2
                    products[val] = products.get(val, 0) + 1
            total = 0
            for val, mult in sorted(products.items()):
                total += mult * classify_counts(z, val, delta, n, m).n_u
            lhs = mpmath.mpf(total)
            if lemma == "eq4":
                rhs = L / m + L**2 * yf * sq_n / (m * m) + L**3 * yf / (m * m)
            elif lemma == "eq5":
                rhs = L / m + L ** mpmath.mpf("2.5") * yf * sq_n / (m * m) \
                    + L**4 * yf / (m * m)
            else:
                rhs = 1 + L**2 * yf * sq_n / m + L**4 * yf / m
        ratio = lhs / rhs
        return {
            "lemma": lemma,
            "N": n,
            "M": m,
            "L_or_Lambda": lval,
            "delta": str(delta),
            "x": f"{x.numerator}/{x.denominator}",
            "y": f"{y.numerator}/{y.denominator}",
            "lhs": mpmath.nstr(lhs, dps),
            "rhs": mpmath.nstr(rhs, dps),
            "ratio": mpmath.nstr(ratio, dps),
        }


def harness_cells(config: HarnessConfig) -> list[tuple]:
    """Canonical (sorted) cell list for a sweep."""
    cells = []
    delta_s = str(config.delta)
    for n in range(config.n_lo, config.n_hi + 1):
        n0 = squarefree_split(n)[1]
        m_values = [m for m in range(1, n0 + 1) if n0 % m == 0]
        for m in m_values:
            for lval in default_l_values(n):
                if config.lemma == "ampl":
                    if m * m > lval:
                        continue
                    lvals = [lval]
                elif config.lemma == "para":
                    # one cell per determinant l <= L, l == 1 (mod M)
                    lvals = [l0 for l0 in range(1, lval + 1) if l0 % m == 1 % m]
                else:
                    if m * m > lval:
                        continue
                    lvals = [lval]
                for lv in lvals:
                    for k in range(config.samples):
                        cells.append(
                            (config.lemma, n, m, lv, k, config.seed, delta_s,
                             config.l1, config.dps)
                        )
    return sorted(set(cells))


@dataclass
class HarnessResult:
    config: HarnessConfig
    rows: list[dict]
    skipped: int

    def max_ratio(self) -> tuple[str, dict | None]:
        """Largest ratio over the rows, compared exactly on the mpf values."""
        best = None
        best_row = None
        with mpmath.workdps((self.config.dps or default_dps()) + 10):
            for row in self.rows:
                r = mpmath.mpf(row["ratio"])
                if best is None or r > best:
                    best = r
                    best_row = row
        return (best_row["ratio"] if best_row else "0.0", best_row)

    def to_json(self) -> dict:
        ratio, argmax = self.max_ratio()
        return {
            "lemma": self.config.lemma,
            "levels": [self.config.n_lo, self.config.n_hi],
            "delta": str(self.config.delta),
            "samples": self.config.samples,
            "seed": self.config.seed,
            "skipped_cells": self.skipped,
            "max_ratio": ratio,
            "argmax": argmax,
            "rows": self.rows,
        }

    def to_csv(self) -> str:
        lines = [f"# {CSV_VERSION}", CSV_HEADER]
        for row in self.rows:
            lines.append(
                ",".join(
                    str(row[k])
                    for k in (
                        "lemma", "N", "M", "L_or_Lambda", "delta",
                        "x", "y", "lhs", "rhs", "ratio",
                    )
                )
            )
        return "\n".join(lines) + "\n"


def lemma_harness(config: HarnessConfig) -> HarnessResult:
    """Run the sweep for one lemma; deterministic for a fixed seed,
    regardless of the jobs setting."""
    cells = harness_cells(config)
    if config.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=8))
    else:
        results = [_run_cell(c) for c in cells]
    rows = [r for r in results if r is not None]
    skipped = sum(1 for r in results if r is None)
    return HarnessResult(config, rows, skipped)
