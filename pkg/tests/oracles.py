"""Independent oracles and random generators shared by the test modules.

These deliberately avoid the library's own enumeration logic: the box
oracle scans raw entry boxes against the defining conditions only, and the
random matrix generators build group elements from words in S and T.
"""

import random
from fractions import Fraction

import numpy as np

from cuspnorm.modgroup import Mat2, PointH, mobius_act, point_pair_u

S = Mat2(0, -1, 1, 0)
T = Mat2(1, 1, 0, 1)


def rand_fraction(rng: random.Random, lo: int, hi: int, den_max: int = 64) -> Fraction:
    den = rng.randint(1, den_max)
    num = rng.randint(lo * den, hi * den)
    return Fraction(num, den)


def rand_point(rng: random.Random, den_max: int = 64) -> PointH:
    x = rand_fraction(rng, -2, 2, den_max)
    y = rand_fraction(rng, 0, 2, den_max)
    if y <= 0:
        y = Fraction(rng.randint(1, den_max), den_max)
    return PointH(x, y)


def rand_sl2(rng: random.Random, words: int = 6) -> Mat2:
    """Random SL2(Z) element as a word in S and powers of T."""
    g = Mat2.identity()
    for _ in range(rng.randint(1, words)):
        if rng.random() < 0.5:
            g = g * S
        g = g * Mat2(1, rng.randint(-3, 3), 0, 1)
    if rng.random() < 0.5:
        g = -g
    return g


def rand_sl2_bounded(rng: random.Random, bound: int = 50) -> Mat2:
    """Random SL2(Z) element with all entries bounded by `bound`."""
    while True:
        g = rand_sl2(rng)
        if all(abs(int(e)) <= bound for e in g.entries()):
            return g


def rand_det_matrix(rng: random.Random, det: int) -> Mat2:
    """Random integer matrix of given positive determinant."""
    a = rng.choice([d for d in range(1, det + 1) if det % d == 0])
    h = Mat2(a, rng.randint(0, det // a - 1) if det // a > 1 else 0, 0, det // a)
    return rand_sl2(rng, 3) * h * rand_sl2(rng, 3)


def box_oracle_delta(z: PointH, l: int, delta, n: int, m: int, box: int):
    """All gamma in Delta(l, N; M) with max |entry| <= box and
    u(gamma z, z) <= delta, straight from the definitions.

    numpy filters the determinant and congruence conditions and prefilters
    u in floating point with a generous margin; the u-condition is then
    decided exactly with Fractions on every surviving candidate, so the
    result is exact.
    """
    delta = Fraction(delta)
    zf = complex(z.x) + 1j * complex(z.y)
    yf = float(z.y)
    slack = float(delta) + 1e-6 * (1 + float(delta))
    rng_entries = np.arange(-box, box + 1, dtype=np.int64)
    grid_a, grid_d = np.meshgrid(rng_entries, rng_entries, indexing="ij")
    out = []

    def u_exact_ok(a, b, c, d):
        g = Mat2(int(a), int(b), int(c), int(d))
        return point_pair_u(mobius_act(g, z), z) <= delta

    def prefilter(a_arr, b_arr, c, d_arr):
        gz = (a_arr * zf + b_arr) / (c * zf + d_arr)
        u = np.abs(gz - zf) ** 2 / (4 * gz.imag * yf)
        return u <= slack

    for c in range(-box, box + 1):
        if c % n:
            continue
        if c == 0:
            for a in rng_entries:
                a = int(a)
                if a == 0 or l % a or (a - 1) % m:
                    continue
                d = l // a
                if abs(d) > box:
                    continue
                b_arr = rng_entries.astype(np.float64)
                keep = prefilter(
                    np.full_like(b_arr, a), b_arr, 0.0, np.full_like(b_arr, d)
                )
                for b in rng_entries[keep]:
                    if u_exact_ok(a, b, 0, d):
                        out.append((a, int(b), 0, d))
        else:
            num = grid_a * grid_d - l
            mask = (num % c == 0) & ((grid_a - 1) % m == 0)
            a_c = grid_a[mask]
            d_c = grid_d[mask]
            b_c = (a_c * d_c - l) // c
            in_box = np.abs(b_c) <= box
            a_c, d_c, b_c = a_c[in_box], d_c[in_box], b_c[in_box]
            keep = prefilter(
                a_c.astype(np.float64),
                b_c.astype(np.float64),
                float(c),
                d_c.astype(np.float64),
            )
            for a, b, d in zip(a_c[keep], b_c[keep], d_c[keep]):
                if u_exact_ok(a, b, c, d):
                    out.append((int(a), int(b), c, int(d)))
    return sorted(out)
