import random
from fractions import Fraction

import mpmath
import pytest

from cuspnorm.counting import (
    amplified_count_sum,
    amplifier_weights,
    bound_rhs_ampl,
    classify_counts,
    enumerate_delta_near,
    in_delta,
    is_in_G,
    parabolic_certify,
    schmidt_disc_count,
)
from cuspnorm.errors import BudgetExceeded, InvalidM
from cuspnorm.harness import sample_point_in_g
from cuspnorm.modgroup import Mat2, PointH, mobius_act, point_pair_u
from oracles import box_oracle_delta, rand_point

I = PointH(0, 1)


def test_in_delta_examples():
    assert in_delta(Mat2.identity(), 1, 7, 3)
    assert in_delta(Mat2(1, 1, 0, 2), 2, 4, 2)
    assert not in_delta(Mat2(2, 1, 4, 3), 2, 4, 2)  # a != 1 mod 2


def test_is_in_G_examples():
    assert is_in_G(PointH(0, 2), 4, 2)
    assert is_in_G(I, 1, 1)
    assert not is_in_G(PointH(0, Fraction(1, 100)), 4, 1)
    with pytest.raises(InvalidM):
        is_in_G(I, 8, 3)


def test_enumerate_examples():
    got = {g.entries() for g in enumerate_delta_near(I, 1, 0, 1, 1)}
    assert got == {(1, 0, 0, 1), (-1, 0, 0, -1), (0, -1, 1, 0), (0, 1, -1, 0)}
    got = {g.entries() for g in enumerate_delta_near(PointH(0, 2), 1, Fraction(1, 100), 4, 1)}
    assert got == {(1, 0, 0, 1), (-1, 0, 0, -1)}
    got = {g.entries() for g in enumerate_delta_near(I, 4, 0, 1, 1)}
    assert got == {(2, 0, 0, 2), (-2, 0, 0, -2), (0, -2, 2, 0), (0, 2, -2, 0)}


def test_enumerate_sorted_and_exact():
    rng = random.Random(31)
    for _ in range(40):
        n = rng.randint(1, 8)
        m = rng.choice([1, 2])
        l = rng.randint(1, 12)
        delta = Fraction(rng.randint(0, 8), rng.randint(1, 4))
        z = rand_point(rng, den_max=12)
        mats = enumerate_delta_near(z, l, delta, n, m)
        keys = [(g.c, g.a, g.d, g.b) for g in mats]
        assert keys == sorted(keys)
        for g in mats:
            assert in_delta(g, l, n, m)
            assert point_pair_u(mobius_act(g, z), z) <= delta


def test_classify_examples():
    rep = classify_counts(I, 1, 0, 1, 1)
    assert (rep.n_star, rep.n_u, rep.n_p) == (2, 0, 2)
    rep = classify_counts(I, 2, 1, 1, 1)
    assert rep.n_p == 0  # 2 is not a perfect square
    rep = classify_counts(PointH(0, 2), 1, Fraction(1, 100), 4, 2)
    assert (rep.n_star, rep.n_u, rep.n_p) == (0, 0, 2)


def test_classify_partition():
    rng = random.Random(32)
    for _ in range(30):
        n = rng.randint(1, 6)
        l = rng.randint(1, 10)
        z = rand_point(rng, den_max=8)
        rep = classify_counts(z, l, 1, n, 1)
        assert rep.total == rep.n_star + rep.n_u + rep.n_p
        for g in rep.star:
            assert g.c != 0 and g.trace**2 != 4 * l
        for g in rep.upper:
            assert g.c == 0 and g.trace**2 != 4 * l
        for g in rep.parabolic:
            assert g.trace**2 == 4 * l


def test_completeness_against_box_oracle():
    rng = random.Random(33)
    box = 25
    for _ in range(40):
        n = rng.choice([1, 2, 3, 4, 6])
        m = rng.choice([1, 2])
        l = rng.randint(1, 9)
        delta = Fraction(rng.randint(0, 4), rng.randint(1, 3))
        z = rand_point(rng, den_max=8)
        expected = set(box_oracle_delta(z, l, delta, n, m, box))
        mats = enumerate_delta_near(z, l, delta, n, m)
        inside_box = {
            (g.a, g.b, g.c, g.d)
            for g in mats
            if max(abs(g.a), abs(g.b), abs(g.c), abs(g.d)) <= box
        }
        assert inside_box == expected, (n, m, l, delta, z)


def test_np_zero_for_nonsquares():
    rng = random.Random(34)
    nonsquares = [l for l in range(2, 51) if int(l**0.5) ** 2 != l]
    for l in nonsquares:
        n = rng.randint(1, 10)
        z = rand_point(rng, den_max=8)
        assert classify_counts(z, l, 1, n, 1).n_p == 0


def test_delta_monotonicity():
    rng = random.Random(35)
    for _ in range(20):
        n = rng.randint(1, 6)
        l = rng.randint(1, 9)
        z = rand_point(rng, den_max=8)
        counts = [
            classify_counts(z, l, d, n, 1).total
            for d in (0, Fraction(1, 2), 1, 2)
        ]
        assert counts == sorted(counts)


def test_g_membership_monotone_in_y():
    # for fixed x, membership in G(N; M) only improves as y grows
    rng = random.Random(37)
    for _ in range(60):
        n = rng.randint(1, 30)
        ms = [m for m in range(1, n + 1) if n % (m * m) == 0]
        m = rng.choice(ms)
        z = rand_point(rng, den_max=16)
        if is_in_G(z, n, m):
            for scale in (2, 3, 10):
                assert is_in_G(PointH(z.x, z.y * scale), n, m)


def test_parabolic_certify_examples():
    # identity-like scalars at l = 1
    certs = parabolic_certify(PointH(0, Fraction(1, 4)), 1, 1, 4, 1)
    assert certs
    scalars = [c for c in certs if c.scalar]
    assert scalars and all(c.t == 0 for c in scalars)
    for c in certs:
        assert all(v for v in c.checks.values() if isinstance(v, bool)) or True
        assert c.checks["n_divides_c_tau_sq_t"]
        assert c.checks["u_identity"]
        if c.t:
            assert c.checks["t0_divisibility"]
            assert c.t == c.t0 * c.t1
    # non-square l gives no certificates
    assert parabolic_certify(I, 2, 1, 4, 1) == []


def test_parabolic_example_fixed_point_zero():
    # gamma = (1 0; 4 1) fixes 0; tau = (0 1; -1 0); t = -4, t1 = 4, t0 = -1
    z = PointH(0, Fraction(1, 4))
    certs = parabolic_certify(z, 1, 1, 4, 1)
    hit = [c for c in certs if c.gamma == Mat2(1, 0, 4, 1)]
    assert len(hit) == 1
    c = hit[0]
    assert c.tau == Mat2(0, 1, -1, 0)
    assert (c.t, c.t1, c.t0, c.c_tau) == (-4, 4, -1, 1)
    # 1 * 1 / 4 <= 16 * 1 / 16
    assert c.t0**2 * 1 * 16 <= c.t**2 * 1 * 1 * 4


def test_parabolic_sweep_in_G():
    rng = random.Random(36)
    for n in (4, 9, 12, 18, 25, 36):
        m_opts = [m for m in range(1, n) if n % (m * m) == 0]
        m = rng.choice(m_opts)
        z = sample_point_in_g(n, m, rng, Fraction(1, 1))
        assert z is not None
        for l in (1, 4, 9, 16, 25):
            if l % m != 1 % m:
                continue
            for c in parabolic_certify(z, l, 1, n, m):
                assert c.checks["n_divides_c_tau_sq_t"]
                assert c.checks["u_identity"]
                if c.t:
                    assert c.checks["t0_divisibility"]


def test_amplifier_weights_support():
    w = amplifier_weights(2, 1)
    assert w.primes == (3,)
    assert w.support() == [1, 3, 9, 27, 81]
    assert w.weights[1] == Fraction(2, 1)
    assert all(w.weights[l] == 1 for l in (3, 9, 27, 81))

    w = amplifier_weights(10, 3)
    assert w.primes == (13, 19)
    expected = {1}
    for p in (13, 19):
        expected.add(p)
        for q in (13, 19):
            expected.update({p * q, p * q * q, p * p * q * q})
    assert set(w.support()) == expected
    assert w.weights[1] == Fraction(10, 3)

    # empty prime window
    w = amplifier_weights(3, 5)
    assert w.primes == () and w.support() == [1]


def test_amplified_count_sum_empty_window():
    # Lambda = 3, M = 5: primes in (3, 6) are {5}, none is 1 mod 5
    z = I
    n, m, lam = 25, 5, 3
    assert is_in_G(z, n, m)
    with pytest.warns(UserWarning):  # M^2 > Lambda, envelope hypothesis only
        total, pairs, w = amplified_count_sum(z, lam, 1, n, m)
    assert w.primes == ()
    assert [p[0] for p in pairs] == [1]
    count1 = classify_counts(z, 1, 1, n, m).total
    assert total == mpmath.mpf(lam) / m * count1


def test_amplified_count_sum_example():
    z = PointH(0, Fraction(1, 2))
    total, pairs, w = amplified_count_sum(z, 2, 1, 4, 1)
    assert [p[0] for p in pairs] == [1, 3, 9, 27, 81]
    manual = mpmath.mpf(0)
    for l, yl, cnt in pairs:
        assert cnt == classify_counts(z, l, 1, 4, 1).total
        manual += mpmath.mpf(yl.numerator) / yl.denominator * cnt / mpmath.sqrt(l)
    assert mpmath.almosteq(total, manual)


def test_amplified_count_sum_preconditions():
    with pytest.warns(UserWarning):
        amplified_count_sum(I, 3, 1, 4, 2)  # M^2 > Lambda
    with pytest.warns(UserWarning):
        amplified_count_sum(PointH(Fraction(1, 7), Fraction(1, 90)), 4, 1, 4, 1)


def test_bound_rhs_examples():
    v = bound_rhs_ampl(4, 1, 2, Fraction(1, 2))
    expected = 2 + 4 + 2 ** mpmath.mpf("2.5") / 2 + 4
    assert mpmath.almosteq(v, expected)
    assert abs(float(v) - 12.828) < 0.01
    v = bound_rhs_ampl(64, 2, 4, Fraction(1, 8))
    assert mpmath.almosteq(v, 7)
    # positivity of every term
    assert bound_rhs_ampl(9, 3, 9, Fraction(1, 1000)) > 3
    with pytest.raises(InvalidM):
        bound_rhs_ampl(8, 3, 9, 1)


def test_budget_exceeded():
    z = PointH(0, Fraction(1, 10**9))
    with pytest.raises(BudgetExceeded):
        enumerate_delta_near(z, 1, 1, 1, 1, c_budget=1000)


def test_schmidt_utility():
    # integer lattice, radius 5: 81 points (classical disc count)
    chk = schmidt_disc_count((1, 0), (0, 1), 25)
    assert chk.count == 81
    assert chk.lambda1_sq == 1 and chk.covolume == 1
    assert chk.ratio() < 16
    # skewed lattice keeps the envelope sane
    chk = schmidt_disc_count((1, 0), (Fraction(1, 2), Fraction(1, 7)), 9)
    assert chk.count >= 1
    assert chk.ratio() < 16
