import time
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dcsep.algebra import PolyQ
from dcsep.budget import SearchBudget
from dcsep.errors import BudgetExhausted, LatticeMembership, NotApplicable, NotSeparable, RootOfUnity
from dcsep.numfield import NumberField
from dcsep.residue import TrackedRing, reduce, span_member
from dcsep.separation import find_order_prime, separate_additive, separate_power
from oracles import order_mod, power_set

QQ = NumberField.rationals()
QI = NumberField(PolyQ((1, 0, 1)))
CUBE = NumberField(PolyQ((-2, 0, 0, 1)))
Z8 = NumberField(PolyQ((1, 0, 0, 0, 1)))


@pytest.mark.parametrize("m,p", [(2, 3), (3, 7), (4, 5), (5, 31), (7, 127), (8, 17), (9, 73), (10, 11), (11, 23), (12, 13)])
def test_order_prime_for_two(m, p):
    res = find_order_prime(QQ(2), m)
    assert res.p == p
    assert order_mod(2, p) == m


def test_order_six_is_a_zsigmondy_exception():
    # 2^6 - 1 = 63 = 3^2 * 7 has no primitive prime divisor
    with pytest.raises(BudgetExhausted):
        find_order_prime(QQ(2), 6, budget=SearchBudget(max_prime=3000))


@given(st.integers(2, 9), st.integers(1, 8))
def test_order_divisible_by(a, m):
    res = find_order_prime(QQ(a), m, mode="divisible_by", budget=SearchBudget(max_prime=5000))
    assert order_mod(a, res.p) % m == 0


def test_order_rejects_roots_of_unity():
    with pytest.raises(RootOfUnity):
        find_order_prime(QI.gen, 3)
    with pytest.raises(RootOfUnity):
        find_order_prime(QQ(-1), 2)


@pytest.mark.parametrize("lam,om,primes", [(2, 4, [3]), (3, 2, [7])])
def test_power_separation_examples(lam, om, primes):
    res = separate_power(QQ(lam), QQ(om))
    assert res.primes == primes
    p = primes[0]
    assert lam % p not in power_set(om, p)


def test_power_not_separable():
    with pytest.raises(NotSeparable) as exc:
        separate_power(QQ(8), QQ(2))
    assert exc.value.witness == 3


@given(st.integers(2, 30), st.integers(2, 30))
def test_power_separation_is_sound(lam, om):
    try:
        res = separate_power(QQ(lam), QQ(om), budget=SearchBudget(max_prime=3000))
    except NotSeparable as exc:
        assert om**exc.witness == lam if exc.witness >= 0 else Fraction(om) ** exc.witness == lam
        return
    if len(res.maps) == 1:
        p = res.maps[0].p
        assert lam % p not in power_set(om, p)
    else:
        # a pair of primes: no single exponent works at both
        (m1, m2) = res.maps
        p1, p2 = m1.p, m2.p
        ok = [e for e in range(order_mod(om, p1) * order_mod(om, p2))
              if pow(om, e, p1) == lam % p1 and pow(om, e, p2) == lam % p2]
        assert not ok


def test_additive_cube_root_joint():
    t = CUBE.gen
    res = separate_additive(t * t, t)
    assert res.p == 5 and res.joint
    assert [m.factor.coeffs for m in res.maps] == [(2, 1), (4, 3, 1)]
    assert span_member(t * t, [CUBE.one, t], res.maps) is None


def test_additive_zeta8_single():
    t = Z8.gen
    res = separate_additive(t, t * t)
    assert res.p == 5 and not res.joint
    assert res.maps[0].factor.coeffs == (2, 0, 1)
    # exhaustive scan of F_5-combinations
    m = res.maps[0]
    b, beta = reduce(m, t), reduce(m, t * t)
    one = reduce(m, Z8.one)
    assert all(b != one * reduce(m, Z8(x)) + beta * reduce(m, Z8(y)) for x in range(5) for y in range(5))


def test_additive_refuses_lattice_points():
    t = QI.gen
    with pytest.raises(LatticeMembership):
        separate_additive(2 + 3 * t, t)
    with pytest.raises(NotApplicable):
        separate_additive(QI(Fraction(1, 2)), t)


def test_searches_are_fast():
    t0 = time.perf_counter()
    find_order_prime(QQ(2), 11)
    separate_power(QQ(3), QQ(2))
    separate_additive(CUBE.gen**2, CUBE.gen)
    assert time.perf_counter() - t0 < 3
