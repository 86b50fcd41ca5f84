from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dcsep.algebra import PolyQ
from dcsep.errors import SharedFixedPoint
from dcsep.mobius import (
    IDENTITY_CLASS,
    NONPARABOLIC,
    PARABOLIC,
    SL2Matrix,
    SubgroupSpec,
    classify,
    diagonalize,
    normalize_case,
)
from dcsep.numfield import EmbeddingHandle, NumberField, evaluate

QQ = NumberField.rationals()
QI = NumberField(PolyQ((1, 0, 1)))

small = st.builds(Fraction, st.integers(-6, 6), st.sampled_from([1, 2, 3]))


@st.composite
def sl2(draw, K=QI):
    """Random det-1 matrix as a product of elementary factors."""
    M = SL2Matrix.identity(K)
    for _ in range(draw(st.integers(1, 4))):
        kind = draw(st.sampled_from("ULD"))
        x = K.element([draw(small) for _ in range(K.degree)])
        if kind == "U":
            M = M * SL2Matrix.upper(x)
        elif kind == "L":
            M = M * SL2Matrix.lower(x)
        elif not x.is_zero():
            M = M * SL2Matrix.diag(x)
    return M


def m(rows, K=QQ, projective=False):
    return SL2Matrix.from_entries(K, rows, projective)


@given(sl2(), sl2(), sl2())
def test_group_laws_keep_determinant(a, b, c):
    for x in (a * b, a.inverse(), b.conj(c), a**3, (a * b) ** -2):
        assert x.det() == 1
    assert (a * b) * c == a * (b * c)
    assert (a * a.inverse()).exact_eq(SL2Matrix.identity(QI))


@given(sl2(), sl2())
def test_trace_is_conjugation_invariant(a, g):
    assert a.conj(g).trace() == a.trace()


@given(sl2())
def test_parabolic_characterization(a):
    if classify(a) == PARABOLIC:
        I = SL2Matrix.identity(QI)
        sq = lambda X: X * X
        d1 = SL2Matrix(*(x - y for x, y in zip(a.entries, I.entries)), check=False)
        d2 = SL2Matrix(*(x + y for x, y in zip(a.entries, I.entries)), check=False)
        assert all(e.is_zero() for e in sq(d1).entries) or all(e.is_zero() for e in sq(d2).entries)


def test_classify_examples():
    assert classify(m([[1, 1], [0, 1]])) == PARABOLIC
    assert classify(m([[2, 0], [0, Fraction(1, 2)]])) == NONPARABOLIC
    assert classify(m([[-1, 0], [0, -1]])) == IDENTITY_CLASS


def test_determinant_checked():
    with pytest.raises(ValueError):
        m([[1, 1], [1, 1]])


def test_projective_equality():
    a = m([[2, 1], [1, 1]], projective=True)
    assert a == -a
    assert not m([[2, 1], [1, 1]]) == -m([[2, 1], [1, 1]])


@pytest.mark.parametrize("rows", [[[2, 0], [0, Fraction(1, 2)]], [[2, 1], [1, 1]], [[3, 2], [1, 1]]])
def test_diagonalize_reassembles(rows):
    M = m(rows)
    D = diagonalize(M, EmbeddingHandle(QQ, 0))
    L = D.P.field
    diag = SL2Matrix.diag(D.lam)
    assert (D.P * diag * D.P.inverse()).exact_eq(M.lift(D.ext))
    val, _ = evaluate(D.lam, D.handle)
    assert abs(val) > 1


def test_diagonalize_golden():
    D = diagonalize(m([[2, 1], [1, 1]]))
    assert D.lam.field.degree == 2
    assert D.lam * D.lam - 3 * D.lam + 1 == D.lam.field.zero


def test_diagonalize_rejects_parabolic():
    with pytest.raises(ValueError):
        diagonalize(m([[1, 1], [0, 1]]))


def lox(M, power=1):
    return SubgroupSpec("loxodromic_cyclic", generator=M, power=power)


def test_normalize_case1_round_trip():
    H = lox(m([[2, 0], [0, Fraction(1, 2)]]))
    g = m([[1, 1], [1, 2]])
    K = lox(m([[3, 0], [0, Fraction(1, 3)]]).conj(g.inverse()))
    gamma = m([[2, 1], [1, 1]])
    N = normalize_case(H, K, gamma, 1)
    C = N.conjugator
    assert N.gamma.exact_eq(gamma.lift(N.ext).conj(C))
    assert N.H.gens()[0].exact_eq(H.gens()[0].lift(N.ext).conj(C))
    assert N.K.gens()[0].exact_eq(K.gens()[0].lift(N.ext).conj(C))
    assert N.H.gens()[0].b.is_zero() and N.H.gens()[0].c.is_zero()
    assert all(not x.is_zero() for x in N.data["M"].entries)


def test_normalize_shared_fixed_point():
    H = lox(m([[2, 0], [0, Fraction(1, 2)]]))
    K = lox(m([[3, 1], [0, Fraction(1, 3)]]))
    with pytest.raises(SharedFixedPoint):
        normalize_case(H, K, m([[1, 0], [0, 1]]), 1)
    par = lambda x: m([[1, x], [0, 1]], QI)
    i = QI.gen
    P1 = SubgroupSpec("parabolic_cyclic", generator=par(1), ambient=m([[1, i], [0, 1]], QI))
    with pytest.raises(SharedFixedPoint):
        normalize_case(P1, P1, par(1), 5)


def test_normalize_case5_round_trip():
    i = QI.gen
    H = SubgroupSpec("parabolic_cyclic", generator=m([[1, 1], [0, 1]], QI), ambient=m([[1, i], [0, 1]], QI))
    K = SubgroupSpec("parabolic_rank2", generators=(m([[0, 1], [-1, 2]], QI), m([[1 - i, i], [-i, 1 + i]], QI)))
    gamma = m([[2, 1], [1, 1]], QI)
    N = normalize_case(H, K, gamma, 5)
    for a, b in zip(K.gens(), N.K.gens()):
        assert b.exact_eq(a.conj(N.conjugator))
        assert b.b.is_zero()
    for a, b in zip(H.gens(), N.H.gens()):
        assert b.c.is_zero()


def test_degenerate_lattice_rejected():
    spec = SubgroupSpec("parabolic_rank2", generators=(m([[1, 1], [0, 1]], QI), m([[1, 2], [0, 1]], QI)))
    with pytest.raises(ValueError):
        spec.validate()
