"""Acceptance criteria, each at its stated tolerance.

Every test records one line per check through ``conftest.record``; the
lines are repeated in a summary section at the end of the pytest run.
"""

import json
import random
import time
from fractions import Fraction

import pytest

from conftest import load_raw, record, search_for
from dcsep import Problem, SearchBudget, parse, serialize, verify
from dcsep.algebra import PolyQ, format_rational
from dcsep.doublecoset import _matches, separate_double_coset
from dcsep.errors import BudgetExhausted, NotSeparable
from dcsep.numfield import NumberField
from dcsep.separation import find_order_prime, separate_additive, separate_power
from oracles import Fq, oracle_excludes, order_mod, power_set

QQ = NumberField.rationals()
CUBE = NumberField(PolyQ((-2, 0, 0, 1)))
Z8 = NumberField(PolyQ((1, 0, 0, 0, 1)))

FUZZ_BUDGET = SearchBudget(max_prime=10**4, max_exponent=64)


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # one untimed run so JIT compilation is not charged to the first criterion
    search_for("case1")(Problem.from_json(load_raw("case1")))


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def factor_ints(mp):
    return tuple(int(c) for c in mp.factor.coeffs)


# --------------------------------------------------------------------------
# 1: order search


@pytest.mark.parametrize("m", range(2, 13))
def test_criterion_1_order_search(m):
    try:
        res, dt = timed(find_order_prime, QQ(2), m)
    except BudgetExhausted as exc:
        record("1", False, f"m={m}: {exc}")
        pytest.fail(f"m={m}: no prime of exact order within budget")
    p = res.p
    ok = order_mod(2, p) == m and res.achieved_order == m and dt < 1.0
    if m == 3:
        ok = ok and p == 7
    if m == 4:
        ok = ok and p == 5
    record("1", ok, f"m={m} -> p={p}, order {order_mod(2, p)}, {dt:.3f}s")
    assert ok


# --------------------------------------------------------------------------
# 2: power separation


@pytest.mark.parametrize("lam,om,expect", [(2, 4, [3]), (3, 2, [7])])
def test_criterion_2_power_separation(lam, om, expect):
    res, dt = timed(separate_power, QQ(lam), QQ(om))
    ok = res.primes == expect and len(res.maps) == 1 and dt < 1.0
    p = res.primes[0]
    ok = ok and (lam % p) not in power_set(om, p)
    record("2", ok, f"({lam}, {om}) -> {res.primes}, {dt:.3f}s")
    assert ok


def test_criterion_2_not_separable():
    t = time.perf_counter()
    with pytest.raises(NotSeparable) as exc:
        separate_power(QQ(8), QQ(2))
    dt = time.perf_counter() - t
    ok = exc.value.witness == 3 and 2**3 == 8 and dt < 1.0
    record("2", ok, f"(8, 2) -> NotSeparable({exc.value.witness}), {dt:.3f}s")
    assert ok


# --------------------------------------------------------------------------
# 3: additive separation


def span_hits(b, beta, maps):
    """Brute force: does some x + y*beta equal b under every map at once?"""
    fields = [Fq(m.p, factor_ints(m)) for m in maps]
    p = maps[0].p
    bs = [F.element(b.vector()) for F in fields]
    betas = [F.element(beta.vector()) for F in fields]
    for x in range(p):
        for y in range(p):
            if all(F.add(F.element([x]), F.mul(F.element([y]), bt)) == bb for F, bt, bb in zip(fields, betas, bs)):
                return True
    return False


@pytest.mark.parametrize(
    "name,F,beta,b,joint,factor",
    [
        ("cube root", CUBE, (0, 1), (0, 0, 1), True, None),
        ("zeta8", Z8, (0, 0, 1), (0, 1), False, (2, 0, 1)),
    ],
)
def test_criterion_3_additive(name, F, beta, b, joint, factor):
    beta, b = F.element(beta), F.element(b)
    res, dt = timed(separate_additive, b, beta)
    ok = res.p == 5 and res.joint == joint and dt < 1.0
    if factor is not None:
        ok = ok and factor_ints(res.maps[0]) == factor
    ok = ok and not span_hits(b, beta, res.maps)
    if joint:
        # the joint branch is needed: each factor alone has b in the span
        ok = ok and all(span_hits(b, beta, [m]) for m in res.maps)
    record("3", ok, f"{name} -> p={res.p}, joint={res.joint}, factors {[factor_ints(m) for m in res.maps]}, {dt:.3f}s")
    assert ok


# --------------------------------------------------------------------------
# 4-8: corpus certificates


def corpus_certificate(name):
    raw = load_raw(name)
    out, dt = timed(search_for(name), Problem.from_json(raw))
    return raw, out, dt


CORPUS_CRITERIA = [
    ("4", "case1", 5, 120),
    ("5", "case4", 3, 720),
    ("6", "case5", 3, 720),
    ("6", "case5_u_entry", 3, 720),
    ("7", "subgroup_maximal_abelian", 3, None),
    ("7", "subgroup_loxodromic_m2", 5, None),
    ("7", "subgroup_parabolic", 3, None),
    ("8", "conjugacy_diag", 5, None),
]


@pytest.mark.parametrize("crit,name,prime,order", CORPUS_CRITERIA)
def test_criteria_4_to_8_corpus(crit, name, prime, order):
    raw, out, dt = corpus_certificate(name)
    ok = out.kind == "certificate" and out.certificate.primes == [prime] and dt < 1.0
    if ok:
        # independent re-verification from the serialized bytes
        report = verify(raw, parse(serialize(out.certificate)))
        ok = report.accepted
        if order is not None:
            ok = ok and report.group_order == order
        detail = f"{name} -> p={out.certificate.primes}, group order {report.group_order}, {dt:.3f}s"
    else:
        detail = f"{name} -> {out.kind} {out.reason or ''} {dt:.3f}s"
    record(crit, ok, detail)
    assert ok


# --------------------------------------------------------------------------
# 9: soundness fuzz


def _mul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def _pow_diag(s, e):
    s = Fraction(s) ** e
    return [[s, Fraction(0)], [Fraction(0), 1 / s]]


def fuzz_matrices(n=100, seed=20261017):
    """Random products of elementary and diagonal matrices over Z[1/6];
    every fifth one is a constructed member of the Case 1 double coset."""
    rng = random.Random(seed)

    def unit_rat():
        return Fraction(rng.randint(-6, 6), 2 ** rng.randint(0, 2) * 3 ** rng.randint(0, 2))

    g = [[Fraction(1), Fraction(1)], [Fraction(1), Fraction(2)]]
    out = []
    for i in range(n):
        if i % 5 == 4:
            M = _mul(_mul(_pow_diag(2, rng.randint(-4, 4)), g), _pow_diag(3, rng.randint(-4, 4)))
        else:
            M = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
            for _ in range(rng.randint(1, 4)):
                t = rng.randrange(3)
                if t == 0:
                    E = [[1, unit_rat()], [0, 1]]
                elif t == 1:
                    E = [[1, 0], [unit_rat(), 1]]
                else:
                    s = Fraction(2) ** rng.randint(-2, 2) * Fraction(3) ** rng.randint(-1, 1)
                    E = [[s, 0], [0, 1 / s]]
                M = _mul(M, E)
        assert M[0][0] * M[1][1] - M[0][1] * M[1][0] == 1
        out.append(M)
    return out


def fuzz_problems():
    base = load_raw("case1")
    for i, M in enumerate(fuzz_matrices()):
        raw = dict(base)
        raw["gamma"] = [[[format_rational(Fraction(x))] for x in row] for row in M]
        raw["tracked"] = ["6"]
        raw["label"] = f"fuzz {i}"
        yield raw


def run_fuzz():
    counts = {"certificate": 0, "membership": 0, "other": 0, "rejected": 0}
    certs = []
    for raw in fuzz_problems():
        P = Problem.from_json(raw)
        out = separate_double_coset(P, FUZZ_BUDGET)
        if out.kind == "certificate":
            if verify(raw, parse(serialize(out.certificate))).accepted:
                counts["certificate"] += 1
            else:
                counts["rejected"] += 1
            certs.append((raw, out.certificate))
        elif out.kind == "membership" and _matches(P, out.exponents):
            counts["membership"] += 1
        else:
            counts["other"] += 1
    return counts, certs


def test_criterion_9_fuzz():
    (counts, _), dt = timed(run_fuzz)
    ok = counts["other"] == 0 and counts["rejected"] == 0 and dt < 60.0
    ok = ok and counts["certificate"] + counts["membership"] == 100
    record("9", ok, f"{counts}, {dt:.1f}s")
    assert ok


# --------------------------------------------------------------------------
# 10: oracle agreement


def all_certificates():
    """Every certificate emitted by criteria 4-9, with its problem."""
    out = []
    for _, name, _, _ in CORPUS_CRITERIA:
        raw, res, _ = corpus_certificate(name)
        out.append((name, raw, res.certificate))
    _, fuzz = run_fuzz()
    out += [(raw["label"], raw, cert) for raw, cert in fuzz]
    return out


def test_criterion_10_oracle_agreement():
    checked, skipped, bad = 0, 0, []
    for label, raw, cert in all_certificates():
        rings = cert.residue_rings
        if len(rings) != 1 or rings[0][0] ** (len(rings[0][1]) - 1) > 25:
            skipped += 1
            continue
        p, fac = rings[0]
        checked += 1
        if verify(raw, cert).accepted != oracle_excludes(raw, cert.claim, p, fac):
            bad.append(label)
    ok = not bad and checked > 0
    record("10", ok, f"{checked} certificates agree with the whole-group oracle, {skipped} outside p^d <= 25" + (f"; disagree: {bad}" if bad else ""))
    assert ok


# --------------------------------------------------------------------------
# 11: determinism


def snapshot():
    parts = []
    for m in range(2, 13):
        try:
            r = find_order_prime(QQ(2), m)
            parts.append(("order", m, r.p, factor_ints(r.map)))
        except BudgetExhausted as exc:
            parts.append(("order", m, "exhausted", str(exc)))
    for lam, om in [(2, 4), (3, 2)]:
        parts.append(("power", lam, om, tuple(factor_ints(m) + (m.p,) for m in separate_power(QQ(lam), QQ(om)).maps)))
    res = separate_additive(CUBE.element([0, 0, 1]), CUBE.element([0, 1]))
    parts.append(("additive", res.p, tuple(factor_ints(m) for m in res.maps)))
    res = separate_additive(Z8.element([0, 1]), Z8.element([0, 0, 1]))
    parts.append(("additive", res.p, tuple(factor_ints(m) for m in res.maps)))
    certs = [serialize(cert) for _, _, cert in all_certificates()]
    return json.dumps(parts, default=str).encode(), certs


def test_criterion_11_determinism():
    a, b = snapshot(), snapshot()
    ok = a == b
    record("11", ok, f"{len(a[1])} certificates byte-identical across two runs" if ok else "outputs differ between runs")
    assert ok
