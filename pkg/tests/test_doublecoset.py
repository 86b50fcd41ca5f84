import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import corpus_files, load_raw, search_for
from dcsep import Problem, SearchBudget, membership_probe, separate_double_coset, separate_subgroup, distinguish_conjugacy
from dcsep.doublecoset import reassemble
from dcsep.mobius import SL2Matrix

EXPECTED = {
    "case1": ("certificate", [5]),
    "case1_membership": ("membership", {"H": [1], "K": [1]}),
    "case1_star": ("certificate", [5]),
    "case2_unsupported": ("unsupported", "Case2Required"),
    "case3_unsupported": ("unsupported", "Case3Required"),
    "case4": ("certificate", [3]),
    "case4_case2": ("unsupported", "Case2Required"),
    "case4_membership": ("membership", {"H": [2], "K": [3]}),
    "case5": ("certificate", [3]),
    "case5_membership": ("membership", {"H": [3], "K": [2, 0]}),
    "case5_u_entry": ("certificate", [3]),
    "conjugacy_cat_map": ("certificate", [3]),
    "conjugacy_diag": ("certificate", [5]),
    "subgroup_loxodromic_m2": ("certificate", [5]),
    "subgroup_loxodromic_m3": ("certificate", [7]),
    "subgroup_maximal_abelian": ("certificate", [3]),
    "subgroup_parabolic": ("certificate", [3]),
    "subgroup_parabolic_b3": ("certificate", [7]),
}


def run(name, raw=None):
    raw = raw or load_raw(name)
    return search_for(name)(Problem.from_json(raw))


def check(out, expect):
    kind, detail = expect
    assert out.kind == kind
    if kind == "certificate":
        assert out.certificate.primes == detail
        assert out.report.accepted
    elif kind == "membership":
        assert out.exponents == detail
    else:
        assert out.reason == detail


def test_every_corpus_file_has_an_expectation():
    assert {p.stem for p in corpus_files()} == set(EXPECTED)


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_corpus_outcomes(name):
    check(run(name), EXPECTED[name])


def with_gamma(name, gamma):
    raw = dict(load_raw(name))
    raw["gamma"] = gamma
    return raw


def q(rows):
    return [[[str(x)] for x in r] for r in rows]


def gi(rows):
    return [[[str(x), str(y)] for x, y in r] for r in rows]


def test_maximal_abelian_lower_unipotent():
    out = run("subgroup_maximal_abelian", with_gamma("subgroup_maximal_abelian", q([[1, 0], [4, 1]])))
    assert out.kind == "certificate" and out.certificate.primes == [3]


def test_subgroup_memberships():
    h2 = q([[4, 0], [0, "1/4"]])
    assert run("subgroup_maximal_abelian", with_gamma("subgroup_maximal_abelian", h2)).exponents == {"H": [2]}
    assert run("subgroup_loxodromic_m2", with_gamma("subgroup_loxodromic_m2", h2)).exponents == {"H": [1]}
    h15 = gi([[(1, 0), (5, 0)], [(0, 0), (1, 0)]])
    assert run("subgroup_parabolic", with_gamma("subgroup_parabolic", h15)).exponents == {"H": [5]}


def test_conjugacy_parabolic_gamma_unsupported():
    out = run("conjugacy_diag", with_gamma("conjugacy_diag", gi([[(1, 0), (1, 0)], [(0, 0), (1, 0)]])))
    assert out.kind == "unsupported" and out.reason == "ParabolicGamma"


def test_probe_examples():
    P = Problem.from_json(load_raw("case1"))
    h, k = P.H.gens()[0], P.K.gens()[0]
    gamma = h**2 * P.g * k**3
    assert membership_probe(Problem.from_json(with_gamma("case1", gamma.to_json()))) == {"H": [2], "K": [3]}
    assert membership_probe(P) is None
    triv = {"field": {"min_poly": ["0", "1"]}, "subgroups": {"H": {"kind": "trivial"}, "K": {"kind": "trivial"}},
            "gamma": q([[1, 0], [0, 1]])}
    assert membership_probe(Problem.from_json(triv)) == {"H": [], "K": []}


# random problems around the corpus subgroups


def rand_matrix(rng, K):
    M = SL2Matrix.identity(K)
    for _ in range(rng.randint(1, 3)):
        x = K.element([Fraction(rng.randint(-4, 4), rng.choice([1, 2, 3])) for _ in range(K.degree)])
        kind = rng.choice("ULD")
        if kind == "U":
            M = M * SL2Matrix.upper(x)
        elif kind == "L":
            M = M * SL2Matrix.lower(x)
        elif not x.is_zero():
            M = M * SL2Matrix.diag(x)
    return M


def rand_member(rng, P):
    exps = {"H": [rng.randint(-3, 3) for _ in P.H.gens()], "K": [rng.randint(-3, 3) for _ in P.K.gens()]}
    return reassemble(P, exps), exps


BASES = ["case1", "case4", "case5"]


@pytest.mark.parametrize("base", BASES)
@settings(max_examples=25)
@given(seed=st.integers(0, 10**6), member=st.booleans())
def test_exclusivity_and_soundness(base, seed, member):
    rng = random.Random(seed)
    P0 = Problem.from_json(load_raw(base))
    gamma = rand_member(rng, P0)[0] if member else rand_matrix(rng, P0.field)
    raw = with_gamma(base, gamma.to_json())
    P = Problem.from_json(raw)
    out = separate_double_coset(P, SearchBudget(max_prime=10**4))
    probe = membership_probe(P)
    if probe is not None:
        assert reassemble(P, probe) == P.gamma
        assert out.kind == "membership"
    if out.kind == "certificate":
        assert out.report.accepted
        assert probe is None
    if out.kind == "membership":
        assert reassemble(P, out.exponents) == P.gamma
    if member:
        assert out.kind == "membership"


@settings(max_examples=15)
@given(seed=st.integers(0, 10**6))
def test_conjugation_covariance(seed):
    rng = random.Random(seed)
    raw = load_raw("case1")
    P = Problem.from_json(raw)
    gamma = rand_matrix(rng, P.field)
    a = separate_double_coset(Problem.from_json(with_gamma("case1", gamma.to_json())))
    moved = dict(raw)
    moved["subgroups"] = {"H": P.H.conj(P.g).to_json(), "K": raw["subgroups"]["K"]}
    moved["g"] = SL2Matrix.identity(P.field).to_json()
    moved["gamma"] = (P.g.inverse() * gamma).to_json()
    b = separate_double_coset(Problem.from_json(moved))
    assert a.kind == b.kind
    if a.kind == "certificate":
        assert a.certificate.primes == b.certificate.primes


@pytest.mark.parametrize("base", BASES)
@settings(max_examples=10)
@given(seed=st.integers(0, 10**6), member=st.booleans())
def test_inversion_symmetry(base, seed, member):
    rng = random.Random(seed)
    raw = load_raw(base)
    P = Problem.from_json(raw)
    gamma = rand_member(rng, P)[0] if member else rand_matrix(rng, P.field)
    fwd = membership_probe(Problem.from_json(with_gamma(base, gamma.to_json())))
    inv = dict(raw)
    inv["subgroups"] = {"H": raw["subgroups"]["K"], "K": raw["subgroups"]["H"]}
    inv["g"] = P.g.inverse().to_json()
    inv["gamma"] = gamma.inverse().to_json()
    back = membership_probe(Problem.from_json(inv))
    assert (fwd is None) == (back is None)
    if fwd is not None:
        assert sorted(back["H"]) == sorted(-x for x in fwd["K"])


def test_case5_decomposition_exact():
    rng = random.Random(5)
    P0 = Problem.from_json(load_raw("case5"))
    for _ in range(100):
        exps = {"H": [rng.randint(-9, 9)], "K": [rng.randint(-9, 9), rng.randint(-9, 9)]}
        gamma = reassemble(P0, exps)
        out = separate_double_coset(Problem.from_json(with_gamma("case5", gamma.to_json())))
        assert out.kind == "membership" and out.exponents == exps
