import os
import subprocess
import sys

import numpy as np
import pytest

from dcsep import kernels
from oracles import Fq

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable or disabled")

FIELDS = [(5, (0, 1)), (7, (0, 1)), (3, (1, 0, 1)), (5, (2, 0, 1)), (2, (1, 1, 1))]


def random_sl2(rng, T):
    F = Fq(T.p, T.factor)
    els = F.elements()
    while True:
        a, b, c = (els[i] for i in rng.integers(0, len(els), 3))
        if any(a):
            # d = (1 + b c) / a by search, keeping the oracle independent
            target = F.add(F.one(), F.mul(b, c))
            d = next(x for x in els if F.mul(a, x) == target)
            return [T.encode(x) for x in (a, b, c, d)], (a, b, c, d)


@pytest.mark.parametrize("p,factor", FIELDS)
def test_matmul_matches_naive_field(p, factor):
    T = kernels.fq_tables(p, factor)
    F = Fq(p, factor)
    rng = np.random.default_rng(p * 31 + len(factor))
    for _ in range(30):
        A, a = random_sl2(rng, T)
        B, b = random_sl2(rng, T)
        got = kernels.matmul([A], [B], T, "numpy")[0]
        assert [T.decode(int(x)) for x in got] == [list(x) for x in F.mmul(a, b)]


def test_tables_are_consistent():
    T = kernels.fq_tables(3, (1, 0, 1))
    assert T.q == 9
    # exp covers every nonzero element exactly once per period
    assert sorted(set(int(x) for x in T.exp[: T.q - 1])) == list(range(1, 9))


@needs_numba
@pytest.mark.parametrize("p,factor", FIELDS)
@pytest.mark.parametrize("projective", [False, True])
def test_backends_agree(p, factor, projective):
    T = kernels.fq_tables(p, factor)
    rng = np.random.default_rng(7 * p)
    for _ in range(4):
        gens = [random_sl2(rng, T)[0] for _ in range(2)]
        a = kernels.closure(gens[:1], T, projective, backend="numpy")
        b = kernels.closure(gens[:1], T, projective, backend="numba")
        assert sorted(kernels.keys(a, T, projective, "numpy")) == sorted(kernels.keys(b, T, projective, "numba"))
        g, target = random_sl2(rng, T)[0], random_sl2(rng, T)[0]
        Ks = kernels.closure(gens[1:], T, projective, backend="numpy")
        r1 = kernels.find_product(a, [g], Ks, [target], T, projective, "numpy")
        r2 = kernels.find_product(a, [g], Ks, [target], T, projective, "numba")
        assert r1[0] == r2[0]
        if not r1[0]:
            assert r1[1] == r2[1] == len(a) * len(Ks)


def test_env_flag_selects_numpy():
    env = dict(os.environ, DCSEP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from dcsep import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_cap_is_enforced():
    T = kernels.fq_tables(7, (0, 1))
    with pytest.raises(kernels.EnumerationCapExceeded):
        kernels.closure([[1, 1, 0, 1], [1, 0, 1, 1]], T, False, cap=50)


def test_reducible_factor_rejected():
    with pytest.raises(ValueError):
        kernels.fq_tables(7, (3, 0, 1))  # T^2 + 3 = (T - 2)(T + 2) mod 7
