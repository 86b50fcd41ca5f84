"""Finite field SL(2) kernels used by the certificate verifier.

Elements of F_q (q = p^d) are encoded as integers sum c_i p^i. Multiplication
goes through log/antilog tables, addition digitwise. A matrix is a row of
four encoded entries and its key is ((a*q + b)*q + c)*q + d.

Two interchangeable backends exist: numba-compiled loops and vectorized
numpy. Setting DCSEP_DISABLE_NUMBA=1 (or numba failing to import) selects
numpy.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ntheory import factorint

MAX_Q4 = 2**62

try:
    if os.environ.get("DCSEP_DISABLE_NUMBA", "") not in ("", "0"):
        raise ImportError("disabled by DCSEP_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


@dataclass(frozen=True)
class FqTables:
    p: int
    d: int
    factor: tuple[int, ...]
    log: np.ndarray
    exp: np.ndarray

    @property
    def q(self) -> int:
        return self.p**self.d

    def encode(self, coeffs) -> int:
        out = 0
        for c in reversed(list(coeffs)[: self.d]):
            out = out * self.p + int(c) % self.p
        return out

    def decode(self, x: int) -> list[int]:
        out = []
        for _ in range(self.d):
            out.append(x % self.p)
            x //= self.p
        return out


def _polymulmod(a: list[int], b: list[int], factor: tuple[int, ...], p: int) -> list[int]:
    d = len(factor) - 1
    prod = [0] * (2 * d - 1) if d > 0 else [0]
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    # factor is monic
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for i in range(d + 1):
                prod[k - d + i] = (prod[k - d + i] - c * factor[i]) % p
    return prod[:d]


@lru_cache(maxsize=64)
def fq_tables(p: int, factor: tuple[int, ...]) -> FqTables:
    """Tables for F_p[T]/(factor); factor is monic irreducible, constant first."""
    d = len(factor) - 1
    q = p**d
    if q**4 >= MAX_Q4:
        raise ValueError(f"field of order {q} too large for 64-bit matrix keys")
    T = FqTables(p, d, factor, np.zeros(1, np.int64), np.zeros(1, np.int64))
    n = q - 1
    primes = list(factorint(n)) if n > 1 else []
    for cand in range(1, q):
        g = T.decode(cand)
        if n == 1 or all(_powmod(g, n // r, factor, p) != [1] + [0] * (d - 1) for r in primes):
            break
    log = np.zeros(q, np.int64)
    exp = np.zeros(2 * n, np.int64)
    cur = [1] + [0] * (d - 1)
    for k in range(n):
        e = T.encode(cur)
        exp[k] = exp[k + n] = e
        log[e] = k
        cur = _polymulmod(cur, g, factor, p)
    if len(np.unique(exp[:n])) != n:
        raise ValueError(f"factor {list(factor)} is not irreducible mod {p}")
    return FqTables(p, d, factor, log, exp)


def _powmod(a: list[int], e: int, factor, p) -> list[int]:
    d = len(factor) - 1
    result = [1] + [0] * (d - 1)
    while e:
        if e & 1:
            result = _polymulmod(result, a, factor, p)
        a = _polymulmod(a, a, factor, p)
        e >>= 1
    return result


# --------------------------------------------------------------------------
# numpy backend


def _np_add(x, y, p, d):
    if d == 1:
        return (x + y) % p
    out = np.zeros_like(x)
    m = 1
    for _ in range(d):
        out += ((x % p + y % p) % p) * m
        x = x // p
        y = y // p
        m *= p
    return out


def _np_mul(x, y, log, exp):
    n = len(exp) // 2
    out = exp[(log[x] + log[y]) % max(n, 1)] if n else np.zeros_like(x)
    return np.where((x == 0) | (y == 0), 0, out)


def _np_neg(x, p, d):
    if d == 1:
        return (p - x) % p
    out = np.zeros_like(x)
    m = 1
    for _ in range(d):
        out += ((p - x % p) % p) * m
        x = x // p
        m *= p
    return out


def _np_matmul(A, B, p, d, log, exp):
    a, b, c, dd = A[:, 0], A[:, 1], A[:, 2], A[:, 3]
    e, f, g, h = B[:, 0], B[:, 1], B[:, 2], B[:, 3]
    mul = lambda x, y: _np_mul(x, y, log, exp)
    add = lambda x, y: _np_add(x, y, p, d)
    return np.stack(
        [add(mul(a, e), mul(b, g)), add(mul(a, f), mul(b, h)), add(mul(c, e), mul(dd, g)), add(mul(c, f), mul(dd, h))],
        axis=1,
    )


def _np_keys(A, q, p, d, projective):
    k = ((A[:, 0] * q + A[:, 1]) * q + A[:, 2]) * q + A[:, 3]
    if projective:
        N = _np_neg(A, p, d)
        kn = ((N[:, 0] * q + N[:, 1]) * q + N[:, 2]) * q + N[:, 3]
        k = np.minimum(k, kn)
    return k


def _np_find_product(HG, Ks, target_keys, p, d, log, exp, q, projective, chunk=1 << 16):
    count = 0
    rows = max(1, chunk // max(len(Ks), 1))
    for s in range(0, len(HG), rows):
        block = HG[s : s + rows]
        A = np.repeat(block, len(Ks), axis=0)
        B = np.tile(Ks, (len(block), 1))
        keys = _np_keys(_np_matmul(A, B, p, d, log, exp), q, p, d, projective)
        count += len(keys)
        if np.isin(keys, target_keys).any():
            return True, count
    return False, count


# --------------------------------------------------------------------------
# numba backend

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_add(x, y, p, d):
        if d == 1:
            return (x + y) % p
        r = 0
        m = 1
        for _ in range(d):
            r += ((x % p + y % p) % p) * m
            x //= p
            y //= p
            m *= p
        return r

    @njit(cache=True)
    def _nb_neg(x, p, d):
        r = 0
        m = 1
        for _ in range(d):
            r += ((p - x % p) % p) * m
            x //= p
            m *= p
        return r

    @njit(cache=True)
    def _nb_mul(x, y, log, exp):
        if x == 0 or y == 0:
            return 0
        return exp[log[x] + log[y]]

    @njit(cache=True)
    def _nb_mat(a, b, c, dd, e, f, g, h, p, d, log, exp):
        r0 = _nb_add(_nb_mul(a, e, log, exp), _nb_mul(b, g, log, exp), p, d)
        r1 = _nb_add(_nb_mul(a, f, log, exp), _nb_mul(b, h, log, exp), p, d)
        r2 = _nb_add(_nb_mul(c, e, log, exp), _nb_mul(dd, g, log, exp), p, d)
        r3 = _nb_add(_nb_mul(c, f, log, exp), _nb_mul(dd, h, log, exp), p, d)
        return r0, r1, r2, r3

    @njit(cache=True)
    def _nb_key(r0, r1, r2, r3, q, p, d, projective):
        k = ((r0 * q + r1) * q + r2) * q + r3
        if projective:
            n0 = _nb_neg(r0, p, d)
            n1 = _nb_neg(r1, p, d)
            n2 = _nb_neg(r2, p, d)
            n3 = _nb_neg(r3, p, d)
            kn = ((n0 * q + n1) * q + n2) * q + n3
            if kn < k:
                k = kn
        return k

    @njit(cache=True)
    def _nb_matmul(A, B, p, d, log, exp):
        n = A.shape[0]
        out = np.empty((n, 4), np.int64)
        for i in range(n):
            j = i if B.shape[0] == n else 0
            r = _nb_mat(A[i, 0], A[i, 1], A[i, 2], A[i, 3], B[j, 0], B[j, 1], B[j, 2], B[j, 3], p, d, log, exp)
            out[i, 0] = r[0]
            out[i, 1] = r[1]
            out[i, 2] = r[2]
            out[i, 3] = r[3]
        return out

    @njit(cache=True)
    def _nb_keys(A, q, p, d, projective):
        out = np.empty(A.shape[0], np.int64)
        for i in range(A.shape[0]):
            out[i] = _nb_key(A[i, 0], A[i, 1], A[i, 2], A[i, 3], q, p, d, projective)
        return out

    @njit(cache=True)
    def _nb_find_product(HG, Ks, target_keys, p, d, log, exp, q, projective):
        count = 0
        for i in range(HG.shape[0]):
            for j in range(Ks.shape[0]):
                r = _nb_mat(HG[i, 0], HG[i, 1], HG[i, 2], HG[i, 3], Ks[j, 0], Ks[j, 1], Ks[j, 2], Ks[j, 3], p, d, log, exp)
                k = _nb_key(r[0], r[1], r[2], r[3], q, p, d, projective)
                count += 1
                for t in range(target_keys.shape[0]):
                    if k == target_keys[t]:
                        return True, count
        return False, count


# --------------------------------------------------------------------------
# public API


def _as_rows(A) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(A, dtype=np.int64).reshape(-1, 4))


def matmul(A, B, T: FqTables, backend: str | None = None) -> np.ndarray:
    A, B = _as_rows(A), _as_rows(B)
    if (backend or BACKEND) == "numba":
        return _nb_matmul(A, B, T.p, T.d, T.log, T.exp)
    if len(B) == 1 and len(A) != 1:
        B = np.repeat(B, len(A), axis=0)
    return _np_matmul(A, B, T.p, T.d, T.log, T.exp)


def keys(A, T: FqTables, projective: bool, backend: str | None = None) -> np.ndarray:
    A = _as_rows(A)
    if (backend or BACKEND) == "numba":
        return _nb_keys(A, T.q, T.p, T.d, projective)
    return _np_keys(A, T.q, T.p, T.d, projective)


class EnumerationCapExceeded(Exception):
    pass


def closure(gens, T: FqTables, projective: bool, cap: int = 10**6, backend: str | None = None) -> np.ndarray:
    """All elements of the group generated by ``gens`` (breadth first)."""
    ident = np.array([[1, 0, 0, 1]], np.int64)
    G = _as_rows(gens) if len(gens) else np.zeros((0, 4), np.int64)
    elems = ident
    seen = keys(ident, T, projective, backend)
    frontier = ident
    while len(frontier) and len(G):
        fresh = []
        for g in G:
            fresh.append(matmul(frontier, g[None, :], T, backend))
        cand = np.concatenate(fresh)
        ck = keys(cand, T, projective, backend)
        ck, idx = np.unique(ck, return_index=True)
        mask = ~np.isin(ck, seen)
        frontier = cand[idx[mask]]
        seen = np.union1d(seen, ck[mask])
        elems = np.concatenate([elems, frontier])
        if len(elems) > cap:
            raise EnumerationCapExceeded(f"subgroup image exceeds {cap} elements")
    return elems


def find_product(Hs, g, Ks, target, T: FqTables, projective: bool, backend: str | None = None) -> tuple[bool, int]:
    """Whether target == h*g*k for some rows h of Hs, k of Ks; also returns
    the number of products formed."""
    HG = matmul(_as_rows(Hs), _as_rows(g), T, backend)
    Ks = _as_rows(Ks)
    tk = keys(_as_rows(target), T, projective, backend)
    if (backend or BACKEND) == "numba":
        found, n = _nb_find_product(HG, Ks, tk, T.p, T.d, T.log, T.exp, T.q, projective)
        return bool(found), int(n)
    return _np_find_product(HG, Ks, tk, T.p, T.d, T.log, T.exp, T.q, projective)


def product_set_size(Hs, g, Ks, T: FqTables, projective: bool, backend: str | None = None) -> int:
    HG = matmul(_as_rows(Hs), _as_rows(g), T, backend)
    Ks = _as_rows(Ks)
    A = np.repeat(HG, len(Ks), axis=0)
    B = np.tile(Ks, (len(HG), 1))
    return int(len(np.unique(keys(matmul(A, B, T, backend), T, projective, backend))))


def warmup() -> None:
    """Compile the numba kernels once (a no-op for numpy)."""
    if BACKEND != "numba":
        return
    T = fq_tables(5, (2, 1))
    A = np.array([[1, 1, 0, 1]], np.int64)
    find_product(A, A, A, A, T, True)
    closure(A, T, False)
