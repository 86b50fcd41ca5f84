"""Exact rationals and dense univariate polynomials over Q and F_p.

Polynomials are stored constant term first with no trailing zeros; the zero
polynomial is the empty tuple. Rationals are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

from .ntheory import factorint, is_prime

Rational = Fraction

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


class MalformedRational(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` (``den`` optional, positive)."""
    if not isinstance(text, str):
        raise MalformedRational(f"rational must be a string, got {text!r}")
    m = _RATIONAL_RE.match(text.strip())
    if not m:
        raise MalformedRational(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise MalformedRational(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _trim(seq: Iterable) -> tuple:
    c = list(seq)
    while c and not c[-1]:
        c.pop()
    return tuple(c)


class PolyQ:
    """Polynomial with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs: tuple[Fraction, ...] = _trim(Fraction(c) for c in coeffs)

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "PolyQ":
        return cls(parse_rational(s) for s in items)

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def x(cls) -> "PolyQ":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyQ):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim((Fraction(other),))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("PolyQ", self.coeffs))

    def __repr__(self) -> str:
        return f"PolyQ({self.to_strings()})"

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    @staticmethod
    def _coerce(other) -> "PolyQ":
        if isinstance(other, PolyQ):
            return other
        return PolyQ((other,))

    def __add__(self, other) -> "PolyQ":
        o = self._coerce(other).coeffs
        a = self.coeffs
        n = max(len(a), len(o))
        return PolyQ((a[i] if i < len(a) else 0) + (o[i] if i < len(o) else 0) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "PolyQ":
        return PolyQ(-c for c in self.coeffs)

    def __sub__(self, other) -> "PolyQ":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PolyQ":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PolyQ":
        o = self._coerce(other).coeffs
        a = self.coeffs
        if not a or not o:
            return PolyQ()
        out = [Fraction(0)] * (len(a) + len(o) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(o):
                    out[i + j] += x * y
        return PolyQ(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PolyQ":
        result, base = PolyQ((1,)), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "PolyQ") -> tuple["PolyQ", "PolyQ"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        db, lb = other.degree, other.lc
        q = [Fraction(0)] * max(len(r) - db, 0)
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i]
            if c:
                c = c / lb
                q[i - db] = c
                for j, y in enumerate(other.coeffs):
                    r[i - db + j] -= c * y
        return PolyQ(q), PolyQ(r[:db] if db > 0 else [])

    def __mod__(self, other: "PolyQ") -> "PolyQ":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "PolyQ") -> "PolyQ":
        return self.divmod(other)[0]

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "PolyQ":
        if self.is_zero():
            return self
        lc = self.lc
        return PolyQ(c / lc for c in self.coeffs)

    def derivative(self) -> "PolyQ":
        return PolyQ(i * c for i, c in enumerate(self.coeffs) if i)

    def denominator_lcm(self) -> int:
        from math import lcm

        out = 1
        for c in self.coeffs:
            out = lcm(out, c.denominator)
        return out


def gcd_q(a: PolyQ, b: PolyQ) -> PolyQ:
    while b:
        a, b = b, a % b
    return a.monic()


def xgcd_q(a: PolyQ, b: PolyQ) -> tuple[PolyQ, PolyQ, PolyQ]:
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = PolyQ((1,)), PolyQ()
    t0, t1 = PolyQ(), PolyQ((1,))
    while r1:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    lc = r0.lc
    return r0.monic(), s0 * (1 / lc), t0 * (1 / lc)


def _prem(a: PolyQ, b: PolyQ) -> PolyQ:
    delta = a.degree - b.degree
    return (a * (b.lc ** (delta + 1))) % b


def resultant(f: PolyQ, g: PolyQ) -> Fraction:
    """Resultant lc(f)^deg(g) * prod g(alpha) over the roots alpha of f.

    Computed with the subresultant pseudo-remainder sequence.
    """
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of the zero polynomial")
    if g.degree == 0:
        return g.lc ** f.degree
    if f.degree == 0:
        return f.lc ** g.degree
    a, b = f, g
    s = 1
    if a.degree < b.degree:
        a, b = b, a
        if a.degree % 2 and b.degree % 2:
            s = -1
    gg = Fraction(1)
    h = Fraction(1)
    while True:
        delta = a.degree - b.degree
        if a.degree % 2 and b.degree % 2:
            s = -s
        r = _prem(a, b)
        a = b
        b = r * (1 / (gg * h**delta))
        gg = a.lc
        h = h ** (1 - delta) * gg**delta
        if b.degree <= 0:
            break
    if b.is_zero():
        return Fraction(0)
    h = h ** (1 - a.degree) * b.lc ** a.degree
    return s * h


def discriminant(f: PolyQ) -> Fraction:
    n = f.degree
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return Fraction(1)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.lc


# --------------------------------------------------------------------------
# polynomials over F_p


class PolyFp:
    """Polynomial over the prime field F_p."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[int] = ()):
        self.p = p
        self.coeffs: tuple[int, ...] = _trim(int(c) % p for c in coeffs)

    @classmethod
    def x(cls, p: int) -> "PolyFp":
        return cls(p, (0, 1))

    @classmethod
    def from_polyq(cls, f: PolyQ, p: int) -> "PolyFp":
        out = []
        for c in f.coeffs:
            if c.denominator % p == 0:
                raise ValueError(f"coefficient {c} is not {p}-integral")
            out.append(c.numerator * pow(c.denominator, -1, p))
        return cls(p, out)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyFp):
            return self.p == other.p and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("PolyFp", self.p, self.coeffs))

    def __repr__(self) -> str:
        return f"PolyFp({self.p}, {list(self.coeffs)})"

    def sort_key(self) -> tuple:
        return (self.degree, self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _wrap(self, coeffs) -> "PolyFp":
        return PolyFp(self.p, coeffs)

    def __add__(self, other: "PolyFp") -> "PolyFp":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return self._wrap((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))

    def __neg__(self) -> "PolyFp":
        return self._wrap(-c for c in self.coeffs)

    def __sub__(self, other: "PolyFp") -> "PolyFp":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return self._wrap((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n))

    def __mul__(self, other) -> "PolyFp":
        if isinstance(other, int):
            return self._wrap(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return self._wrap(())
        p = self.p
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._wrap(v % p for v in out)

    __rmul__ = __mul__

    def divmod(self, other: "PolyFp") -> tuple["PolyFp", "PolyFp"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        db = other.degree
        inv = pow(other.lc, -1, p)
        q = [0] * max(len(r) - db, 0)
        b = other.coeffs
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i] % p
            if c:
                c = c * inv % p
                q[i - db] = c
                for j in range(db + 1):
                    r[i - db + j] -= c * b[j]
        return self._wrap(q), self._wrap(r[:db])

    def __mod__(self, other: "PolyFp") -> "PolyFp":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "PolyFp") -> "PolyFp":
        return self.divmod(other)[0]

    def monic(self) -> "PolyFp":
        if self.is_zero():
            return self
        inv = pow(self.lc, -1, self.p)
        return self._wrap(c * inv for c in self.coeffs)

    def derivative(self) -> "PolyFp":
        return self._wrap(i * c for i, c in enumerate(self.coeffs) if i)

    def powmod(self, e: int, mod: "PolyFp") -> "PolyFp":
        result = self._wrap((1,)) % mod
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def eval(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc


def gcd_fp(a: PolyFp, b: PolyFp) -> PolyFp:
    while b:
        a, b = b, a % b
    return a.monic()


def _pth_root(f: PolyFp) -> PolyFp:
    p = f.p
    return PolyFp(p, f.coeffs[::p])


def _squarefree(f: PolyFp) -> list[tuple[PolyFp, int]]:
    p = f.p
    out: list[tuple[PolyFp, int]] = []
    df = f.derivative()
    if df.is_zero():
        return [(g, m * p) for g, m in _squarefree(_pth_root(f))]
    c = gcd_fp(f, df)
    w = f // c
    i = 1
    while not w.is_one():
        y = gcd_fp(w, c)
        z = w // y
        if not z.is_one():
            out.append((z.monic(), i))
        i += 1
        w = y
        c = c // y
    if not c.is_one() and c.degree > 0:
        out += [(g, m * p) for g, m in _squarefree(_pth_root(c.monic()))]
    return out


def _distinct_degree(f: PolyFp) -> list[tuple[PolyFp, int]]:
    p = f.p
    x = PolyFp.x(p)
    h = x
    out = []
    d = 0
    while f.degree >= 2 * (d + 1):
        d += 1
        h = h.powmod(p, f)
        g = gcd_fp(h - x, f)
        if not g.is_one():
            out.append((g, d))
            f = f // g
            h = h % f
    if f.degree > 0:
        out.append((f.monic(), f.degree))
    return out


def _candidate(p: int, k: int) -> PolyFp:
    digits = []
    while k:
        digits.append(k % p)
        k //= p
    return PolyFp(p, digits)


def _equal_degree(f: PolyFp, d: int) -> list[PolyFp]:
    if f.degree == d:
        return [f]
    p = f.p
    n = f.degree
    # splitting seeds are tried in natural order for reproducibility
    for k in range(p, p**n):
        a = _candidate(p, k)
        if p == 2:
            t = a % f
            acc = t
            for _ in range(d - 1):
                t = (t * t) % f
                acc = acc + t
            b = acc
        else:
            b = a.powmod((p**d - 1) // 2, f) - PolyFp(p, (1,))
        u = gcd_fp(b, f)
        if 0 < u.degree < n:
            return _equal_degree(u, d) + _equal_degree(f // u, d)
    raise ArithmeticError("equal-degree splitting found no seed")


def factor_mod_p(f: PolyFp) -> list[tuple[PolyFp, int]]:
    """Factor a monic polynomial over F_p into monic irreducibles.

    Returns ``(factor, multiplicity)`` pairs sorted by degree, then by the
    coefficient tuple (constant term first).
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if f.lc != 1:
        raise ValueError("factor_mod_p needs a monic polynomial")
    if f.degree == 0:
        return []
    out = []
    for g, mult in _squarefree(f):
        for h, d in _distinct_degree(g):
            for irr in _equal_degree(h, d):
                out.append((irr.monic(), mult))
    out.sort(key=lambda t: (t[0].sort_key(), t[1]))
    return out


def is_irreducible_mod_p(f: PolyFp) -> bool:
    """Rabin's irreducibility test."""
    n = f.degree
    if n < 1:
        return False
    f = f.monic()
    p = f.p
    x = PolyFp.x(p)
    if x.powmod(p**n, f) != x % f:
        return False
    for q in factorint(n):
        h = x.powmod(p ** (n // q), f)
        if not gcd_fp(h - x, f).is_one():
            return False
    return True


def check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


# --------------------------------------------------------------------------
# dense linear algebra over Q and F_p


def solve_rational(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One solution of rows @ x = rhs over Q (free variables set to 0)."""
    return _solve([[Fraction(v) for v in r] + [Fraction(b)] for r, b in zip(rows, rhs)], None)


def solve_mod_p(rows: Sequence[Sequence[int]], rhs: Sequence[int], p: int) -> list[int] | None:
    """One solution of rows @ x = rhs over F_p (free variables set to 0)."""
    return _solve([[v % p for v in r] + [b % p] for r, b in zip(rows, rhs)], p)


def _solve(aug: list[list], p: int | None):
    if not aug:
        return None
    ncols = len(aug[0]) - 1
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(aug)) if aug[r][col]), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = pow(aug[row][col], -1, p) if p else 1 / aug[row][col]
        aug[row] = [(v * inv) % p if p else v * inv for v in aug[row]]
        for r in range(len(aug)):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [((a - f * b) % p if p else a - f * b) for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == len(aug):
            break
    for r in range(row, len(aug)):
        if aug[r][-1]:
            return None
    zero = 0 if p else Fraction(0)
    x = [zero] * ncols
    for r, col in enumerate(pivots):
        x[col] = aug[r][-1]
    return x


def first_dependency(vectors: Sequence[Sequence[Fraction]]) -> list[Fraction] | None:
    """Coefficients c with sum c_i v_i = 0 and the last c nonzero, if the
    last vector depends on the earlier ones; None otherwise."""
    *head, last = vectors
    if not head:
        return None if any(last) else [Fraction(1)]
    dim = len(last)
    rows = [[v[k] for v in head] for k in range(dim)]
    sol = solve_rational(rows, [-c for c in last])
    if sol is None:
        return None
    return sol + [Fraction(1)]
