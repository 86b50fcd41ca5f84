"""Residue class field maps eta: R -> F_{p^d} and finite field predicates."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dfield
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .algebra import PolyFp, PolyQ, factor_mod_p, solve_mod_p
from .budget import SearchBudget
from .errors import FieldMismatch, NotPIntegral, RamifiedPrime
from .ntheory import factorint, is_prime, primes_up_to
from .numfield import Extension, NFElement, NumberField

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrackedRing:
    """A finitely generated ring R inside a number field, described by the
    elements whose denominators must stay invertible and the elements whose
    images must be units."""

    field: NumberField
    generators: tuple[NFElement, ...] = ()
    must_be_unit: tuple[NFElement, ...] = ()

    def __post_init__(self):
        for x in self.generators + self.must_be_unit:
            if x.field != self.field:
                raise FieldMismatch("tracked element outside the ring's field")

    def with_generators(self, *xs: NFElement) -> "TrackedRing":
        return TrackedRing(self.field, self.generators + tuple(xs), self.must_be_unit)

    def with_units(self, *xs: NFElement) -> "TrackedRing":
        return TrackedRing(self.field, self.generators, self.must_be_unit + tuple(xs))

    @property
    def bad_integer(self) -> int:
        """Product of everything whose prime divisors are excluded outright."""
        f = self.field.min_poly
        disc = self.field.discriminant
        out = abs(disc.numerator) * disc.denominator * f.denominator_lcm()
        for x in self.generators + self.must_be_unit:
            out *= x.denominator()
        return out


@dataclass(frozen=True)
class ResidueMap:
    p: int
    factor: PolyFp
    field: NumberField

    @property
    def degree(self) -> int:
        return self.factor.degree

    @property
    def order(self) -> int:
        return self.p**self.degree

    def to_json(self) -> dict:
        return {"p": self.p, "factor": [str(c) for c in self.factor.coeffs]}

    def __call__(self, x: NFElement) -> "FFElem":
        return reduce(self, x)

    def elem(self, coeffs: Iterable[int]) -> "FFElem":
        return FFElem(self, PolyFp(self.p, coeffs) % self.factor)

    @property
    def zero(self) -> "FFElem":
        return FFElem(self, PolyFp(self.p))

    @property
    def one(self) -> "FFElem":
        return self.elem((1,))

    def __repr__(self) -> str:
        return f"ResidueMap(p={self.p}, factor={list(self.factor.coeffs)})"


class FFElem:
    """Element of F_p[T]/(factor)."""

    __slots__ = ("map", "poly")

    def __init__(self, m: ResidueMap, poly: PolyFp):
        self.map = m
        self.poly = poly

    @property
    def coeffs(self) -> tuple[int, ...]:
        c = self.poly.coeffs
        return c + (0,) * (self.map.degree - len(c))

    def _check(self, other: "FFElem") -> "FFElem":
        if isinstance(other, int):
            return self.map.elem((other,))
        if other.map != self.map:
            raise FieldMismatch("residue elements from different maps")
        return other

    def __add__(self, other):
        return FFElem(self.map, self.poly + self._check(other).poly)

    def __sub__(self, other):
        return FFElem(self.map, self.poly - self._check(other).poly)

    def __neg__(self):
        return FFElem(self.map, -self.poly)

    def __mul__(self, other):
        return FFElem(self.map, (self.poly * self._check(other).poly) % self.map.factor)

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, e: int) -> "FFElem":
        if e < 0:
            return self.inverse() ** (-e)
        return FFElem(self.map, self.poly.powmod(e, self.map.factor))

    def inverse(self) -> "FFElem":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse in a field")
        return self ** (self.map.order - 2)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_one(self) -> bool:
        return self.poly.is_one()

    def in_prime_field(self) -> bool:
        return self.poly.degree <= 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.map.elem((other,))
        if not isinstance(other, FFElem):
            return NotImplemented
        return self.map == other.map and self.poly == other.poly

    def __hash__(self) -> int:
        return hash(self.poly)

    def __repr__(self) -> str:
        return f"FFElem({list(self.coeffs)} mod {list(self.map.factor.coeffs)}, p={self.map.p})"


def _ramified(K: NumberField, p: int) -> bool:
    disc = K.discriminant
    return disc.numerator % p == 0 or disc.denominator % p == 0 or K.min_poly.denominator_lcm() % p == 0


@lru_cache(maxsize=4096)
def residue_split(K: NumberField, p: int) -> tuple[ResidueMap, ...]:
    """One map per irreducible factor of f mod p, in factor_mod_p order."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if _ramified(K, p):
        raise RamifiedPrime(f"p = {p} divides the discriminant or a denominator of the minimal polynomial")
    fbar = PolyFp.from_polyq(K.min_poly, p)
    return tuple(ResidueMap(p, fac, K) for fac, _ in factor_mod_p(fbar))


def reduce(m: ResidueMap, x: NFElement) -> FFElem:
    if x.field != m.field:
        raise FieldMismatch("element and residue map belong to different fields")
    p = m.p
    out = []
    for c in x.coeffs:
        if c.denominator % p == 0:
            raise NotPIntegral(f"{c} is not {p}-integral")
        out.append(c.numerator * pow(c.denominator, -1, p))
    return FFElem(m, PolyFp(p, out) % m.factor)


def is_good_prime(R: TrackedRing, p: int) -> bool:
    if R.bad_integer % p == 0:
        return False
    if not R.must_be_unit:
        return True
    for m in residue_split(R.field, p):
        for u in R.must_be_unit:
            if reduce(m, u).is_zero():
                return False
    return True


def good_primes(R: TrackedRing, budget: SearchBudget | None = None, start: int = 2) -> Iterator[int]:
    budget = budget or SearchBudget()
    for p in primes_up_to(budget.max_prime):
        if p < start:
            continue
        if is_good_prime(R, p):
            log.debug("scan p=%d", p)
            yield p


def _order_divisor_structure(q: int) -> dict[int, int]:
    return factorint(q - 1)


def mult_order(x: FFElem) -> int:
    if x.is_zero():
        raise ValueError("zero has no multiplicative order")
    n = x.map.order - 1
    for r, e in _order_divisor_structure(x.map.order).items():
        for _ in range(e):
            if (x ** (n // r)).is_one():
                n //= r
            else:
                break
    return n


def in_cyclic(x: FFElem, y: FFElem) -> bool:
    """x in <y>; F* is cyclic so this is ord(x) | ord(y)."""
    return mult_order(y) % mult_order(x) == 0


def discrete_log(x: FFElem, y: FFElem, order: int | None = None) -> int | None:
    """e in [0, ord y) with y**e == x, or None (baby-step giant-step)."""
    if not in_cyclic(x, y):
        return None
    n = order or mult_order(y)
    step = math.isqrt(n) + 1
    table = {}
    cur = x.map.one
    for j in range(step):
        table.setdefault(cur.poly.coeffs, j)
        cur = cur * y
    giant = y ** (-step)
    cur = x
    for i in range(step + 1):
        j = table.get(cur.poly.coeffs)
        if j is not None:
            return (i * step + j) % n
        cur = cur * giant
    return None


def _image_vector(v, m: ResidueMap) -> list[int]:
    if isinstance(v, NFElement):
        v = reduce(m, v)
    if v.map != m:
        raise FieldMismatch("residue element taken under another map")
    return list(v.coeffs)


def span_member(x, basis: Sequence, maps: Sequence[ResidueMap]) -> tuple[int, ...] | None:
    """Coefficients c in F_p with x = sum c_j basis_j under every map at once.

    ``x`` may be an NFElement, an FFElem (single map) or a tuple of FFElems
    aligned with ``maps``; basis entries likewise.
    """
    if not maps:
        raise ValueError("no residue maps supplied")
    p = maps[0].p
    if any(m.p != p for m in maps):
        raise ValueError("residue maps lie over different primes")
    rows, rhs = [], []
    for i, m in enumerate(maps):
        xi = x[i] if isinstance(x, tuple) else x
        cols = [_image_vector(b[i] if isinstance(b, tuple) else b, m) for b in basis]
        xv = _image_vector(xi, m)
        for r in range(m.degree):
            rows.append([col[r] for col in cols])
            rhs.append(xv[r])
    sol = solve_mod_p(rows, rhs, p)
    return None if sol is None else tuple(sol)


def restrict_map(m: ResidueMap, lift: Extension) -> ResidueMap:
    """The map on lift.base obtained by composing lift with m.

    Its factor is the irreducible factor of the base polynomial mod p that
    vanishes at the image of the base generator.
    """
    if lift.is_identity:
        return m
    if m.field != lift.field:
        raise FieldMismatch("residue map is not on the extension field")
    img = reduce(m, lift.gen_image)
    for base_map in residue_split(lift.base, m.p):
        fac = base_map.factor
        acc = m.zero
        for c in reversed(fac.coeffs):
            acc = acc * img + c
        if acc.is_zero():
            return base_map
    raise ArithmeticError("no base factor vanishes at the generator image")
