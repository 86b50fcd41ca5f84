"""Arithmetic in k = Q[T]/(f), quadratic adjunction and complex embeddings."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple, Sequence

import mpmath

from .algebra import (
    PolyFp,
    PolyQ,
    discriminant,
    factor_mod_p,
    first_dependency,
    format_rational,
    gcd_q,
    parse_rational,
    resultant,
    solve_rational,
    xgcd_q,
)
from .errors import FieldMismatch, Indeterminate, UnsupportedEigenvalue
from .ntheory import primes_up_to

DEFAULT_PRECISION = 128
DEFAULT_PRECISION_CAP = 4096


class NumberField:
    """The field Q[T]/(min_poly) for a monic min_poly asserted irreducible."""

    def __init__(self, min_poly: PolyQ, variable: str = "t", asserted_irreducible: bool = True):
        if min_poly.degree < 1:
            raise ValueError("min_poly must have degree >= 1")
        if min_poly.lc != 1:
            raise ValueError("min_poly must be monic")
        self.min_poly = min_poly
        self.variable = variable
        self.degree = min_poly.degree
        self.asserted_irreducible = asserted_irreducible
        n = self.degree
        # rows: T^(n+j) mod f for j = 0..n-2
        red = []
        cur = [-c for c in min_poly.coeffs[:n]]
        for _ in range(max(n - 1, 0)):
            red.append(cur)
            top = cur[-1]
            nxt = [Fraction(0)] + cur[:-1]
            cur = [nxt[i] + top * red[0][i] for i in range(n)]
        self._reduction = red

    @classmethod
    def rationals(cls) -> "NumberField":
        return _QQ

    @classmethod
    def from_json(cls, data: dict) -> "NumberField":
        return cls(PolyQ.from_strings(data["min_poly"]), variable=data.get("variable", "t"))

    def to_json(self) -> dict:
        return {"variable": self.variable, "min_poly": self.min_poly.to_strings()}

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, NumberField):
            return NotImplemented
        return self.min_poly == other.min_poly and self.variable == other.variable

    def __hash__(self) -> int:
        return hash((self.variable, self.min_poly.coeffs))

    def __repr__(self) -> str:
        return f"NumberField({self.min_poly.to_strings()})"

    @cached_property
    def discriminant(self) -> Fraction:
        return discriminant(self.min_poly)

    def __call__(self, value) -> "NFElement":
        if isinstance(value, NFElement):
            if value.field != self:
                raise FieldMismatch("element belongs to another field")
            return value
        if isinstance(value, str):
            value = parse_rational(value)
        return NFElement(self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1))

    def element(self, coeffs: Sequence) -> "NFElement":
        c = [Fraction(x) if not isinstance(x, str) else parse_rational(x) for x in coeffs]
        if len(c) > self.degree:
            return self.from_poly(PolyQ(c))
        c += [Fraction(0)] * (self.degree - len(c))
        return NFElement(self, tuple(c))

    def from_poly(self, poly: PolyQ) -> "NFElement":
        r = poly % self.min_poly
        c = list(r.coeffs) + [Fraction(0)] * (self.degree - len(r.coeffs))
        return NFElement(self, tuple(c))

    @property
    def zero(self) -> "NFElement":
        return self(0)

    @property
    def one(self) -> "NFElement":
        return self(1)

    @property
    def gen(self) -> "NFElement":
        return self.from_poly(PolyQ.x())

    def reduce_product(self, prod: list[Fraction]) -> tuple[Fraction, ...]:
        n = self.degree
        out = prod[:n] + [Fraction(0)] * (n - len(prod[:n]))
        for j, c in enumerate(prod[n:]):
            if c:
                row = self._reduction[j]
                for i in range(n):
                    out[i] += c * row[i]
        return tuple(out)


_QQ = NumberField(PolyQ((0, 1)))


class NFElement:
    """Element of a number field in the power basis 1, T, ..., T^(n-1)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: tuple[Fraction, ...]):
        if len(coeffs) != field.degree:
            raise ValueError("coefficient vector length must equal the field degree")
        self.field = field
        self.coeffs = coeffs

    @classmethod
    def from_json(cls, field: NumberField, data: Sequence[str]) -> "NFElement":
        if len(data) != field.degree:
            raise ValueError(f"expected {field.degree} coefficients, got {len(data)}")
        return cls(field, tuple(parse_rational(s) for s in data))

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    def _other(self, other) -> "NFElement":
        if isinstance(other, NFElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("operands live in different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return NFElement(self.field, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return NFElement(self.field, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, tuple(a * other for a in self.coeffs))
        o = self._other(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if self.field.degree == 1:
            return NFElement(self.field, (a[0] * b[0],))
        prod = [Fraction(0)] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return NFElement(self.field, self.field.reduce_product(prod))

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in number field")
        if self.field.degree == 1:
            return NFElement(self.field, (1 / self.coeffs[0],))
        g, s, _ = xgcd_q(self.poly(), self.field.min_poly)
        if g.degree != 0:
            raise ZeroDivisionError("element is a zero divisor; min_poly is reducible")
        return self.field.from_poly(s)

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def __pow__(self, e: int) -> "NFElement":
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"NFElement({self.to_json()})"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    def poly(self) -> PolyQ:
        return PolyQ(self.coeffs)

    def denominator(self) -> int:
        out = 1
        for c in self.coeffs:
            out = math.lcm(out, c.denominator)
        return out

    def vector(self) -> list[Fraction]:
        return list(self.coeffs)


def nf_arith(x: NFElement, y: NFElement, op: str) -> NFElement:
    if x.field != y.field:
        raise FieldMismatch("operands live in different fields")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown op {op!r}")


def min_poly_of(x: NFElement) -> PolyQ:
    """Minimal polynomial of x over Q via the first linear dependency among
    1, x, x^2, ..."""
    powers = [x.field.one.vector()]
    cur = x.field.one
    for _ in range(x.field.degree):
        cur = cur * x
        powers.append(cur.vector())
        dep = first_dependency(powers)
        if dep is not None:
            return PolyQ(dep)
    raise ArithmeticError("no dependency found; field degree inconsistent")


# --------------------------------------------------------------------------
# complex embeddings


class Box(NamedTuple):
    re: mpmath.mpf
    im: mpmath.mpf
    radius: mpmath.mpf

    @property
    def center(self) -> mpmath.mpc:
        return mpmath.mpc(self.re, self.im)


@dataclass(frozen=True)
class EmbeddingHandle:
    field: NumberField
    root_index: int = 0
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not 0 <= self.root_index < self.field.degree:
            raise ValueError(f"root_index {self.root_index} out of range")

    def refined(self) -> "EmbeddingHandle":
        return EmbeddingHandle(self.field, self.root_index, self.precision_bits * 2)

    def to_json(self) -> dict:
        return {"root_index": self.root_index}


def _order_roots(boxes: list[Box]) -> list[Box]:
    boxes = sorted(boxes, key=lambda b: b.re)
    out: list[Box] = []
    group: list[Box] = []
    for b in boxes:
        if group and abs(b.re - group[-1].re) > b.radius + group[-1].radius:
            out += sorted(group, key=lambda g: g.im)
            group = []
        group.append(b)
    out += sorted(group, key=lambda g: g.im)
    return out


@lru_cache(maxsize=256)
def _isolate(min_poly: PolyQ, bits: int) -> tuple[Box, ...] | None:
    n = min_poly.degree
    with mpmath.workprec(bits):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(min_poly.coeffs)]
        if n == 1:
            r = -coeffs[1] / coeffs[0]
            return (Box(r, mpmath.mpf(0), mpmath.mpf(0)),)
        try:
            roots = mpmath.polyroots(coeffs, maxsteps=50 + 10 * n, extraprec=bits)
        except mpmath.libmp.libhyper.NoConvergence:
            return None
        deriv = [c * (n - i) for i, c in enumerate(coeffs[:-1])]
        slack = mpmath.mpf(2) ** (-bits + 16)
        boxes = []
        for z in roots:
            z = mpmath.mpc(z)
            fz = mpmath.polyval(coeffs, z)
            dz = mpmath.polyval(deriv, z)
            if dz == 0:
                return None
            # a disc of radius n|f/f'| around z contains a root
            rad = 2 * n * abs(fz) / abs(dz) + slack * (1 + abs(z))
            boxes.append(Box(mpmath.re(z), mpmath.im(z), rad))
    for a, b in itertools.combinations(boxes, 2):
        if abs(a.center - b.center) <= a.radius + b.radius:
            return None
    return tuple(_order_roots(boxes))


def root_boxes(field: NumberField, bits: int = DEFAULT_PRECISION, cap: int = DEFAULT_PRECISION_CAP) -> tuple[Box, ...]:
    """Pairwise disjoint boxes, one around each root of min_poly, in
    (Re, Im) order. Precision doubles until the boxes separate."""
    while bits <= cap:
        boxes = _isolate(field.min_poly, bits)
        if boxes is not None:
            return boxes
        bits *= 2
    raise Indeterminate(f"roots of {field.min_poly} not isolated within {cap} bits")


def complex_embedding(h: EmbeddingHandle, cap: int = DEFAULT_PRECISION_CAP) -> Box:
    if h.precision_bits > cap:
        raise Indeterminate("precision cap exceeded")
    return root_boxes(h.field, h.precision_bits, cap)[h.root_index]


def evaluate(x: NFElement, h: EmbeddingHandle, cap: int = DEFAULT_PRECISION_CAP) -> tuple[mpmath.mpc, mpmath.mpf]:
    """sigma(x) at the handle's embedding with an error radius."""
    box = complex_embedding(h, cap)
    with mpmath.workprec(h.precision_bits):
        z = box.center
        az = abs(z)
        val = mpmath.mpc(0)
        bound = mpmath.mpf(0)
        total = mpmath.mpf(0)
        for i, c in reversed(list(enumerate(x.coeffs))):
            val = val * z + mpmath.mpf(c.numerator) / c.denominator
        for i, c in enumerate(x.coeffs):
            if c:
                ac = abs(mpmath.mpf(c.numerator) / c.denominator)
                bound += ac * ((az + box.radius) ** i - az**i)
                total += ac * (az + box.radius) ** i
        rad = bound + total * mpmath.mpf(2) ** (-h.precision_bits + 8)
    return val, rad


def abs_interval(x: NFElement, h: EmbeddingHandle, cap: int = DEFAULT_PRECISION_CAP) -> tuple[mpmath.mpf, mpmath.mpf]:
    val, rad = evaluate(x, h, cap)
    with mpmath.workprec(h.precision_bits):
        a = abs(val)
        return max(a - rad, mpmath.mpf(0)), a + rad


def usable_embedding(lam: NFElement, handle: EmbeddingHandle | None = None, cap: int = DEFAULT_PRECISION_CAP) -> EmbeddingHandle | None:
    """The first embedding (the given one first) where |sigma(lam)| != 1."""
    field = lam.field
    order = list(range(field.degree))
    if handle is not None:
        order.remove(handle.root_index)
        order.insert(0, handle.root_index)
    for idx in order:
        h = EmbeddingHandle(field, idx, handle.precision_bits if handle else DEFAULT_PRECISION)
        try:
            _unit_side(lam, h, cap)
            return h
        except UnsupportedEigenvalue:
            continue
    return None


def _unit_side(lam: NFElement, h: EmbeddingHandle, cap: int) -> EmbeddingHandle:
    while True:
        lo, hi = abs_interval(lam, h, cap)
        if hi < 1 or lo > 1:
            return h
        if h.precision_bits * 2 > cap:
            raise UnsupportedEigenvalue(f"|sigma(lambda)| = 1 within {cap} bits")
        h = h.refined()


MAX_EXPONENT_CHECK = 100_000


def _exponent_candidates(x: NFElement, lam: NFElement, h: EmbeddingHandle, cap: int) -> list[int]:
    h = _unit_side(lam, h, cap)
    while True:
        llo, lhi = abs_interval(lam, h, cap)
        xlo, xhi = abs_interval(x, h, cap)
        if xlo > 0:
            with mpmath.workprec(h.precision_bits):
                ends = [mpmath.log(a) / mpmath.log(b) for a in (xlo, xhi) for b in (llo, lhi)]
                lo, hi = min(ends), max(ends)
                mid = (lo + hi) / 2
                if hi - lo < 4:
                    cands = range(int(mpmath.floor(lo)), int(mpmath.ceil(hi)) + 1)
                    return sorted(cands, key=lambda m: abs(m - mid))
        if h.precision_bits * 2 > cap:
            raise Indeterminate("exponent candidates not resolved within the precision cap")
        h = h.refined()


def recover_exponent(x: NFElement, lam: NFElement, h: EmbeddingHandle, cap: int = DEFAULT_PRECISION_CAP) -> int | None:
    """m with x == lam**m exactly, or None.

    The candidate comes from log|sigma(x)| / log|sigma(lam)| at the handle's
    embedding and is then confirmed exactly.
    """
    hit = _recover(x, lam, h, cap, signs=(1,))
    return None if hit is None else hit[0]


def recover_exponent_pm(x: NFElement, lam: NFElement, h: EmbeddingHandle, cap: int = DEFAULT_PRECISION_CAP) -> tuple[int, int] | None:
    """(m, sign) with x == sign * lam**m; the projective variant."""
    return _recover(x, lam, h, cap, signs=(1, -1))


def _recover(x, lam, h, cap, signs):
    if x.is_zero() or lam.is_zero():
        return None
    if x.field != lam.field:
        raise FieldMismatch("operands live in different fields")
    for m in _exponent_candidates(x, lam, h, cap):
        if abs(m) > MAX_EXPONENT_CHECK:
            continue
        power = lam**m
        for s in signs:
            if power == x * s:
                return m, s
    return None


# --------------------------------------------------------------------------
# square roots and quadratic adjunction


def _nonsquare_witness(d: NFElement, tries: int = 40) -> int | None:
    """A prime p at which some residue image of d is a nonsquare, proving
    d is not a square in the field."""
    field = d.field
    f = field.min_poly
    disc = field.discriminant
    bad = disc.numerator * disc.denominator * f.denominator_lcm() * d.denominator()
    seen = 0
    for p in primes_up_to(20000):
        if p == 2 or bad % p == 0:
            continue
        seen += 1
        if seen > tries:
            return None
        fbar = PolyFp.from_polyq(f, p)
        dbar = PolyFp.from_polyq(d.poly(), p)
        for fac, _ in factor_mod_p(fbar):
            img = dbar % fac
            if img.is_zero():
                continue
            q = p**fac.degree
            if not img.powmod((q - 1) // 2, fac).is_one():
                return p
    return None


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def sqrt_in_field(d: NFElement, cap: int = DEFAULT_PRECISION_CAP) -> NFElement | None:
    """s with s*s == d, or None when d is provably not a square."""
    field = d.field
    if d.is_zero():
        return field.zero
    if field.degree == 1:
        r = _rational_sqrt(d.coeffs[0])
        return None if r is None else field(r)
    if _nonsquare_witness(d) is not None:
        return None
    bits = DEFAULT_PRECISION
    while bits <= cap:
        s = _numeric_sqrt(d, bits, cap)
        if s is not None:
            return s
        bits *= 2
    raise Indeterminate("square root neither found nor refuted")


def _numeric_sqrt(d: NFElement, bits: int, cap: int) -> NFElement | None:
    field = d.field
    n = field.degree
    boxes = root_boxes(field, bits, cap)
    with mpmath.workprec(bits):
        zs = [b.center for b in boxes]
        vals = []
        for z in zs:
            v = mpmath.mpc(0)
            for c in reversed(d.coeffs):
                v = v * z + mpmath.mpf(c.numerator) / c.denominator
            vals.append(mpmath.sqrt(v))
        vinv = mpmath.inverse(mpmath.matrix([[z**i for i in range(n)] for z in zs]))
        # conjugate embeddings take conjugate values; only free signs vary
        free, partner = [], {}
        for i, b in enumerate(boxes):
            if abs(b.im) <= b.radius or b.im > 0:
                free.append(i)
        for i, b in enumerate(boxes):
            if i not in free:
                j = min(free, key=lambda k: abs(zs[k] - mpmath.conj(zs[i])))
                partner[i] = j
        for signs in itertools.product((1, -1), repeat=len(free) - 1):
            sign = dict(zip(free, (1,) + signs))
            target = []
            for i in range(n):
                if i in sign:
                    target.append(sign[i] * vals[i])
                else:
                    target.append(mpmath.conj(sign[partner[i]] * vals[partner[i]]))
            coeffs = vinv * mpmath.matrix(target)
            approx = []
            for i in range(n):
                re = mpmath.re(coeffs[i])
                approx.append(Fraction(mpmath.nstr(re, int(bits * 0.3), strip_zeros=False)).limit_denominator(2 ** (bits // 4)))
            s = NFElement(field, tuple(approx))
            if s * s == d:
                return s
    return None


@dataclass(frozen=True)
class Extension:
    """An embedding of ``base`` into ``field`` sending base's generator to
    ``gen_image``."""

    base: NumberField
    field: NumberField
    gen_image: NFElement

    @classmethod
    def identity(cls, field: NumberField) -> "Extension":
        return cls(field, field, field.gen)

    @property
    def is_identity(self) -> bool:
        return self.base == self.field

    def __call__(self, x: NFElement) -> NFElement:
        if x.field != self.base:
            raise FieldMismatch("element is not in the extension's base field")
        if self.is_identity:
            return x
        acc = self.field.zero
        for c in reversed(x.coeffs):
            acc = acc * self.gen_image + c
        return acc

    def then(self, other: "Extension") -> "Extension":
        """The composite base -> self.field -> other.field."""
        if self.is_identity:
            return other
        if other.is_identity:
            return self
        return Extension(self.base, other.field, other(self.gen_image))


@dataclass(frozen=True)
class QuadraticAdjunction:
    field: NumberField
    lift: Extension
    root: NFElement
    reducible: bool
    shift: int = 0


def _norm_poly(f: PolyQ, a: PolyQ, b: PolyQ, c: int) -> PolyQ:
    """Res_Y(f(Y), (X - cY)^2 + a(Y)(X - cY) + b(Y)), by interpolation."""
    n = f.degree
    xs = list(range(2 * n + 1))
    ys = []
    lin = PolyQ((0, -c))
    for x0 in xs:
        z = lin + x0
        g = z * z + a * z + b
        ys.append(resultant(f, g) if g else Fraction(0))
    # Newton interpolation
    coef = list(ys)
    for j in range(1, len(xs)):
        for i in range(len(xs) - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = PolyQ((coef[-1],))
    for i in range(len(xs) - 2, -1, -1):
        poly = poly * PolyQ((-xs[i], 1)) + coef[i]
    return poly


def adjoin_quadratic_root(K: NumberField, a: NFElement, b: NFElement, variable: str | None = None) -> QuadraticAdjunction:
    """Adjoin a root of X^2 + aX + b to K.

    When the quadratic already has a root in K, that root is returned with
    ``reducible=True`` and no extension. Otherwise the new field is presented
    by theta = root + c * (old generator) for the least c >= 0 whose norm
    polynomial is squarefree.
    """
    disc = a * a - 4 * b
    s = sqrt_in_field(disc)
    if s is not None:
        return QuadraticAdjunction(K, Extension.identity(K), (s - a) / 2, reducible=True)
    f = K.min_poly
    n = K.degree
    for c in itertools.count():
        big = _norm_poly(f, a.poly(), b.poly(), c)
        if big.degree == 2 * n and gcd_q(big, big.derivative()).degree == 0:
            break
    L = NumberField(big, variable=variable or K.variable)
    # tower basis alpha^i rho^j; rho^2 = -a rho - b
    def tmul(u, v):
        u0, u1 = u
        v0, v1 = v
        w2 = u1 * v1
        return (u0 * v0 - w2 * b, u0 * v1 + u1 * v0 - w2 * a)

    theta = (K.gen * c, K.one)
    powers = []
    cur = (K.one, K.zero)
    for _ in range(2 * n):
        powers.append(cur[0].vector() + cur[1].vector())
        cur = tmul(cur, theta)
    rows = [[powers[j][i] for j in range(2 * n)] for i in range(2 * n)]

    def in_theta(target):
        sol = solve_rational(rows, target[0].vector() + target[1].vector())
        return NFElement(L, tuple(sol))

    gen_image = in_theta((K.gen, K.zero))
    root = in_theta((K.zero, K.one))
    lift = Extension(K, L, gen_image)
    assert f(gen_image).is_zero()
    assert (root * root + lift(a) * root + lift(b)).is_zero()
    return QuadraticAdjunction(L, lift, root, reducible=False, shift=c)


def irreducibility_spot_check(f: PolyQ, tries: int = 30) -> bool:
    """True when factor degrees modulo a few primes rule out any nontrivial
    factorization over Q; False means unverified, not reducible."""
    n = f.degree
    if n == 1:
        return True
    disc = discriminant(f)
    bad = disc.numerator * disc.denominator * f.denominator_lcm()
    possible = set(range(1, n))
    seen = 0
    for p in primes_up_to(10000):
        if bad % p == 0:
            continue
        seen += 1
        if seen > tries:
            break
        degs = [g.degree for g, _ in factor_mod_p(PolyFp.from_polyq(f, p))]
        sums = {0}
        for d in degs:
            sums |= {s + d for s in sums}
        possible &= sums
        if not possible:
            return True
    return False


def solve_linear(rows: Sequence[Sequence[NFElement]], rhs: Sequence[NFElement]) -> list[NFElement] | None:
    """One solution over the field of rows @ x = rhs (free variables 0)."""
    from .algebra import _solve

    field = rhs[0].field
    sol = _solve([list(r) + [b] for r, b in zip(rows, rhs)], None)
    if sol is None:
        return None
    return [field(v) if not isinstance(v, NFElement) else v for v in sol]
