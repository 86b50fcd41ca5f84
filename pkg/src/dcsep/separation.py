"""Prime searches: prescribed multiplicative order, multiplicative power
separation and additive lattice separation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .budget import SearchBudget
from .errors import BudgetExhausted, LatticeMembership, NotApplicable, NotSeparable, RootOfUnity
from .algebra import solve_rational
from .numfield import EmbeddingHandle, NFElement, min_poly_of, recover_exponent, usable_embedding
from .residue import (
    ResidueMap,
    TrackedRing,
    discrete_log,
    good_primes,
    in_cyclic,
    mult_order,
    reduce,
    residue_split,
    span_member,
)

log = logging.getLogger(__name__)

Mode = Literal["exact", "divisible_by"]


@dataclass(frozen=True)
class OrderPrimeResult:
    map: ResidueMap
    achieved_order: int
    mode: str
    projective: bool = False

    @property
    def p(self) -> int:
        return self.map.p


@dataclass(frozen=True)
class PowerSeparation:
    maps: tuple[ResidueMap, ...]

    @property
    def primes(self) -> list[int]:
        return sorted({m.p for m in self.maps})


@dataclass(frozen=True)
class AdditiveSeparation:
    p: int
    maps: tuple[ResidueMap, ...]
    joint: bool = False


def root_of_unity_order(x: NFElement) -> int | None:
    """j with x**j == 1 for the least j <= 2 * deg**2, else None."""
    if x.is_zero():
        return None
    bound = 2 * x.field.degree**2
    cur = x
    for j in range(1, bound + 1):
        if cur == 1:
            return j
        cur = cur * x
    return None


def psl_order(x) -> int:
    """Least k with x**k == +-1, i.e. the order of diag(x, 1/x) in PSL(2)."""
    n = mult_order(x)
    if x.map.p != 2 and n % 2 == 0:
        return n // 2
    return n


def find_order_prime(
    delta: NFElement,
    m: int,
    R: TrackedRing | None = None,
    mode: Mode = "exact",
    budget: SearchBudget | None = None,
    projective: bool = False,
) -> OrderPrimeResult:
    """Smallest good prime, then first factor, where the image of delta has
    order m (mode "exact") or order divisible by m (mode "divisible_by")."""
    budget = budget or SearchBudget()
    if m < 1:
        raise ValueError("m must be positive")
    if delta.is_zero():
        raise ValueError("delta must be nonzero")
    r = root_of_unity_order(delta)
    if r is not None:
        raise RootOfUnity(r)
    R = (R or TrackedRing(delta.field)).with_generators(delta).with_units(delta)
    order_of = psl_order if projective else mult_order
    last = None
    for p in good_primes(R, budget):
        last = p
        for mp in residue_split(R.field, p):
            q1 = mp.order - 1
            if mode == "exact" and q1 % m:
                continue
            if mode == "divisible_by" and q1 % m:
                continue
            n = order_of(reduce(mp, delta))
            ok = n == m if mode == "exact" else n % m == 0
            log.debug("order scan p=%d factor=%s order=%d", p, list(mp.factor.coeffs), n)
            if ok:
                return OrderPrimeResult(mp, n, mode, projective)
    raise BudgetExhausted("order prime search", last)


def exact_power(lam: NFElement, omega: NFElement, budget: SearchBudget, handle: EmbeddingHandle | None = None) -> int | None:
    """m with lam == omega**m, or None; decided exactly whenever omega has an
    embedding of modulus != 1, otherwise by bounded enumeration."""
    r = root_of_unity_order(omega)
    if r is not None:
        cur = omega.field.one
        for j in range(r):
            if cur == lam:
                return j
            cur = cur * omega
        return None
    h = usable_embedding(omega, handle, budget.precision_cap)
    if h is not None:
        return recover_exponent(lam, omega, h, budget.precision_cap)
    for j in range(budget.max_exponent + 1):
        for s in (j, -j):
            if omega**s == lam:
                return s
    return None


def separate_power(
    lam: NFElement,
    omega: NFElement,
    R: TrackedRing | None = None,
    budget: SearchBudget | None = None,
    handle: EmbeddingHandle | None = None,
) -> PowerSeparation:
    """Residue maps under which the image of lam is not a power of the image
    of omega. A single map is preferred; pairs of maps are tried when no
    single prime up to the current one works."""
    budget = budget or SearchBudget()
    if lam.is_zero() or omega.is_zero():
        raise ValueError("lam and omega must be nonzero")
    m = exact_power(lam, omega, budget, handle)
    if m is not None:
        raise NotSeparable(m)
    R = (R or TrackedRing(lam.field)).with_generators(lam, omega).with_units(lam, omega)
    seen: list[tuple[ResidueMap, int, int]] = []
    pairs = 0
    last = None
    for p in good_primes(R, budget):
        last = p
        fresh = []
        for mp in residue_split(R.field, p):
            x, y = reduce(mp, lam), reduce(mp, omega)
            if not in_cyclic(x, y):
                return PowerSeparation((mp,))
            n = mult_order(y)
            fresh.append((mp, n, discrete_log(x, y, n)))
        for j, (mj, nj, ej) in enumerate(fresh):
            for mi, ni, ei in seen + fresh[:j]:
                if pairs >= budget.max_prime_pairs:
                    break
                pairs += 1
                if (ei - ej) % math.gcd(ni, nj):
                    return PowerSeparation((mi, mj))
        seen += fresh
    raise BudgetExhausted("power separation", last)


def rational_coordinates(b: NFElement, basis: list[NFElement]) -> list[Fraction] | None:
    cols = [v.vector() for v in basis]
    rows = [[c[i] for c in cols] for i in range(b.field.degree)]
    return solve_rational(rows, b.vector())


def in_subfield(b: NFElement, beta: NFElement) -> bool:
    e = min_poly_of(beta).degree
    powers = [beta.field.one]
    for _ in range(e - 1):
        powers.append(powers[-1] * beta)
    return rational_coordinates(b, powers) is not None


def separate_additive(
    b: NFElement,
    beta: NFElement,
    R: TrackedRing | None = None,
    budget: SearchBudget | None = None,
) -> AdditiveSeparation:
    """A prime at which the image of b leaves the F_p-span of {1, beta}.

    When b lies outside Q(beta) a single factor always eventually works
    (a Frobenius moving b but fixing beta). When b lies in Q(beta) the
    joint system over all factors at p is used as well.
    """
    budget = budget or SearchBudget()
    one = b.field.one
    coords = rational_coordinates(b, [one, beta])
    if coords is not None:
        x, y = coords
        if x.denominator == 1 and y.denominator == 1:
            raise LatticeMembership(int(x), int(y))
        raise NotApplicable(f"b = {x} + {y}*beta lies in Q + Q*beta")
    joint = in_subfield(b, beta)
    R = (R or TrackedRing(b.field)).with_generators(b, beta)
    last = None
    for p in good_primes(R, budget):
        last = p
        maps = residue_split(R.field, p)
        for mp in maps:
            if span_member(b, [one, beta], [mp]) is None:
                return AdditiveSeparation(p, (mp,))
        if joint and len(maps) > 1 and span_member(b, [one, beta], maps) is None:
            return AdditiveSeparation(p, maps, joint=True)
    raise BudgetExhausted("additive separation", last)


def independence_prime(
    beta: NFElement,
    R: TrackedRing | None = None,
    budget: SearchBudget | None = None,
    avoid: int = 0,
    nonzero: tuple[NFElement, ...] = (),
    accept=None,
) -> ResidueMap:
    """Smallest good prime p not dividing ``avoid`` with a factor where the
    image of beta is outside F_p, every ``nonzero`` element survives and the
    optional ``accept(map)`` predicate holds."""
    budget = budget or SearchBudget()
    R = (R or TrackedRing(beta.field)).with_generators(beta, *nonzero)
    last = None
    for p in good_primes(R, budget):
        last = p
        if avoid and avoid % p == 0:
            continue
        for mp in residue_split(R.field, p):
            if reduce(mp, beta).in_prime_field():
                continue
            if any(reduce(mp, z).is_zero() for z in nonzero):
                continue
            if accept is not None and not accept(mp):
                continue
            return mp
    raise BudgetExhausted("independence prime search", last)


def nonvanishing_prime(
    xs: tuple[NFElement, ...],
    R: TrackedRing | None = None,
    budget: SearchBudget | None = None,
    require: str = "any",
) -> ResidueMap:
    """Smallest good prime, first factor, where some (``require="any"``) or
    every (``"all"``) element of xs has nonzero image."""
    budget = budget or SearchBudget()
    R = (R or TrackedRing(xs[0].field)).with_generators(*xs)
    test = any if require == "any" else all
    last = None
    for p in good_primes(R, budget):
        last = p
        for mp in residue_split(R.field, p):
            if test(not reduce(mp, x).is_zero() for x in xs):
                return mp
    raise BudgetExhausted("nonvanishing prime search", last)
