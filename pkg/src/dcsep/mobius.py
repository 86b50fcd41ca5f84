"""SL(2) / PSL(2) matrices over a number field: arithmetic, classification,
diagonalization and the normalizing conjugations."""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Sequence

import mpmath

from .errors import SharedFixedPoint, UnsupportedEigenvalue
from .numfield import (
    DEFAULT_PRECISION_CAP,
    EmbeddingHandle,
    Extension,
    NFElement,
    NumberField,
    abs_interval,
    adjoin_quadratic_root,
    evaluate,
    root_boxes,
)

IDENTITY_CLASS = "identity_class"
PARABOLIC = "parabolic"
NONPARABOLIC = "nonparabolic"


class SL2Matrix:
    __slots__ = ("a", "b", "c", "d", "projective")

    def __init__(self, a, b, c, d, projective: bool = False, check: bool = True):
        self.a, self.b, self.c, self.d = a, b, c, d
        self.projective = projective
        if check and self.det() != 1:
            raise ValueError("determinant is not 1")

    @classmethod
    def from_entries(cls, field: NumberField, rows, projective: bool = False) -> "SL2Matrix":
        (a, b), (c, d) = rows
        conv = lambda v: v if isinstance(v, NFElement) else field(v)
        return cls(conv(a), conv(b), conv(c), conv(d), projective)

    @classmethod
    def from_json(cls, field: NumberField, data, projective: bool = False) -> "SL2Matrix":
        (a, b), (c, d) = data
        return cls(*(NFElement.from_json(field, e) for e in (a, b, c, d)), projective=projective)

    def to_json(self) -> list:
        return [[self.a.to_json(), self.b.to_json()], [self.c.to_json(), self.d.to_json()]]

    @classmethod
    def identity(cls, field: NumberField, projective: bool = False) -> "SL2Matrix":
        return cls(field.one, field.zero, field.zero, field.one, projective, check=False)

    @classmethod
    def diag(cls, x: NFElement, projective: bool = False) -> "SL2Matrix":
        return cls(x, x.field.zero, x.field.zero, x.inverse(), projective, check=False)

    @classmethod
    def upper(cls, x: NFElement, projective: bool = False) -> "SL2Matrix":
        return cls(x.field.one, x, x.field.zero, x.field.one, projective, check=False)

    @classmethod
    def lower(cls, y: NFElement, projective: bool = False) -> "SL2Matrix":
        return cls(y.field.one, y.field.zero, y, y.field.one, projective, check=False)

    @property
    def field(self) -> NumberField:
        return self.a.field

    @property
    def entries(self) -> tuple[NFElement, NFElement, NFElement, NFElement]:
        return (self.a, self.b, self.c, self.d)

    def det(self) -> NFElement:
        return self.a * self.d - self.b * self.c

    def trace(self) -> NFElement:
        return self.a + self.d

    def __mul__(self, other: "SL2Matrix") -> "SL2Matrix":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return SL2Matrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.projective, check=False)

    def inverse(self) -> "SL2Matrix":
        return SL2Matrix(self.d, -self.b, -self.c, self.a, self.projective, check=False)

    def __neg__(self) -> "SL2Matrix":
        return SL2Matrix(-self.a, -self.b, -self.c, -self.d, self.projective, check=False)

    def __pow__(self, e: int) -> "SL2Matrix":
        if e < 0:
            return self.inverse() ** (-e)
        result = SL2Matrix.identity(self.field, self.projective)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def conj(self, P: "SL2Matrix") -> "SL2Matrix":
        """P^-1 * self * P."""
        return P.inverse() * self * P

    def lift(self, ext: Extension) -> "SL2Matrix":
        if ext.is_identity:
            return self
        return SL2Matrix(*(ext(x) for x in self.entries), projective=self.projective, check=False)

    def with_projective(self, flag: bool) -> "SL2Matrix":
        return SL2Matrix(*self.entries, projective=flag, check=False)

    def exact_eq(self, other: "SL2Matrix") -> bool:
        return self.entries == other.entries

    def __eq__(self, other) -> bool:
        """Equality in SL, or up to sign when either side is projective."""
        if not isinstance(other, SL2Matrix):
            return NotImplemented
        if self.exact_eq(other):
            return True
        return (self.projective or other.projective) and self.exact_eq(-other)

    def __hash__(self) -> int:
        return hash(frozenset([self.entries, (-self).entries]))

    def is_scalar(self) -> bool:
        return self.b.is_zero() and self.c.is_zero() and self.a == self.d

    def commutes(self, other: "SL2Matrix") -> bool:
        return (self * other).exact_eq(other * self)

    def __repr__(self) -> str:
        return f"SL2Matrix({self.to_json()}{', projective' if self.projective else ''})"


def classify(M: SL2Matrix) -> str:
    if M.is_scalar():
        return IDENTITY_CLASS
    t = M.trace()
    if t * t == 4:
        return PARABOLIC
    return NONPARABOLIC


LOXODROMIC_CYCLIC = "loxodromic_cyclic"
PARABOLIC_CYCLIC = "parabolic_cyclic"
PARABOLIC_RANK2 = "parabolic_rank2"
TRIVIAL = "trivial"
KINDS = (LOXODROMIC_CYCLIC, PARABOLIC_CYCLIC, PARABOLIC_RANK2, TRIVIAL)


@dataclass(frozen=True)
class SubgroupSpec:
    """An abelian subgroup given by generators.

    loxodromic_cyclic: <generator**power>.
    parabolic_cyclic: <generator>, inside the ambient <generator, ambient>.
    parabolic_rank2: <generators[0], generators[1]>.
    """

    kind: str
    generator: SL2Matrix | None = None
    ambient: SL2Matrix | None = None
    generators: tuple[SL2Matrix, ...] = ()
    power: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown subgroup kind {self.kind!r}")

    def validate(self) -> None:
        if self.kind == LOXODROMIC_CYCLIC:
            if classify(self.generator) != NONPARABOLIC:
                raise ValueError("loxodromic generator has trace^2 = 4")
            if self.power < 1:
                raise ValueError("power must be positive")
        elif self.kind in (PARABOLIC_CYCLIC, PARABOLIC_RANK2):
            k1, k2 = self.lattice()
            for k in (k1, k2):
                if classify(k) != PARABOLIC:
                    raise ValueError("parabolic generator must have trace^2 = 4 and not be +-I")
            if not k1.commutes(k2):
                raise ValueError("parabolic lattice generators do not commute")
            fr = parabolic_frame(k1)
            _, tau2 = upper_coordinate(k2.conj(fr.C))
            if (tau2 / fr.tau).is_rational():
                raise ValueError("parabolic lattice translations are rationally dependent")

    @property
    def is_parabolic(self) -> bool:
        return self.kind in (PARABOLIC_CYCLIC, PARABOLIC_RANK2)

    @property
    def is_cyclic(self) -> bool:
        return self.kind in (LOXODROMIC_CYCLIC, PARABOLIC_CYCLIC)

    def gens(self) -> list[SL2Matrix]:
        """Generators of the subgroup itself."""
        if self.kind == LOXODROMIC_CYCLIC:
            return [self.generator**self.power]
        if self.kind == PARABOLIC_CYCLIC:
            return [self.generator]
        return list(self.generators)

    def lattice(self) -> tuple[SL2Matrix, SL2Matrix]:
        if self.kind == PARABOLIC_CYCLIC:
            return self.generator, self.ambient
        if self.kind == PARABOLIC_RANK2:
            return self.generators[0], self.generators[1]
        raise ValueError("not a parabolic subgroup")

    def _map(self, fn) -> "SubgroupSpec":
        return SubgroupSpec(
            self.kind,
            fn(self.generator) if self.generator is not None else None,
            fn(self.ambient) if self.ambient is not None else None,
            tuple(fn(g) for g in self.generators),
            self.power,
        )

    def conj(self, P: SL2Matrix) -> "SubgroupSpec":
        return self._map(lambda M: M.conj(P))

    def lift(self, ext: Extension) -> "SubgroupSpec":
        return self._map(lambda M: M.lift(ext))

    def matrices(self) -> list[SL2Matrix]:
        out = [m for m in (self.generator, self.ambient) if m is not None]
        return out + list(self.generators)

    @classmethod
    def from_json(cls, field: NumberField, data: dict, projective: bool = False) -> "SubgroupSpec":
        kind = data["kind"]
        mat = lambda x: SL2Matrix.from_json(field, x, projective)
        if kind == LOXODROMIC_CYCLIC:
            return cls(kind, generator=mat(data["generator"]), power=int(data.get("power", "1")))
        if kind == PARABOLIC_CYCLIC:
            return cls(kind, generator=mat(data["generator"]), ambient=mat(data["ambient"]))
        if kind == PARABOLIC_RANK2:
            return cls(kind, generators=tuple(mat(x) for x in data["generators"]))
        if kind == TRIVIAL:
            return cls(kind)
        raise ValueError(f"unknown subgroup kind {kind!r}")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == LOXODROMIC_CYCLIC:
            out["generator"] = self.generator.to_json()
            if self.power != 1:
                out["power"] = str(self.power)
        elif self.kind == PARABOLIC_CYCLIC:
            out["generator"] = self.generator.to_json()
            out["ambient"] = self.ambient.to_json()
        elif self.kind == PARABOLIC_RANK2:
            out["generators"] = [g.to_json() for g in self.generators]
        return out


# --------------------------------------------------------------------------
# diagonalization


@dataclass(frozen=True)
class Diagonalization:
    """M (lifted) = P * diag(lam, 1/lam) * P^-1 over ext.field."""

    P: SL2Matrix
    lam: NFElement
    ext: Extension
    handle: EmbeddingHandle


def embedding_above(ext: Extension, handle: EmbeddingHandle) -> EmbeddingHandle:
    """The smallest-index embedding of ext.field restricting to ``handle``."""
    if ext.is_identity:
        return handle
    bits = handle.precision_bits
    base = root_boxes(ext.base, bits)
    with mpmath.workprec(bits):
        for j in range(ext.field.degree):
            val, _ = evaluate(ext.gen_image, EmbeddingHandle(ext.field, j, bits))
            nearest = min(range(len(base)), key=lambda i: abs(base[i].center - val))
            if nearest == handle.root_index:
                return EmbeddingHandle(ext.field, j, bits)
    raise ArithmeticError("no embedding of the extension lies above the given one")


def _eigenvector(M: SL2Matrix, ev: NFElement) -> tuple[NFElement, NFElement]:
    a, b, c, d = M.entries
    if not c.is_zero():
        return ev - d, c
    if not b.is_zero():
        return b, ev - a
    one, zero = ev.field.one, ev.field.zero
    return (one, zero) if ev == a else (zero, one)


def _larger_side(lam: NFElement, h: EmbeddingHandle, cap: int) -> NFElement:
    """lam or 1/lam, whichever has modulus > 1 at h (lam if undecidable)."""
    while True:
        lo, hi = abs_interval(lam, h, cap)
        if lo > 1:
            return lam
        if hi < 1:
            return lam.inverse()
        if h.precision_bits * 2 > cap:
            return lam
        h = h.refined()


def diagonalize(M: SL2Matrix, handle: EmbeddingHandle | None = None, cap: int = DEFAULT_PRECISION_CAP) -> Diagonalization:
    if classify(M) != NONPARABOLIC:
        raise ValueError("only nonparabolic elements are diagonalized")
    K = M.field
    handle = handle or EmbeddingHandle(K)
    t = M.trace()
    adj = adjoin_quadratic_root(K, -t, K.one)
    ext = adj.lift
    L = adj.field
    hL = embedding_above(ext, handle)
    lam = _larger_side(adj.root, hL, cap)
    ML = M.lift(ext)
    v = _eigenvector(ML, lam)
    w = _eigenvector(ML, lam.inverse())
    det = v[0] * w[1] - v[1] * w[0]
    P = SL2Matrix(v[0], w[0] / det, v[1], w[1] / det, M.projective)
    if not ML.conj(P).exact_eq(SL2Matrix.diag(lam, M.projective)):
        raise ArithmeticError("diagonalization failed to reassemble")
    return Diagonalization(P, lam, ext, hL)


@dataclass(frozen=True)
class ParabolicFrame:
    """C^-1 * M * C = eps * (1 tau; 0 1)."""

    C: SL2Matrix
    eps: int
    tau: NFElement


def parabolic_frame(M: SL2Matrix) -> ParabolicFrame:
    if classify(M) != PARABOLIC:
        raise ValueError("parabolic_frame needs a parabolic element")
    K = M.field
    eps = 1 if M.trace() == 2 else -1
    a, b, c, d = M.entries
    if c.is_zero():
        C = SL2Matrix.identity(K, M.projective)
    else:
        C = SL2Matrix(eps - d, -c.inverse(), c, K.zero, M.projective)
    N = M.conj(C)
    assert N.c.is_zero() and N.a == eps and N.d == eps
    return ParabolicFrame(C, eps, N.b * eps)


def frame_of(spec: SubgroupSpec) -> ParabolicFrame:
    return parabolic_frame(spec.lattice()[0])


def upper_coordinate(M: SL2Matrix) -> tuple[int, NFElement]:
    """(eps, x) with M = eps * (1 x; 0 1); M must be upper unipotent up to sign."""
    eps = 1 if M.a == 1 else -1
    return eps, M.b * eps


# --------------------------------------------------------------------------
# normalization


@dataclass
class NormalizedProblem:
    """Transformed data with conjugator^-1 * original * conjugator = transformed."""

    conjugator: SL2Matrix
    H: SubgroupSpec
    K: SubgroupSpec
    gamma: SL2Matrix
    ext: Extension
    data: dict = dfield(default_factory=dict)


def normalize_case(
    H: SubgroupSpec,
    K: SubgroupSpec,
    gamma: SL2Matrix,
    which: int,
    handle: EmbeddingHandle | None = None,
    cap: int = DEFAULT_PRECISION_CAP,
) -> NormalizedProblem:
    field = gamma.field
    handle = handle or EmbeddingHandle(field)
    if which == 1:
        dh = diagonalize(H.gens()[0], handle, cap)
        kL = K.gens()[0].lift(dh.ext)
        dk = diagonalize(kL, dh.handle, cap)
        ext = dh.ext.then(dk.ext)
        P = dh.P.lift(dk.ext)
        lam = dk.ext(dh.lam)
        M = P.inverse() * dk.P
        if any(x.is_zero() for x in M.entries):
            raise SharedFixedPoint("H and K share a fixed point")
        return NormalizedProblem(
            P,
            H.lift(ext).conj(P),
            K.lift(ext).conj(P),
            gamma.lift(ext).conj(P),
            ext,
            {"lam": lam, "omega": dk.lam, "M": M, "Q": dk.P, "handle": dk.handle},
        )
    if which == 4:
        fr = frame_of(K)
        k1, k2 = (m.conj(fr.C) for m in K.lattice())
        e2, tau2 = upper_coordinate(k2)
        if not k2.c.is_zero() or not (k2.a == e2 and k2.d == e2):
            raise ValueError("ambient parabolic does not share the fixed point")
        return NormalizedProblem(
            fr.C,
            H.conj(fr.C),
            K.conj(fr.C),
            gamma.conj(fr.C),
            Extension.identity(field),
            {"tau1": fr.tau, "tau2": tau2, "eps1": fr.eps, "eps2": e2, "beta": tau2 / fr.tau},
        )
    if which == 5:
        fr = frame_of(H)
        h1, h2 = (m.conj(fr.C) for m in H.lattice())
        eh2, tauh2 = upper_coordinate(h2)
        kk = K.lattice()[0].conj(fr.C)
        if kk.c.is_zero():
            raise SharedFixedPoint("H and K fix a common point")
        eps = 1 if kk.trace() == 2 else -1
        xi = (eps - kk.d) / kk.c
        Z = SL2Matrix.upper(xi, gamma.projective)
        C = fr.C * Z
        k1, k2 = (m.conj(C) for m in K.lattice())
        data = {"tau1": fr.tau, "tau2": tauh2, "eps_h": (fr.eps, eh2), "z": xi}
        ek = []
        sig = []
        for k in (k1, k2):
            if not k.b.is_zero() or not (k.a == k.d) or not (k.a == 1 or k.a == -1):
                raise ArithmeticError("K failed to normalize to lower unipotent form")
            e = 1 if k.a == 1 else -1
            ek.append(e)
            sig.append(k.c * e)
        data.update({"sigma1": sig[0], "sigma2": sig[1], "eps_k": tuple(ek)})
        data["beta1"] = tauh2 / fr.tau
        data["beta2"] = sig[1] / sig[0]
        return NormalizedProblem(C, H.conj(C), K.conj(C), gamma.conj(C), Extension.identity(field), data)
    raise ValueError(f"no normalization for case {which}")
