"""Separation certificates: canonical JSON and an independent verifier.

The verifier reads the raw problem dictionary itself and relies only on the
exact arithmetic layer and the finite field kernels. Nothing from the search
side (number fields, residue maps, separation engines) is imported here.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import kernels
from .algebra import MalformedRational, PolyFp, PolyQ, discriminant, factor_mod_p, is_irreducible_mod_p, parse_rational
from .ntheory import is_prime

VERSION = 1
CLAIMS = ("not_in_double_coset", "not_in_subgroup", "not_conjugate_into")


class CertificateError(ValueError):
    pass


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def problem_digest(problem: dict) -> str:
    return hashlib.sha256(canonical_json(problem).encode()).hexdigest()


@dataclass(frozen=True)
class SeparationCertificate:
    claim: str
    problem_digest: str
    residue_rings: tuple[tuple[int, tuple[int, ...]], ...]
    auxiliary: tuple[tuple[str, str], ...] = ()
    notes: tuple[str, ...] = ()
    version: int = VERSION

    @property
    def primes(self) -> list[int]:
        return sorted({p for p, _ in self.residue_rings})

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "claim": self.claim,
            "problem_digest": self.problem_digest,
            "primes": self.primes,
            "residue_rings": [{"p": p, "factor": [str(c) for c in fac]} for p, fac in self.residue_rings],
            "auxiliary": dict(self.auxiliary),
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SeparationCertificate":
        if not isinstance(data, dict):
            raise CertificateError("certificate must be a JSON object")
        version = data.get("version")
        if version != VERSION:
            raise CertificateError(f"unsupported certificate version {version!r}")
        claim = data.get("claim")
        if claim not in CLAIMS:
            raise CertificateError(f"unknown claim {claim!r}")
        rings = []
        try:
            for ring in data.get("residue_rings", []):
                p = ring["p"]
                if isinstance(p, str):
                    p = _int_string(p)
                if isinstance(p, bool) or not isinstance(p, int):
                    raise CertificateError(f"prime must be an integer, got {p!r}")
                coeffs = tuple(_int_string(c) for c in ring["factor"])
                rings.append((p, coeffs))
            digest = str(data["problem_digest"])
        except (KeyError, TypeError, MalformedRational) as exc:
            raise CertificateError(f"malformed certificate: {exc}") from None
        if not rings:
            raise CertificateError("certificate lists no residue rings")
        cert = cls(
            claim=claim,
            problem_digest=digest,
            residue_rings=tuple(rings),
            auxiliary=tuple(sorted((str(k), str(v)) for k, v in data.get("auxiliary", {}).items())),
            notes=tuple(str(n) for n in data.get("notes", [])),
        )
        if "primes" in data and list(data["primes"]) != cert.primes:
            raise CertificateError("primes field disagrees with residue_rings")
        return cert


def _int_string(s) -> int:
    x = parse_rational(s)
    if x.denominator != 1:
        raise MalformedRational(f"expected an integer, got {s!r}")
    return x.numerator


def serialize(cert: SeparationCertificate) -> bytes:
    return (canonical_json(cert.to_json()) + "\n").encode()


def parse(raw: bytes | str) -> SeparationCertificate:
    if isinstance(raw, bytes):
        raw = raw.decode()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CertificateError(f"malformed JSON: {exc}") from None
    return SeparationCertificate.from_json(data)


@dataclass
class VerificationReport:
    accepted: bool
    group_order: int = 0
    enumerated: dict = field(default_factory=dict)
    failure_reason: str | None = None

    def to_json(self) -> dict:
        out = {"accepted": self.accepted, "group_order": self.group_order, "enumerated": self.enumerated}
        if self.failure_reason:
            out["failure_reason"] = self.failure_reason
        return out


# --------------------------------------------------------------------------
# raw problem reading


def _matrices_of_spec(spec: dict) -> tuple[list, list]:
    """(subgroup generators, every matrix mentioned) as raw JSON."""
    kind = spec["kind"]
    if kind == "loxodromic_cyclic":
        return [("pow", spec["generator"], int(spec.get("power", "1")))], [spec["generator"]]
    if kind == "parabolic_cyclic":
        return [("pow", spec["generator"], 1)], [spec["generator"], spec["ambient"]]
    if kind == "parabolic_rank2":
        return [("pow", m, 1) for m in spec["generators"]], list(spec["generators"])
    if kind == "trivial":
        return [], []
    raise CertificateError(f"unknown subgroup kind {kind!r}")


def _all_matrices(problem: dict) -> list:
    out = []
    for spec in problem.get("subgroups", {}).values():
        out += _matrices_of_spec(spec)[1]
    for key in ("g", "gamma"):
        if key in problem:
            out.append(problem[key])
    return out


class _Ring:
    """F_p[T]/(factor) with the reduction of problem entries."""

    def __init__(self, p: int, factor: tuple[int, ...], fpoly: PolyQ):
        self.p = p
        self.factor = PolyFp(p, factor)
        self.tables = kernels.fq_tables(p, tuple(self.factor.coeffs))
        self.fpoly = fpoly

    @property
    def q(self) -> int:
        return self.tables.q

    def reduce_entry(self, coeffs: list[str]) -> int:
        vals = []
        for s in coeffs:
            x = parse_rational(s)
            vals.append(x.numerator * pow(x.denominator, -1, self.p))
        r = PolyFp(self.p, vals) % self.factor
        return self.tables.encode(r.coeffs)

    def reduce_matrix(self, m) -> list[int]:
        (a, b), (c, d) = m
        return [self.reduce_entry(e) for e in (a, b, c, d)]


def _check_ring(p: int, factor: tuple[int, ...], fpoly: PolyQ, bad: int) -> str | None:
    if not is_prime(p):
        return f"{p} is not prime"
    if bad % p == 0:
        return f"bad prime {p}: divides the discriminant or a tracked or entry denominator"
    fac = PolyFp(p, factor)
    if tuple(fac.coeffs) != tuple(c % p for c in factor) or fac.lc != 1:
        return f"factor {list(factor)} is not reduced and monic mod {p}"
    if not is_irreducible_mod_p(fac):
        return f"factor {list(factor)} is reducible mod {p}"
    fbar = PolyFp.from_polyq(fpoly, p)
    if not (fbar % fac).is_zero():
        return f"factor {list(factor)} does not divide the minimal polynomial mod {p}"
    if fac.degree < 1:
        return "factor has degree 0"
    return None


def _bad_integer(problem: dict, fpoly: PolyQ) -> int:
    disc = discriminant(fpoly)
    bad = abs(disc.numerator) * disc.denominator * fpoly.denominator_lcm()
    for t in problem.get("tracked", []):
        x = parse_rational(t)
        bad *= abs(x.numerator) * x.denominator if x else 1
    for m in _all_matrices(problem):
        for row in m:
            for e in row:
                for s in e:
                    bad *= parse_rational(s).denominator
    return bad


def _sl2_order(q: int, projective: bool) -> int:
    n = q * (q * q - 1)
    return n // 2 if projective and q % 2 else n


# --------------------------------------------------------------------------
# product-ring path (pure Python tuples)


def _mul_single(T, A, B):
    r = kernels.matmul(np.array([A]), np.array([B]), T, backend="numpy")[0]
    return tuple(int(x) for x in r)


def _neg_single(T, A):
    return tuple(int(x) for x in kernels._np_neg(np.array(A, np.int64), T.p, T.d))


def _canon(rings, elem, projective):
    if not projective:
        return elem
    neg = tuple(_neg_single(r.tables, e) for r, e in zip(rings, elem))
    return min(elem, neg)


def _tuple_closure(rings, gens, projective, cap):
    ident = tuple((1, 0, 0, 1) for _ in rings)
    seen = {_canon(rings, ident, projective)}
    frontier = [ident]
    elems = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(_mul_single(r.tables, a, b) for r, a, b in zip(rings, x, g))
                key = _canon(rings, y, projective)
                if key not in seen:
                    seen.add(key)
                    nxt.append(y)
                    elems.append(y)
                    if len(elems) > cap:
                        raise kernels.EnumerationCapExceeded(f"subgroup image exceeds {cap} elements")
        frontier = nxt
    return elems


def _tuple_trace(r, A):
    return int(kernels._np_add(np.array([A[0]]), np.array([A[3]]), r.p, r.tables.d)[0])


# --------------------------------------------------------------------------
# verify


def _expand_gens(rings, gens_raw, cap_pow=10**6):
    out = []
    for _, m, power in gens_raw:
        base = tuple(tuple(r.reduce_matrix(m)) for r in rings)
        acc = tuple((1, 0, 0, 1) for _ in rings)
        for _ in range(power):
            acc = tuple(_mul_single(r.tables, a, b) for r, a, b in zip(rings, acc, base))
        out.append(acc)
    return out


def verify(problem: dict, cert: SeparationCertificate, cap: int = 10**6, backend: str | None = None) -> VerificationReport:
    """Decide the certificate's claim by enumerating finite images."""
    if cert.version != VERSION:
        return VerificationReport(False, failure_reason=f"unsupported version {cert.version}")
    if cert.problem_digest != problem_digest(problem):
        return VerificationReport(False, failure_reason="digest mismatch: certificate is for a different problem")
    try:
        fpoly = PolyQ.from_strings(problem["field"]["min_poly"])
        projective = bool(problem.get("projective", False))
        bad = _bad_integer(problem, fpoly)
    except (KeyError, TypeError, ValueError) as exc:
        return VerificationReport(False, failure_reason=f"malformed problem: {exc}")
    if fpoly.lc != 1:
        return VerificationReport(False, failure_reason="minimal polynomial is not monic")
    rings = []
    for p, fac in cert.residue_rings:
        why = _check_ring(p, fac, fpoly, bad)
        if why:
            return VerificationReport(False, failure_reason=why)
        try:
            rings.append(_Ring(p, fac, fpoly))
        except ValueError as exc:
            return VerificationReport(False, failure_reason=str(exc))
    order = 1
    for r in rings:
        order *= _sl2_order(r.q, projective)
    subs = problem.get("subgroups", {})
    ident_raw = [[["1"] + ["0"] * (fpoly.degree - 1), ["0"] * fpoly.degree], [["0"] * fpoly.degree, ["1"] + ["0"] * (fpoly.degree - 1)]]
    gamma_raw = problem["gamma"]
    g_raw = problem.get("g", ident_raw)
    needs = ("H", "K") if cert.claim == "not_in_double_coset" else ("H",)
    missing = [k for k in needs if k not in subs]
    if missing:
        return VerificationReport(False, order, failure_reason=f"problem lacks subgroup {', '.join(missing)} for claim {cert.claim}")
    if cert.claim == "not_in_double_coset":
        H_raw, K_raw = subs["H"], subs["K"]
    elif cert.claim == "not_in_subgroup":
        H_raw, K_raw = subs["H"], {"kind": "trivial"}
        g_raw = ident_raw
    else:
        H_raw, K_raw = subs["H"], None
    try:
        if len(rings) == 1:
            return _verify_single(rings[0], cert.claim, H_raw, K_raw, g_raw, gamma_raw, projective, order, cap, backend)
        return _verify_product(rings, cert.claim, H_raw, K_raw, g_raw, gamma_raw, projective, order, cap)
    except kernels.EnumerationCapExceeded as exc:
        return VerificationReport(False, order, failure_reason=f"group too large: {exc}")


def _verify_single(r, claim, H_raw, K_raw, g_raw, gamma_raw, projective, order, cap, backend):
    T = r.tables
    Hg = [list(x[0]) for x in _expand_gens([r], _matrices_of_spec(H_raw)[0])]
    Hs = kernels.closure(np.array(Hg, np.int64).reshape(-1, 4), T, projective, cap, backend)
    gamma = np.array([r.reduce_matrix(gamma_raw)], np.int64)
    enumerated = {"H": int(len(Hs))}
    if claim == "not_conjugate_into":
        tr = lambda A: kernels._np_add(A[:, 0], A[:, 3], T.p, T.d)
        tsq = lambda t: kernels._np_mul(t, t, T.log, T.exp)
        four = T.encode([4 % T.p])
        all_par = bool(np.all(tsq(tr(Hs)) == four))
        gtr = int(tsq(tr(gamma))[0])
        enumerated["trace_scan"] = int(len(Hs))
        if not all_par:
            return VerificationReport(False, order, enumerated, "subgroup image contains elements with trace^2 != 4")
        if gtr == four:
            return VerificationReport(False, order, enumerated, "image of gamma has trace^2 = 4")
        return VerificationReport(True, order, enumerated)
    Kg = [list(x[0]) for x in _expand_gens([r], _matrices_of_spec(K_raw)[0])]
    Ks = kernels.closure(np.array(Kg, np.int64).reshape(-1, 4), T, projective, cap, backend)
    g = np.array([r.reduce_matrix(g_raw)], np.int64)
    enumerated["K"] = int(len(Ks))
    if len(Hs) * len(Ks) > cap:
        return VerificationReport(False, order, enumerated, f"product set of {len(Hs) * len(Ks)} exceeds cap {cap}")
    found, n = kernels.find_product(Hs, g, Ks, gamma, T, projective, backend)
    enumerated["products"] = n
    if found:
        return VerificationReport(False, order, enumerated, "image of gamma lies in the image of the set")
    enumerated["product_set"] = kernels.product_set_size(Hs, g, Ks, T, projective, backend)
    return VerificationReport(True, order, enumerated)


def _verify_product(rings, claim, H_raw, K_raw, g_raw, gamma_raw, projective, order, cap):
    Hs = _tuple_closure(rings, _expand_gens(rings, _matrices_of_spec(H_raw)[0]), projective, cap)
    gamma = tuple(tuple(r.reduce_matrix(gamma_raw)) for r in rings)
    enumerated = {"H": len(Hs)}
    if claim == "not_conjugate_into":
        def parabolic(x):
            return all(
                (lambda t: kernels._np_mul(np.array([t]), np.array([t]), r.tables.log, r.tables.exp)[0])(_tuple_trace(r, a))
                == r.tables.encode([4 % r.p])
                for r, a in zip(rings, x)
            )
        enumerated["trace_scan"] = len(Hs)
        if not all(parabolic(h) for h in Hs):
            return VerificationReport(False, order, enumerated, "subgroup image contains elements with trace^2 != 4")
        if parabolic(gamma):
            return VerificationReport(False, order, enumerated, "image of gamma has trace^2 = 4")
        return VerificationReport(True, order, enumerated)
    Ks = _tuple_closure(rings, _expand_gens(rings, _matrices_of_spec(K_raw)[0]), projective, cap)
    g = tuple(tuple(r.reduce_matrix(g_raw)) for r in rings)
    enumerated["K"] = len(Ks)
    if len(Hs) * len(Ks) > cap:
        return VerificationReport(False, order, enumerated, f"product set of {len(Hs) * len(Ks)} exceeds cap {cap}")
    target = _canon(rings, gamma, projective)
    products = set()
    for h in Hs:
        hg = tuple(_mul_single(r.tables, a, b) for r, a, b in zip(rings, h, g))
        for k in Ks:
            y = _canon(rings, tuple(_mul_single(r.tables, a, b) for r, a, b in zip(rings, hg, k)), projective)
            if y == target:
                enumerated["products"] = len(products) + 1
                return VerificationReport(False, order, enumerated, "image of gamma lies in the image of the set")
            products.add(y)
    enumerated["products"] = len(Hs) * len(Ks)
    enumerated["product_set"] = len(products)
    return VerificationReport(True, order, enumerated)


def subgroup_closure(generators, p: int, factor, projective: bool = False, cap: int = 10**6, backend: str | None = None) -> np.ndarray:
    """Group generated by matrices over F_p[T]/(factor), rows of encoded entries."""
    T = kernels.fq_tables(p, tuple(PolyFp(p, factor).coeffs))
    gens = np.array(generators, np.int64).reshape(-1, 4) if len(generators) else np.zeros((0, 4), np.int64)
    return kernels.closure(gens, T, projective, cap, backend)
