"""Problem files: schema validation and conversion to typed objects."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import jsonschema

from .algebra import parse_rational
from .certificate import problem_digest
from .mobius import SL2Matrix, SubgroupSpec
from .numfield import EmbeddingHandle, Extension, NumberField
from .residue import TrackedRing


class ProblemError(ValueError):
    pass


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    return json.loads(resources.files("dcsep").joinpath("schemas", f"{name}.schema.json").read_text())


def validate(data: dict, name: str = "problem") -> None:
    try:
        jsonschema.validate(data, schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ProblemError(f"{name} schema violation at {where}: {exc.message}") from None


@dataclass
class Problem:
    field: NumberField
    projective: bool
    handle: EmbeddingHandle
    H: SubgroupSpec | None
    K: SubgroupSpec | None
    g: SL2Matrix
    gamma: SL2Matrix
    tracked: tuple[Fraction, ...]
    raw: dict

    @property
    def digest(self) -> str:
        return problem_digest(self.raw)

    @classmethod
    def from_json(cls, data: dict) -> "Problem":
        validate(data)
        try:
            field = NumberField.from_json(data["field"])
        except ValueError as exc:
            raise ProblemError(f"bad field: {exc}") from None
        proj = bool(data.get("projective", False))
        idx = data.get("embedding", {}).get("root_index", 0)
        if idx >= field.degree:
            raise ProblemError(f"root_index {idx} exceeds field degree {field.degree}")
        try:
            mat = lambda m: SL2Matrix.from_json(field, m, proj)
            subs = data.get("subgroups", {})
            H = SubgroupSpec.from_json(field, subs["H"], proj) if "H" in subs else None
            K = SubgroupSpec.from_json(field, subs["K"], proj) if "K" in subs else None
            for spec in (H, K):
                if spec is not None:
                    spec.validate()
            g = mat(data["g"]) if "g" in data else SL2Matrix.identity(field, proj)
            gamma = mat(data["gamma"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ProblemError(str(exc)) from None
        tracked = tuple(parse_rational(t) for t in data.get("tracked", []))
        if any(t == 0 for t in tracked):
            raise ProblemError("tracked denominators must be nonzero")
        return cls(field, proj, EmbeddingHandle(field, idx), H, K, g, gamma, tracked, data)

    @classmethod
    def load(cls, path) -> "Problem":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ProblemError(f"malformed JSON: {exc}") from None
        return cls.from_json(data)

    def matrices(self) -> list[SL2Matrix]:
        out = [self.g, self.gamma]
        for spec in (self.H, self.K):
            if spec is not None:
                out += spec.matrices()
        return out

    def ring(self) -> TrackedRing:
        gens = []
        for M in self.matrices():
            gens += [x for x in M.entries if not x.is_rational() or x.as_rational().denominator != 1]
        for t in self.tracked:
            gens += [self.field(1 / t), self.field(t)]
        return TrackedRing(self.field, tuple(gens))


def lift_ring(R: TrackedRing, ext: Extension) -> TrackedRing:
    """R pushed into ext.field; primes bad for the base field stay excluded."""
    if ext.is_identity:
        return R
    L = ext.field
    gens = tuple(ext(x) for x in R.generators) + (L(Fraction(1, R.bad_integer)),)
    return TrackedRing(L, gens, tuple(ext(x) for x in R.must_be_unit))
