"""Congruence certificates for separation problems in SL(2) and PSL(2) over number fields."""

from .budget import SearchBudget
from .certificate import SeparationCertificate, VerificationReport, parse, serialize, verify
from .doublecoset import (
    Outcome,
    distinguish_conjugacy,
    membership_probe,
    separate_double_coset,
    separate_subgroup,
)
from .mobius import SL2Matrix, SubgroupSpec, classify
from .numfield import NumberField, NFElement
from .problem import Problem, ProblemError

__version__ = "0.1.0"

__all__ = [
    "NFElement", "NumberField", "Outcome", "Problem", "ProblemError", "SL2Matrix", "SearchBudget",
    "SeparationCertificate", "SubgroupSpec", "VerificationReport", "classify", "distinguish_conjugacy",
    "membership_probe", "parse", "separate_double_coset", "separate_subgroup", "serialize", "verify",
]
