"""Exceptions raised by the search side of the package."""

from __future__ import annotations


class DcsepError(Exception):
    pass


class FieldMismatch(DcsepError, ValueError):
    pass


class Indeterminate(DcsepError):
    """Numerical refinement hit the precision cap without deciding."""


class UnsupportedEigenvalue(DcsepError):
    """|sigma(lambda)| could not be separated from 1 within the precision cap."""


class NotPIntegral(DcsepError, ValueError):
    pass


class RamifiedPrime(DcsepError, ValueError):
    pass


class BudgetExhausted(DcsepError):
    def __init__(self, what: str = "search", last_prime: int | None = None):
        super().__init__(f"{what}: budget exhausted" + (f" (last prime {last_prime})" if last_prime else ""))
        self.what = what
        self.last_prime = last_prime


class RootOfUnity(DcsepError, ValueError):
    def __init__(self, order: int):
        super().__init__(f"element is a root of unity of order {order}")
        self.order = order


class NotSeparable(DcsepError):
    """lambda is an exact power of omega; ``witness`` is the exponent."""

    def __init__(self, witness: int):
        super().__init__(f"lambda = omega^{witness}")
        self.witness = witness


class NotApplicable(DcsepError, ValueError):
    pass


class LatticeMembership(DcsepError):
    """b = m + n*beta with integers m, n."""

    def __init__(self, m: int, n: int):
        super().__init__(f"b = {m} + {n}*beta")
        self.m = m
        self.n = n


class SharedFixedPoint(DcsepError):
    pass


class UnsupportedInput(DcsepError, ValueError):
    pass
