from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class SearchBudget:
    """Bounds that turn existence statements into terminating searches."""

    max_prime: int = 100_000
    max_exponent: int = 64
    max_prime_pairs: int = 200
    precision_cap: int = 4096
    enumeration_cap: int = 1_000_000

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"budget field {name} must be a positive integer, got {value!r}")
