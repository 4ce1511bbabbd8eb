from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

__all__ = ["ConstantEstimate"]

LOWER_BOUND_NOTE = "empirical supremum: a lower bound on the true constant"


@dataclass(frozen=True)
class ConstantEstimate:
    """Empirical extremum of a constant together with the input attaining it.

    ``witness`` maps argument names to the values that produced ``value``;
    ``skipped`` counts trials dropped by the denominator floor.
    """

    name: str
    value: float
    witness: dict[str, Any] = field(default_factory=dict)
    trials: int = 0
    skipped: int = 0
    note: str = LOWER_BOUND_NOTE

    @property
    def finite(self) -> bool:
        return self.value == self.value and abs(self.value) != float("inf")
