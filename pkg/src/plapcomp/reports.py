"""Uniform result carrier for inequality checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

HOLDS = "holds"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"
ERROR = "error"

MIN_BAND = 1e-8


def tolerance_band(*bracket_widths: float) -> float:
    """max(1e-8, 100 * widest eigenvalue bracket)."""
    widths = [w for w in bracket_widths if w is not None and math.isfinite(w)]
    return max([MIN_BAND] + [100.0 * w for w in widths])


@dataclass
class BoundReport:
    """lhs, rhs and slack of one inequality; ``slack >= -band`` means it holds.

    ``inputs`` echoes the parameters the check ran with (including measured
    curvature norms) and ``details`` carries the intermediate quantities.
    """

    check: str
    lhs: float
    rhs: float
    slack: float
    inputs: dict
    band: float = MIN_BAND
    report_only: bool = False
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.report_only:
            return INCONCLUSIVE
        if not math.isfinite(self.slack):
            return INCONCLUSIVE
        return HOLDS if self.slack >= -self.band else VIOLATED

    @property
    def measured_norm(self) -> float:
        return self.inputs.get("measured_norm", math.nan)
