"""
Shared report model.

Checkers across the library (alpha calculus, threshold checks, minimizer
checks, continuity probes) return a `CheckReport` rather than raising, so
batch runs can collect every verdict.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict

logger = logging.getLogger(__name__)


@dataclass
class CheckReport:
    name: str
    passed: bool
    max_violation: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def log(self) -> "CheckReport":
        if self.passed:
            logger.info(f"{self.name}: pass (max violation {self.max_violation:.3g})")
        else:
            logger.warning(f"{self.name}: FAIL (max violation {self.max_violation:.3g})")
        return self

    def __bool__(self) -> bool:
        return self.passed
