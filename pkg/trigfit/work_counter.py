"""Element-visit counter for comparing the work done by the frequency estimators."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class WorkCounter:
    """Tally of signal elements visited by an estimation stage."""
    count: int = 0

    def add(self, n: int) -> None:
        self.count += int(n)
