"""Explicit operation counting for the numerical kernels.

Multiplications and additions are tallied separately; ``total`` is their sum.
Kernels accept an optional counter and record the work of every vectorised
step they perform, so an inner product of two length-``m`` vectors is
recorded as ``m`` multiplications and ``m - 1`` additions.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class FlopCounter:
    mul: int = 0
    add: int = 0

    def count(self, mul: int = 0, add: int = 0) -> None:
        self.mul += int(mul)
        self.add += int(add)

    def dot(self, m: int, times: int = 1) -> None:
        """Record ``times`` inner products of length ``m``."""
        if m > 0:
            self.mul += m * times
            self.add += (m - 1) * times

    def matvec(self, rows: int, cols: int) -> None:
        self.dot(cols, rows)

    def axpy(self, m: int, times: int = 1) -> None:
        """Record ``times`` updates ``y += a * x`` of length ``m``."""
        self.mul += m * times
        self.add += m * times

    @property
    def total(self) -> int:
        return self.mul + self.add

    def reset(self) -> None:
        self.mul = 0
        self.add = 0


def ensure(counter: FlopCounter | None) -> FlopCounter:
    """Return ``counter`` or a throwaway one, so kernels never branch on None."""
    return counter if counter is not None else FlopCounter()
