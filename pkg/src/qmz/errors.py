"""Exception hierarchy shared by all qmz modules."""

from __future__ import annotations


class QMZError(Exception):
    """Base class for every error raised by qmz."""


class DomainError(QMZError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class BudgetError(QMZError, RuntimeError):
    """A truncated sum did not reach its tolerance within the allowed terms."""


class SingularCoefficientError(QMZError, ZeroDivisionError):
    """A pole factor q^{-(t+i)} - 1 vanished (or nearly) while building a coefficient."""

    def __init__(self, index: int, t: complex, magnitude: float):
        self.index = index
        self.t = t
        self.magnitude = magnitude
        super().__init__(
            f"pole factor q_{index}(t) is singular at t={t!r} (|q_{index}|={magnitude:.3e})"
        )


class PoleProximityError(QMZError, ValueError):
    """Evaluation point lies on (or within tolerance of) a pole hyperplane."""

    def __init__(self, hyperplanes, point):
        self.hyperplanes = list(hyperplanes)
        self.point = tuple(point)
        names = ", ".join(f"H(j={h.j}, k={h.k}, m={h.lattice_m})" for h in self.hyperplanes)
        super().__init__(f"point {self.point} is on the pole locus: {names}")
