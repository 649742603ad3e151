"""Scalar kernel: the deformation parameter, argument vectors, q-brackets,
real-base complex powers, rising factorials and pole factors.

Everything here is a pure function of its inputs. Complex numbers are plain
Python ``complex`` (binary64 components).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import DomainError

Number = Union[int, float, complex]


@dataclass(frozen=True)
class QParam:
    """The deformation parameter ``0 < q < 1`` together with ``log q``."""

    q: float
    log_q: float = 0.0

    def __post_init__(self):
        q = self.q
        if isinstance(q, bool) or not isinstance(q, (int, float)):
            raise DomainError(f"q must be a real number, got {q!r}")
        q = float(q)
        if not math.isfinite(q) or not 0.0 < q < 1.0:
            raise DomainError(f"q must satisfy 0 < q < 1, got {q!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "log_q", math.log(q))

    @property
    def period(self) -> float:
        """Imaginary period ``2*pi/|log q|`` of ``q^s``."""
        return 2.0 * math.pi / abs(self.log_q)

    def __float__(self) -> float:
        return self.q


def as_qparam(q: Union[QParam, float]) -> QParam:
    return q if isinstance(q, QParam) else QParam(q)


def as_complex(z: Number) -> complex:
    """Convert to ``complex``, rejecting NaN and infinities."""
    if isinstance(z, bool):
        raise DomainError(f"not a number: {z!r}")
    try:
        w = complex(z)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"not a number: {z!r}") from exc
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError(f"non-finite value: {z!r}")
    return w


@dataclass(frozen=True)
class ArgVector:
    """Ordered tuple ``(s_1, ..., s_r)`` of complex arguments, ``r >= 1``."""

    args: tuple

    def __post_init__(self):
        vals = tuple(as_complex(a) for a in self.args)
        if not vals:
            raise DomainError("an argument vector needs depth >= 1")
        object.__setattr__(self, "args", vals)

    @classmethod
    def of(cls, *args: Number) -> "ArgVector":
        return cls(tuple(args))

    @property
    def depth(self) -> int:
        return len(self.args)

    def __len__(self) -> int:
        return len(self.args)

    def __iter__(self):
        return iter(self.args)

    def __getitem__(self, i):
        return self.args[i]

    def partial_sum(self, j: int) -> complex:
        """``s_1 + ... + s_j`` for ``1 <= j <= r``."""
        if not 1 <= j <= len(self.args):
            raise IndexError(f"partial sum index {j} out of range 1..{len(self.args)}")
        return sum(self.args[:j], 0j)

    def partial_sums(self) -> list:
        out, acc = [], 0j
        for a in self.args:
            acc += a
            out.append(acc)
        return out


def as_args(s: Union[ArgVector, Number, Iterable[Number]]) -> ArgVector:
    if isinstance(s, ArgVector):
        return s
    if isinstance(s, (int, float, complex)) and not isinstance(s, bool):
        return ArgVector((s,))
    return ArgVector(tuple(s))


def q_bracket(k: int, q: Union[QParam, float]) -> float:
    """The q-integer ``[k] = (1 - q^k)/(1 - q) = 1 + q + ... + q^{k-1}``."""
    qp = as_qparam(q)
    if int(k) != k or k < 1:
        raise DomainError(f"q_bracket needs a positive integer, got {k!r}")
    return -math.expm1(k * qp.log_q) / -math.expm1(qp.log_q)


def log_q_bracket(k: int, q: QParam) -> float:
    """``log [k]`` without cancellation for q close to 1."""
    return math.log(-math.expm1(k * q.log_q)) - math.log(-math.expm1(q.log_q))


def cpow_real_base(b: float, s: Number) -> complex:
    """``b**s = exp(s log b)`` for a positive real base (no branch cut)."""
    if isinstance(b, complex) or not b > 0:
        raise DomainError(f"base must be a positive real, got {b!r}")
    s = as_complex(s)
    if s.imag == 0.0:
        return complex(float(b) ** s.real)
    return cmath.exp(s * math.log(b))


def rising_factorial(s: Number, k: int) -> complex:
    """Pochhammer symbol ``s (s+1) ... (s+k-1)``; ``k = 0`` gives 1."""
    if int(k) != k or k < 0:
        raise DomainError(f"rising_factorial needs k >= 0, got {k!r}")
    s = complex(s)
    out = 1 + 0j
    for j in range(int(k)):
        out *= s + j
    return out


def rising_over_factorial(s: Number, k: int) -> complex:
    """``(s)_k / k!`` accumulated factor by factor (no overflow for large k)."""
    s = complex(s)
    out = 1 + 0j
    for j in range(int(k)):
        out *= (s + j) / (j + 1)
    return out


def q_pole_factor(t: Number, i: int, q: Union[QParam, float]) -> complex:
    """``q_i(t) = q^{-(t+i)} - 1``; zero exactly on ``t + i in (2 pi i / log q) Z``."""
    qp = as_qparam(q)
    w = -(complex(t) + i) * qp.log_q
    if w.imag == 0.0:
        return complex(math.expm1(w.real))
    return cmath.exp(w) - 1.0


def nearest_lattice_point(z: complex, q: QParam, max_shift: int | None = None) -> tuple:
    """Closest point of ``Z_{<=0} + (2 pi i/log q) Z`` to ``z``.

    Returns ``(k, m, distance)`` with the lattice point ``-k + m * 2 pi i / log q``.
    ``max_shift`` optionally caps ``k`` (``k >= 0`` always).
    """
    z = complex(z)
    k = max(0, int(round(-z.real)))
    if max_shift is not None:
        k = min(k, max_shift)
    step = 2.0 * math.pi / q.log_q
    m = int(round(z.imag / step))
    point = complex(-k, m * step)
    return k, m, abs(z - point)


class CompensatedSum:
    """Running Neumaier sum for complex values, real and imaginary parts kept apart."""

    __slots__ = ("_re", "_ire", "_im", "_iim")

    def __init__(self):
        self._re = self._ire = self._im = self._iim = 0.0

    @staticmethod
    def _step(total: float, comp: float, x: float):
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        return t, comp

    def add(self, z: complex) -> None:
        self._re, self._ire = self._step(self._re, self._ire, z.real)
        self._im, self._iim = self._step(self._im, self._iim, z.imag)

    @property
    def value(self) -> complex:
        return complex(self._re + self._ire, self._im + self._iim)
