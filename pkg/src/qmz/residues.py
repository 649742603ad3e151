"""Residues of the SZ function along its polar hyperplanes.

Write ``S_j = s_1 + ... + s_j``. Iterating the continuation formula ``j-1``
times expresses ``zeta(s)`` as ``sum_s P_{0,s} zeta(S_j + s, s_{j+1}, ...)`` plus
terms holomorphic near ``S_j = -k``, where ``P = H(S_1) H(S_2) ... H(S_{j-1})``
and row ``i`` of ``H(t)`` is the first row of ``H(t+i)`` shifted right by ``i``.
The first argument of ``zeta(u, ...)`` has a simple pole at ``u = -n`` with
residue ``-n! L_{n+1}(-n) zeta(s_{j+1}, ...) / log q``; collecting ``n = k-s``
gives the closed form below. An empty trailing vector contributes 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .coefficients import CoeffTable, L_n
from .errors import DomainError
from .kernel import as_args, as_qparam, rising_factorial
from .matrices import ContinuationPlan, continue_eval
from .poles import HyperplaneId, pole_locus
from .series import ModelKind


@dataclass(frozen=True)
class ResidueResult:
    value: complex
    hyperplane: HyperplaneId
    method: str
    err_est: float = 0.0


def _trailing_value(trailing: tuple, q, plan: Optional[ContinuationPlan]) -> complex:
    if not trailing:
        return 1.0 + 0j
    return continue_eval(trailing, q, plan).value


def _first_arg_residue(n: int, lattice_m: int, q) -> complex:
    """Residue at ``u = -n + m 2 pi i/log q`` of ``u -> zeta(u, rest)`` divided by ``zeta(rest)``."""
    shift = complex(0.0, lattice_m * 2.0 * math.pi / q.log_q)
    t = -n + shift
    # (-1)^n (t)_n equals n! on the real lattice. Off it, the pole of the
    # innermost factor picks up (1-q)^{shift}; q^{shift} = 1 leaves L unchanged.
    phase = cmath.exp(shift * math.log1p(-q.q))
    return -((-1) ** n) * rising_factorial(t, n) * L_n(n + 1, t, q) * phase / q.log_q


def residue_h1(n: int, trailing: Sequence = (), q=0.5, lattice_m: int = 0,
               plan: Optional[ContinuationPlan] = None) -> complex:
    """Residue along ``s_1 = -n`` (depth one when ``trailing`` is empty)."""
    q = as_qparam(q)
    if n < 0:
        raise ValueError("n must be >= 0")
    trailing = as_args(trailing).args if len(trailing) else ()
    return _first_arg_residue(n, lattice_m, q) * _trailing_value(trailing, q, plan)


def h_row_matrix(t, size: int, q) -> np.ndarray:
    """Upper-triangular ``size x size`` block of ``H(t)``."""
    out = np.zeros((size, size), dtype=complex)
    for i in range(size):
        table = CoeffTable.fill(complex(t) + i, q, size - i)
        for c in range(i, size):
            out[i, c] = table.H(c - i + 1)
    return out


def residue_hjk(j: int, k: int, point, q=0.5, lattice_m: int = 0,
                plan: Optional[ContinuationPlan] = None) -> complex:
    """Closed-form residue along ``s_1 + ... + s_j = -k`` at ``point``.

    ``point`` supplies ``s_1, ..., s_{j-1}`` and ``s_{j+1}, ...``; its ``s_j``
    entry is ignored. Only lattice points ``S_j = -k`` with ``k >= 0`` are poles.
    """
    q = as_qparam(q)
    s = as_args(point).args
    if not 1 <= j <= len(s):
        raise ValueError(f"j={j} out of range for depth {len(s)}")
    if k < 0:
        raise ValueError("k must be >= 0")
    head = s[: j - 1]
    trailing = s[j:]
    size = k + 1
    prod = np.eye(size, dtype=complex)
    partial = 0j
    for a in head:
        partial += a
        prod = prod @ h_row_matrix(partial, size, q)
    z_tail = _trailing_value(trailing, q, plan)
    total = 0j
    for shift in range(size):
        coef = prod[0, shift]
        if coef == 0:
            continue
        total += coef * _first_arg_residue(k - shift, lattice_m, q)
    return total * z_tail


def _neville_zero(hs: Sequence[float], vals: Sequence[complex]) -> complex:
    """Polynomial extrapolation in ``h^2`` to ``h = 0``."""
    x = [h * h for h in hs]
    p = list(vals)
    n = len(p)
    for level in range(1, n):
        for i in range(n - level):
            p[i] = (x[i] * p[i + 1] - x[i + level] * p[i]) / (x[i] - x[i + level])
    return p[0]


def numeric_residue(hp: HyperplaneId, point, q=0.5, h_seq: Sequence[float] = (1e-2, 5e-3, 2.5e-3),
                    plan: Optional[ContinuationPlan] = None) -> ResidueResult:
    """Residue from ``u f(u)`` on both sides of the hyperplane, extrapolated to ``u = 0``.

    ``s_j`` of ``point`` is moved so that ``S_j`` sits exactly on the lattice
    point, then perturbed by ``+-h``. With a single ``h`` the symmetric value is
    returned without extrapolation.
    """
    q = as_qparam(q)
    s = list(as_args(point).args)
    j = hp.j
    others = sum(s[: j - 1])
    s[j - 1] = hp.point(q) - others
    vals = []
    for h in h_seq:
        up = list(s)
        dn = list(s)
        up[j - 1] += h
        dn[j - 1] -= h
        f_up = continue_eval(up, q, plan).value
        f_dn = continue_eval(dn, q, plan).value
        vals.append(0.5 * h * (f_up - f_dn))
    if len(vals) == 1:
        return ResidueResult(vals[0], hp, "numeric-raw", float("nan"))
    best = _neville_zero(h_seq, vals)
    coarse = _neville_zero(h_seq[:-1], vals[:-1])
    return ResidueResult(best, hp, "numeric-richardson", float(abs(best - coarse)))


def residue(point, q=0.5, tol: float = 1e-8, plan: Optional[ContinuationPlan] = None) -> list:
    """Closed-form residues for every SZ hyperplane within ``tol`` of ``point``."""
    q = as_qparam(q)
    hits = pole_locus(ModelKind.SZ, point, q, tol)
    if not hits:
        raise DomainError("point is not on a polar hyperplane")
    return [ResidueResult(residue_hjk(h.j, h.k, point, q, h.lattice_m, plan), h, "closed")
            for h in hits]
