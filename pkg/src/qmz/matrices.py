"""Truncated translation matrices and the analytic continuation of the SZ model.

The translation formula in matrix form reads ``N(s_1) V(s_1+s_2, s_3, ...) =
M(s_1) V(s_1, s_2, ...)`` with ``V(s) = (zeta(s), zeta(s_1+1, ...), ...)^T``.
Splitting indices at ``K`` gives

    zeta(s) = sum_{i=1}^{K} H_{1,i}(s_1) zeta(s_1+s_2+i-1, s_3, ...)
              + sum_{n>=1} R*_{1,n}(s_1) zeta(s_1+K+n-1, s_2, ...)      (xi_K)
              + sum_{n>=1} R*_{1,n}(s_1) zeta(s_1+s_2+K+n-1, s_3, ...)  (eta_K)

where ``R* = M_II^{-1} N_IJ``. Off the diagonal ``M`` and ``N`` differ only in
sign, so ``-M_II^{-1} M_IJ`` is the same matrix and both tails share it.
Depth one has no inner function; there the first ``K`` rows of ``M(t) V(t) =
(1/q_0(t+i))_i`` are solved by back-substitution.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import solve_triangular

from .coefficients import CoeffTable, R_entry, H_entry, q_factors
from .errors import BudgetError, DomainError, PoleProximityError
from .kernel import as_args, as_qparam, q_pole_factor, rising_factorial, rising_over_factorial
from .poles import pole_locus
from .series import EvalResult, ModelKind, SumBudget, eval_series, in_domain

KINDS = ("M", "N", "M_INV", "H")


@dataclass(frozen=True)
class TriBlock:
    """``II`` (K x K) and ``IJ`` (K x J_cols) blocks of an upper-triangular matrix."""

    kind: str
    base_t: complex
    q: object
    K: int
    J_cols: int
    II: np.ndarray
    IJ: np.ndarray

    def full(self) -> np.ndarray:
        return np.hstack([self.II, self.IJ])


def _entry_M(t: complex, i: int, c: int, qf0: complex) -> complex:
    if c == i:
        return 1 + 0j
    m = c - i
    return (-1) ** (m - 1) * rising_over_factorial(t + i, m) / qf0


def _entry_N(t: complex, i: int, c: int, qf0: complex) -> complex:
    m = c - i
    return (-1) ** m * rising_over_factorial(t + i, m) / qf0


def _dense(kind: str, t: complex, size: int, q) -> np.ndarray:
    out = np.zeros((size, size), dtype=complex)
    if kind in ("M", "N"):
        diag = [q_factors(t + i, 1, q)[0] for i in range(size)]
        fn = _entry_M if kind == "M" else _entry_N
        for i in range(size):
            for c in range(i, size):
                out[i, c] = fn(t, i, c, diag[i])
        return out
    if kind == "M_INV":
        for i in range(size):
            table = CoeffTable.fill(t + i, q, size - i)
            for c in range(i, size):
                out[i, c] = table.R(c - i + 1)
        return out
    if kind == "H":
        for i in range(size):
            table = CoeffTable.fill(t + i, q, size - i)
            for c in range(i, size):
                out[i, c] = table.H(c - i + 1)
        return out
    raise ValueError(f"unknown matrix kind {kind!r}; expected one of {KINDS}")


def build_block(kind: str, t, K: int, J_cols: int = 0, q=0.5, method: str = "closed") -> TriBlock:
    """Materialize the ``II`` and ``IJ`` blocks of ``M``, ``N``, ``M^{-1}`` or ``H``.

    ``method`` matters only for ``M_INV`` and ``H``: ``"closed"`` uses the
    partition-sum entries, ``"backsub"`` inverts the leading ``(K+J_cols)``
    block of ``M`` by back-substitution (and multiplies by ``N`` for ``H``).
    Truncating an upper-triangular product to a leading block is exact.
    """
    q = as_qparam(q)
    t = complex(t)
    kind = kind.upper()
    if K < 1 or J_cols < 0:
        raise ValueError("need K >= 1 and J_cols >= 0")
    size = K + J_cols
    if kind in ("M_INV", "H") and method == "backsub":
        m = _dense("M", t, size, q)
        inv = solve_triangular(m, np.eye(size, dtype=complex), unit_diagonal=True)
        dense = inv if kind == "M_INV" else inv @ _dense("N", t, size, q)
    elif method in ("closed", "backsub"):
        dense = _dense(kind, t, size, q)
    else:
        raise ValueError(f"unknown method {method!r}")
    return TriBlock(kind, t, q, K, J_cols, dense[:K, :K].copy(), dense[:K, K:].copy())


def exact_residual(a: np.ndarray, b: np.ndarray) -> float:
    """``max |a b - I|`` with the products and sums done in exact rational arithmetic.

    Only the stored entries contribute error; a floating-point product would
    add rounding of order ``eps |a| |b|``, which dominates for large inverses.
    """
    n = a.shape[0]
    fa_re = [[Fraction(float(x.real)) for x in row] for row in a]
    fa_im = [[Fraction(float(x.imag)) for x in row] for row in a]
    fb_re = [[Fraction(float(x.real)) for x in row] for row in b]
    fb_im = [[Fraction(float(x.imag)) for x in row] for row in b]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            re = Fraction(-1 if i == j else 0)
            im = Fraction(0)
            for k in range(n):
                re += fa_re[i][k] * fb_re[k][j] - fa_im[i][k] * fb_im[k][j]
                im += fa_re[i][k] * fb_im[k][j] + fa_im[i][k] * fb_re[k][j]
            worst = max(worst, math.hypot(float(re), float(im)))
    return worst


def verify_inverse(t, K: int, q) -> float:
    """``max |M_II M_II^{-1} - I|`` for the closed-form inverse, residual formed exactly."""
    m = build_block("M", t, K, 0, q).II
    inv = build_block("M_INV", t, K, 0, q).II
    return exact_residual(m, inv)


def inverse_discrepancy(t, K: int, q) -> float:
    """``max |closed-form M^{-1} - back-substituted M^{-1}|`` on the ``II`` block."""
    closed = build_block("M_INV", t, K, 0, q).II
    back = build_block("M_INV", t, K, 0, q, method="backsub").II
    return float(np.max(np.abs(closed - back)))


def inverse_rounding_scales(t, K: int, q) -> tuple:
    """Binary64 error scales ``(eps |||M||M^-1|||, eps |M^-1| |||M||M^-1|||)``.

    Storing the exact inverse in doubles already leaves a residual of order the
    first value and a back-substitution error of order the second; the
    absolute bound ``1e-10`` is out of reach once they exceed it.
    """
    eps = float(np.finfo(float).eps)
    m = np.abs(build_block("M", t, K, 0, q).II)
    inv = np.abs(build_block("M_INV", t, K, 0, q).II)
    prod = float(np.max(m @ inv))
    return eps * prod, eps * float(np.max(inv)) * prod


# ---------------------------------------------------------------------------
# translation identities

class TranslationCheck(NamedTuple):
    lhs: complex
    rhs: complex
    residual: float


def check_translation(model, s, q, k_terms: int = 60, budget: Optional[SumBudget] = None) -> TranslationCheck:
    """Both sides of the translation formula with the k-sums cut at ``k_terms``.

    Depth one uses the single-variable identities; every zeta value is a direct
    series, so ``s`` must lie in the model's convergence domain.
    """
    model = ModelKind.parse(model)
    s = as_args(s)
    q = as_qparam(q)
    budget = budget or SumBudget()
    if model not in (ModelKind.SZ, ModelKind.BZ, ModelKind.SZ_STAR):
        raise ValueError("translation identities exist for SZ, BZ and SZ_STAR")
    if not in_domain(model, s):
        raise DomainError(f"{model.name} translation check needs s in the convergence domain")

    def z(args):
        res = eval_series(model, args, q, budget)
        return res.value

    a = s.args
    s1 = a[0]
    qs1 = q_pole_factor(s1, 0, q)  # q^{-s1} - 1
    r = len(a)
    # sum_{k} (-1)^k (s1)_{k+1}/(k+1)! zeta(s1+k+1, s2, ...)
    tail = 0j
    for k in range(k_terms):
        tail += (-1) ** k * rising_over_factorial(s1, k + 1) * z((s1 + k + 1,) + a[1:])

    if r == 1:
        q_s = complex(q.q ** s1) if s1.imag == 0 else np.exp(s1 * q.log_q)
        if model is ModelKind.BZ:
            lhs = 1 + 0j
            rhs = (q_pole_factor(s1 - 1, 0, q)) * z(a) + tail
        else:
            lhs = q_s
            rhs = (1 - q_s) * z(a) + q_s * tail
        return TranslationCheck(complex(lhs), complex(rhs), abs(lhs - rhs))

    if model is ModelKind.SZ_STAR:
        q_s = np.exp(s1 * q.log_q)
        lhs = z((a[0] + a[1],) + a[2:])
        rhs = q_s * tail + (1 - q_s) * z(a)
        return TranslationCheck(complex(lhs), complex(rhs), abs(lhs - rhs))

    lhs = 0j
    for k in range(k_terms):
        coeff = (-1) ** k * rising_over_factorial(s1, k)
        inner = z((s1 + a[1] + k,) + a[2:])
        if model is ModelKind.BZ:
            inner += (1 - q.q) * z((s1 + a[1] + k - 1,) + a[2:])
        lhs += coeff * inner
    if model is ModelKind.BZ:
        rhs = tail + q_pole_factor(s1 - 1, 0, q) * z(a)
    else:
        rhs = tail + qs1 * z(a)
    return TranslationCheck(complex(lhs), complex(rhs), abs(lhs - rhs))


# ---------------------------------------------------------------------------
# continuation

@dataclass(frozen=True)
class ContinuationPlan:
    """Knobs of :func:`continue_eval`.

    ``K`` overrides the split index at the top level; nested levels keep the
    same offset from their automatic choice. Sub-evaluations whose partial sums
    all have real part ``>= direct_threshold`` are summed directly.
    """

    K: Optional[int] = None
    tail_tol: float = 1e-13
    tail_max_terms: int = 4000
    series_tol: float = 1e-14
    direct_threshold: float = 1.0
    max_depth_stack: int = 64
    pole_tol: float = 1e-8


def auto_K(s) -> int:
    """``max(1, ceil(1.5 - min_j Re(s_1+...+s_j)))``."""
    sigma = min(z.real for z in as_args(s).partial_sums())
    return max(1, math.ceil(1.5 - sigma))


def _key(args: tuple) -> tuple:
    return tuple((round(a.real, 12), round(a.imag, 12)) for a in args)


class _Continuer:
    def __init__(self, q, plan: ContinuationPlan, k_offset: int):
        self.q = q
        self.plan = plan
        self.k_offset = k_offset
        self.memo = {}
        self.stats = {"calls": 0, "memo_hits": 0, "direct": 0, "max_depth_stack": 0, "tail_terms": 0}
        self.budget = SumBudget(tol=plan.series_tol)

    def value(self, args: tuple, level: int = 0, force_machinery: bool = False):
        self.stats["calls"] += 1
        self.stats["max_depth_stack"] = max(self.stats["max_depth_stack"], level)
        if level > self.plan.max_depth_stack:
            raise BudgetError("continuation recursion exceeded its depth guard")
        key = _key(args)
        if not force_machinery and key in self.memo:
            self.stats["memo_hits"] += 1
            return self.memo[key]
        sigma = min(z.real for z in as_args(args).partial_sums())
        if not force_machinery and sigma >= self.plan.direct_threshold:
            res = eval_series(ModelKind.SZ, args, self.q, self.budget)
            if not res.converged:
                raise BudgetError(f"direct series did not converge at {args}")
            self.stats["direct"] += 1
            out = (res.value, res.err_est)
        else:
            K = auto_K(args) + self.k_offset
            if K < 1 or not K > 1 - sigma:
                raise DomainError(f"split index K={K} too small for min Re partial sum {sigma}")
            if len(args) == 1:
                out = self._depth_one(args[0], K, level)
            else:
                out = self._depth_r(args, K, level)
        self.memo[key] = out
        return out

    def _tail(self, coeff_fn, arg_fn, level: int):
        """``sum_{n>=1} coeff_fn(n) * zeta(arg_fn(n))`` with the adaptive stop."""
        total = 0j
        err = 0.0
        small = 0
        n = 0
        while small < 3:
            n += 1
            if n > self.plan.tail_max_terms:
                raise BudgetError("continuation tail did not converge within tail_max_terms")
            c = coeff_fn(n)
            z, ez = self.value(arg_fn(n), level + 1)
            term = c * z
            total += term
            err += abs(c) * ez
            small = small + 1 if abs(term) < self.plan.tail_tol else 0
        self.stats["tail_terms"] += n
        return total, err + self.plan.tail_tol

    def _depth_one(self, t: complex, K: int, level: int):
        q = self.q
        diag = [q_factors(t + i, 1, q)[0] for i in range(K)]
        m_ii = np.array([[_entry_M(t, i, c, diag[i]) if c >= i else 0j for c in range(K)]
                         for i in range(K)])
        b = np.array([1.0 / diag[i] for i in range(K)], dtype=complex)
        err_b = np.zeros(K)
        # tail columns c >= K of M(t) times zeta(t + c)
        ro = [rising_over_factorial(t + i, K - i) for i in range(K)]
        small = 0
        c = K
        while small < 3:
            if c - K >= self.plan.tail_max_terms:
                raise BudgetError("depth-1 continuation tail did not converge")
            z, ez = self.value((t + c,), level + 1)
            biggest = 0.0
            for i in range(K):
                coef = (-1) ** (c - i - 1) * ro[i] / diag[i]
                b[i] -= coef * z
                err_b[i] += abs(coef) * ez
                biggest = max(biggest, abs(coef * z))
                ro[i] *= (t + c) / (c + 1 - i)
            small = small + 1 if biggest < self.plan.tail_tol else 0
            c += 1
        self.stats["tail_terms"] += c - K
        err_b += self.plan.tail_tol
        x = solve_triangular(m_ii, b, unit_diagonal=True)
        inv = solve_triangular(m_ii, np.eye(K, dtype=complex), unit_diagonal=True)
        err = float(np.abs(inv[0]) @ err_b)
        return complex(x[0]), err

    def _depth_r(self, args: tuple, K: int, level: int):
        q = self.q
        s1, s2, rest = args[0], args[1], args[2:]
        table = CoeffTable.fill(s1, q, K)
        main = 0j
        err = 0.0
        for i in range(1, K + 1):
            h = table.H(i)
            z, ez = self.value((s1 + s2 + i - 1,) + rest, level + 1)
            main += h * z
            err += abs(h) * ez
        xi, exi = self._tail(lambda n: table.R_tail_row1(n, K),
                             lambda n: (s1 + K + n - 1,) + args[1:], level)
        eta, eeta = self._tail(lambda n: table.R_tail_row1(n, K),
                               lambda n: (s1 + s2 + K + n - 1,) + rest, level)
        return main + xi + eta, err + exi + eeta


def continue_eval(s, q, plan: Optional[ContinuationPlan] = None) -> EvalResult:
    """Value of the SZ function at any point off its pole locus.

    The top level always goes through the translation machinery (depth one:
    triangular solve; depth r: the ``H``/``xi``/``eta`` decomposition);
    nested values far enough inside the convergence domain are summed directly.
    Raises :class:`PoleProximityError` within ``plan.pole_tol`` of a pole.
    """
    s = as_args(s)
    q = as_qparam(q)
    plan = plan or ContinuationPlan()
    hits = pole_locus(ModelKind.SZ, s, q, tol=plan.pole_tol)
    if hits:
        raise PoleProximityError(hits, s.args)
    k_auto = auto_K(s)
    K = plan.K if plan.K is not None else k_auto
    sigma = min(z.real for z in s.partial_sums())
    if K < 1 or not K > 1 - sigma:
        raise DomainError(f"plan K={K} violates K >= 1 and K > 1 - min Re partial sum ({sigma:.3g})")
    worker = _Continuer(q, plan, K - k_auto)
    value, err = worker.value(s.args, 0, force_machinery=True)
    info = dict(worker.stats)
    info["K"] = K
    info["memo_size"] = len(worker.memo)
    return EvalResult(value=value, err_est=err, terms_used=info["tail_terms"], converged=True, info=info)


def zeta_continued(s, q, **plan_kwargs) -> complex:
    return continue_eval(s, q, ContinuationPlan(**plan_kwargs)).value
