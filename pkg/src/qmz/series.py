"""Direct summation of the q-multiple zeta series on their convergence domains.

All four models share one nested-sum engine. With ``a_j(k) = q^{k t_j} / [k]^{s_j}``
the strict sum over ``k_1 > ... > k_r >= 1`` is accumulated in increasing ``k``
through the running inner sums

    C_j(k) = sum_{k' < k} a_j(k') C_{j+1}(k'),     C_{r+1} = 1,

so a depth-r value costs ``O(r N)`` work for an outer cutoff ``N``. The weak
(star) simplex uses ``k' <= k`` in the same recursion.

Truncation error is bounded with a parallel recursion on ``|a_j(k)|``: the
layer bound ``B(k) = |a_1(k)| C~_2(k)`` dominates every term with ``k_1 = k``,
and the tail is extrapolated geometrically with ratio
``max(B(k)/B(k-1), q^{min_j Re(t_1+...+t_j)})``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import BudgetError, DomainError
from .kernel import ArgVector, CompensatedSum, QParam, as_args, as_qparam, log_q_bracket


class ModelKind(enum.Enum):
    SZ = "sz"
    SZ_STAR = "sz_star"
    BZ = "bz"
    FQ_GENERAL = "fq"

    @classmethod
    def parse(cls, name) -> "ModelKind":
        if isinstance(name, cls):
            return name
        key = str(name).lower().replace("-", "_")
        aliases = {"star": "sz_star", "szstar": "sz_star", "fq_general": "fq", "f_q": "fq"}
        key = aliases.get(key, key)
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown model {name!r}")


@dataclass(frozen=True)
class SumBudget:
    max_outer_index: int = 10_000
    tol: float = 1e-12

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_outer_index < 1:
            raise ValueError("max_outer_index must be >= 1")


@dataclass(frozen=True)
class EvalResult:
    value: complex
    err_est: float
    terms_used: int
    converged: bool
    info: dict = field(default_factory=dict, compare=False)


DEFAULT_BUDGET = SumBudget()


def _q_exponents(model: ModelKind, s: ArgVector, t_opt: Optional[ArgVector]) -> tuple:
    """Exponents of ``q^{k}`` per level, i.e. ``t`` in ``q^{k t}/[k]^s``."""
    if model is ModelKind.FQ_GENERAL:
        if t_opt is None:
            raise DomainError("FQ_GENERAL needs the second argument vector t")
        t = as_args(t_opt)
        if len(t) != len(s):
            raise DomainError(f"depth mismatch: s has {len(s)} entries, t has {len(t)}")
        return t.args
    if model is ModelKind.BZ:
        return tuple(a - 1 for a in s.args)
    return s.args


def _domain_margin(model: ModelKind, s: ArgVector, t_opt=None) -> float:
    """``min_j`` of the real partial sums minus the model's threshold (> 0 inside)."""
    exps = _q_exponents(model, s, t_opt)
    acc, margin = 0.0, math.inf
    for a in exps:
        acc += complex(a).real
        margin = min(margin, acc)
    return margin


def in_domain(model, s, t_opt=None) -> bool:
    """Strict convergence condition of the model.

    SZ / SZ_STAR: ``Re(s_1+...+s_j) > 0``; BZ: ``Re(s_1+...+s_j) > j``;
    FQ_GENERAL: ``Re(t_1+...+t_j) > 0`` for every ``j``.
    """
    model = ModelKind.parse(model)
    s = as_args(s)
    if model is ModelKind.FQ_GENERAL and t_opt is None:
        raise DomainError("FQ_GENERAL needs the second argument vector t")
    if t_opt is not None and len(as_args(t_opt)) != len(s):
        raise DomainError("depth mismatch between s and t")
    if model is ModelKind.BZ:
        acc = 0.0
        for j, a in enumerate(s.args, start=1):
            acc += a.real
            if not acc > j:
                return False
        return True
    return _domain_margin(model, s, t_opt) > 0


def _nested_sum(s: tuple, t: tuple, q: QParam, budget: SumBudget, weak: bool) -> EvalResult:
    r = len(s)
    log_q = q.log_q
    sigma = math.inf
    acc = 0.0
    for tj in t:
        acc += tj.real
        sigma = min(sigma, acc)
    rho_analytic = math.exp(sigma * log_q)

    inner = [CompensatedSum() for _ in range(r + 1)]  # inner[j] ~ C_{j+1}, index 0 unused
    inner_abs = [0.0] * (r + 1)
    total = CompensatedSum()
    prev_bound = None
    err = math.inf
    k = 0
    real_args = all(a.imag == 0.0 for a in s + t)

    # inner[j] holds C_{j+1}; C_{r+1} = 1 is implicit
    def c_next(j):
        return inner[j].value if j < r else 1.0

    def c_abs(j):
        return inner_abs[j] if j < r else 1.0

    while k < budget.max_outer_index:
        k += 1
        lb = log_q_bracket(k, q)
        if real_args:
            logs = [tj.real * k * log_q - sj.real * lb for sj, tj in zip(s, t)]
            terms = [complex(math.exp(x)) for x in logs]
            mags = [math.exp(x) for x in logs]
        else:
            expo = [tj * (k * log_q) - sj * lb for sj, tj in zip(s, t)]
            terms = [cmath.exp(x) for x in expo]
            mags = [math.exp(x.real) for x in expo]

        if weak:
            for j in range(r - 1, 0, -1):
                inner[j].add(terms[j] * c_next(j + 1))
                inner_abs[j] += mags[j] * c_abs(j + 1)
            layer = terms[0] * c_next(1)
            bound = mags[0] * c_abs(1)
        else:
            layer = terms[0] * c_next(1)
            bound = mags[0] * c_abs(1)
            for j in range(1, r):
                inner[j].add(terms[j] * c_next(j + 1))
                inner_abs[j] += mags[j] * c_abs(j + 1)
        total.add(layer)

        if bound == 0.0:
            if k >= r and prev_bound is not None:
                err = 0.0
                break
            continue
        if prev_bound is not None and prev_bound > 0.0:
            rho = max(bound / prev_bound, rho_analytic)
            err = bound * rho / (1.0 - rho) if rho < 1.0 else math.inf
            if err <= budget.tol:
                break
        prev_bound = bound

    return EvalResult(
        value=total.value,
        err_est=err,
        terms_used=k,
        converged=err <= budget.tol,
    )


def eval_series(model, s, q, budget: Optional[SumBudget] = None, t_opt=None) -> EvalResult:
    """Truncated series value of an SZ, SZ_STAR, BZ or general f_q model.

    Raises ``DomainError`` outside the convergence domain. If the outer cutoff
    is reached before the tail bound drops below ``budget.tol`` the best value
    is returned with ``converged=False``.
    """
    model = ModelKind.parse(model)
    s = as_args(s)
    q = as_qparam(q)
    budget = budget or DEFAULT_BUDGET
    if not in_domain(model, s, t_opt):
        raise DomainError(f"{model.name} series diverges at s={s.args}" +
                          (f", t={as_args(t_opt).args}" if t_opt is not None else ""))
    if budget.max_outer_index < len(s):
        raise ValueError("max_outer_index must be at least the depth")
    t = _q_exponents(model, s, t_opt)
    return _nested_sum(s.args, tuple(complex(x) for x in t), q, budget,
                       weak=model is ModelKind.SZ_STAR)


def eval_f_q(s, t, q, budget: Optional[SumBudget] = None) -> EvalResult:
    """Zhao's two-vector function ``sum q^{k_1 t_1 + ...} / ([k_1]^{s_1} ...)``."""
    return eval_series(ModelKind.FQ_GENERAL, s, q, budget, t_opt=t)


def zeta(s, q, tol: float = 1e-12) -> complex:
    """Convenience: SZ value on its convergence domain, raising if not converged."""
    res = eval_series(ModelKind.SZ, s, q, SumBudget(tol=tol))
    if not res.converged:
        raise BudgetError(f"series did not converge at s={as_args(s).args}")
    return res.value
