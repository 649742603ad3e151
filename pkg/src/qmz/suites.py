"""Randomized self-checks run by ``qmz check``.

Every case is a dict with ``suite``, ``case``, ``residual``, ``threshold`` and
``passed``. The random stream depends only on the seed, so reruns agree
case-for-case.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List

import numpy as np

from .coefficients import L_n, hessenberg_det, permutation_det
from .kernel import rising_factorial
from .matrices import check_translation, inverse_discrepancy, inverse_rounding_scales, verify_inverse
from .poles import HyperplaneId
from .residues import numeric_residue, residue_h1
from .series import ModelKind, SumBudget


def _case(suite, label, residual, threshold, **extra) -> dict:
    residual = float(residual)
    out = {"suite": suite, "case": label, "residual": residual, "threshold": threshold,
           "passed": bool(math.isfinite(residual) and residual <= threshold)}
    out.update(extra)
    return out


def _q(rng, lo=0.25, hi=0.6) -> float:
    return float(rng.uniform(lo, hi))


def off_lattice_t(rng, q: float, n: int, margin: float = 0.1) -> complex:
    """Random complex ``t`` whose shifts ``t, ..., t+n`` stay ``margin`` away from poles."""
    period = 2 * math.pi / abs(math.log(q))
    while True:
        t = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        ok = True
        for i in range(n + 1):
            z = t + i
            k = round(-z.real)
            m = round(z.imag / period)
            if k >= 0 and abs(z - complex(-k, m * period)) < margin:
                ok = False
                break
        if ok:
            return t


def _in_domain_point(rng, depth: int, shift: float = 0.0) -> tuple:
    """Real parts with every partial sum above ``shift + 0.3``."""
    while True:
        re = rng.uniform(-1.0, 3.0, depth)
        re[0] = rng.uniform(0.3, 3.0) + shift
        if np.all(np.cumsum(re) > shift + 0.3):
            im = rng.uniform(-0.5, 0.5, depth)
            return tuple(complex(a, b) for a, b in zip(re, im))


def translation_suite(samples: int, seed: int) -> List[dict]:
    rng = np.random.default_rng(seed)
    budget = SumBudget(tol=1e-12)
    cases = []
    plan = [(ModelKind.SZ, 1, 0.0), (ModelKind.SZ, 2, 0.0), (ModelKind.SZ, 3, 0.0),
            (ModelKind.BZ, 2, None), (ModelKind.SZ_STAR, 2, 0.0)]
    for model, depth, shift in plan:
        for i in range(samples):
            q = _q(rng)
            if model is ModelKind.BZ:
                s1 = rng.uniform(1.3, 4.0)
                s2 = rng.uniform(2.3 - s1, 3.0) if s1 < 2.3 else rng.uniform(-0.5, 3.0)
                s = (complex(s1, rng.uniform(-0.5, 0.5)), complex(s2, rng.uniform(-0.5, 0.5)))
            else:
                s = _in_domain_point(rng, depth, shift)
            res = check_translation(model, s, q, k_terms=60, budget=budget)
            cases.append(_case("translation", f"{model.value}/r{depth}/{i}", res.residual, 1e-8,
                               q=q, s=[[z.real, z.imag] for z in s]))
    return cases


ROUNDING_HEADROOM = 16.0


def inverse_suite(samples: int, seed: int) -> List[dict]:
    """Closed-form inverse against the identity and against back-substitution.

    The threshold is ``1e-10`` or, when the matrix is badly scaled, a fixed
    multiple of the binary64 rounding scale, whichever is larger.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(samples):
        q = _q(rng, 0.2, 0.8)
        K = int(rng.integers(1, 13))
        t = off_lattice_t(rng, q, K)
        ident_scale, back_scale = inverse_rounding_scales(t, K, q)
        cases.append(_case("inverse", f"identity/{i}", verify_inverse(t, K, q),
                           max(1e-10, ROUNDING_HEADROOM * ident_scale), K=K, q=q))
        cases.append(_case("inverse", f"closed-vs-backsub/{i}", inverse_discrepancy(t, K, q),
                           max(1e-10, ROUNDING_HEADROOM * back_scale), K=K, q=q))
    return cases


def residue_suite(samples: int, seed: int) -> List[dict]:
    rng = np.random.default_rng(seed)
    cases = []
    trailing_choices = [(), (3.0,), (2.5, 2.0)]
    for i in range(samples):
        q = float(rng.choice([0.3, 0.5, 0.7]))
        n = int(rng.integers(0, 3))
        trailing = trailing_choices[i % len(trailing_choices)]
        closed = residue_h1(n, trailing, q)
        point = (complex(-n),) + tuple(complex(x) for x in trailing)
        num = numeric_residue(HyperplaneId(1, n), point, q).value
        rel = abs(closed - num) / abs(closed)
        cases.append(_case("residue", f"h1/n{n}/{i}", rel, 1e-4, q=q))
    return cases


def coeff_suite(samples: int, seed: int) -> List[dict]:
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(samples):
        q = _q(rng, 0.2, 0.8)
        n = int(rng.integers(2, 8))
        t = off_lattice_t(rng, q, n)
        hd = hessenberg_det(n, t, q)
        pd = permutation_det(n, t, q)
        pf = rising_factorial(t, n - 1) * L_n(n, t, q)
        scale = max(abs(hd), 1e-300)
        rel = max(abs(hd - pd), abs(hd - pf)) / scale
        cases.append(_case("coeff", f"n{n}/{i}", rel, 1e-9, q=q))
    return cases


SUITES: Dict[str, Callable[[int, int], List[dict]]] = {
    "translation": translation_suite,
    "inverse": inverse_suite,
    "residue": residue_suite,
    "coeff": coeff_suite,
}


def run_suite(name: str, samples: int, seed: int) -> List[dict]:
    if name == "all":
        out = []
        for key, fn in SUITES.items():
            out.extend(fn(samples, seed))
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    return SUITES[name](samples, seed)
