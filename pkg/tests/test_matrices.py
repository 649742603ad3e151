import math

import numpy as np
import pytest

from oracles import binomial_sz, random_t
from qmz.errors import BudgetError, DomainError, PoleProximityError
from qmz.matrices import (
    ContinuationPlan,
    auto_K,
    build_block,
    check_translation,
    continue_eval,
    inverse_discrepancy,
    verify_inverse,
)
from qmz.series import eval_series

# binomial-expansion values at q = 0.5
FROZEN = [
    ((-0.5,), -6.6594284588849195),
    ((-0.5, 3.2), -0.9161061757498595),
    ((0.3, -1.7), 71.65364209851747),
    ((-0.5 + 0.3j, 2.2), -1.471524628817589 + 0.3051625438571774j),
    ((1, -2.3), 25.184177159054034),
    ((-1.5 + 0.5j,), 4.78995906850678 - 1.7952519011348549j),
    ((-2.5, 1.1, 0.7), -95.49180121615),
]


def test_block_shapes_and_diagonals():
    t, q = 0.3 + 0.2j, 0.5
    m = build_block("M", t, 4, 3, q)
    assert m.II.shape == (4, 4) and m.IJ.shape == (4, 3)
    assert np.allclose(np.diag(m.II), 1)
    n = build_block("N", t, 4, 3, q)
    assert np.allclose(np.triu(m.full(), 1), -np.triu(n.full(), 1))


def test_H_at_one_has_unit_corner():
    h = build_block("H", 1, 3, 0, 0.5).II
    assert h[0, 0] == pytest.approx(1.0)
    assert h.shape == (3, 3)


@pytest.mark.parametrize("t, K, q, bound", [(1, 1, 0.5, 0.0), (1.3 + 0.7j, 8, 0.5, 1e-11), (-2.5, 6, 0.9, 1e-10)])
def test_inverse_identity_examples(t, K, q, bound):
    assert verify_inverse(t, K, q) <= bound
    assert inverse_discrepancy(t, K, q) <= max(bound, 1e-15)


def test_closed_and_backsub_agree_relatively():
    rng = np.random.default_rng(0)
    for K in (1, 3, 7, 12):
        q = rng.uniform(0.2, 0.8)
        t = random_t(rng, q, K)
        for kind in ("M_INV", "H"):
            a = build_block(kind, t, K, 2, q).full()
            b = build_block(kind, t, K, 2, q, method="backsub").full()
            assert np.max(np.abs(a - b)) < 1e-13 * max(1, np.max(np.abs(b)))


def test_exact_residual_ignores_product_rounding():
    from qmz.matrices import exact_residual

    a = np.array([[1, 1e8], [0, 1]], dtype=complex)
    b = np.array([[1, -1e8], [0, 1]], dtype=complex)
    assert exact_residual(a, b) == 0.0
    assert exact_residual(a, np.eye(2, dtype=complex)) == 1e8


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_block("X", 0.3, 2)


@pytest.mark.parametrize("model, s", [("sz", (2.2, 0.4)), ("sz", (1.1, 0.5, 0.3)), ("bz", (2.5, 1.0)),
                                      ("sz_star", (1.4, 0.9)), ("sz", (0.8,)), ("bz", (1.7,))])
def test_translation_residuals(model, s):
    assert check_translation(model, s, 0.5).residual < 1e-9


def test_translation_requires_domain():
    with pytest.raises(DomainError):
        check_translation("sz", (-0.5, 2), 0.5)


@pytest.mark.parametrize("s, ref", FROZEN)
def test_continuation_frozen_values(s, ref):
    res = continue_eval(s, 0.5)
    assert abs(res.value - ref) < 1e-9 * max(1, abs(ref))


def test_continuation_against_binomial_at_other_q():
    q = 0.35
    s = (-0.7 + 0.4j, 0.9 - 0.1j)
    assert abs(continue_eval(s, q).value - binomial_sz(s, q, 70)) < 1e-9


@pytest.mark.parametrize("s", [(2, 1), (0.5,), (3,), (1.2, 0.4 + 0.3j, 0.6)])
def test_continuation_overlaps_series(s):
    a = continue_eval(s, 0.5).value
    b = eval_series("sz", s, 0.5).value
    assert abs(a - b) < 1e-10


def test_split_index_independence():
    s = (-0.5, 3.2)
    a = continue_eval(s, 0.5, ContinuationPlan(K=2)).value
    b = continue_eval(s, 0.5, ContinuationPlan(K=4)).value
    assert abs(a - b) < 1e-11


def test_auto_K_rule():
    assert auto_K((2, 1)) == 1
    assert auto_K((-0.5, 3.2)) == 2
    assert auto_K((1, -2.3)) == 3


def test_plan_K_too_small():
    with pytest.raises(DomainError):
        continue_eval((-2.5, 1), 0.5, ContinuationPlan(K=2))


def test_pole_is_refused():
    with pytest.raises(PoleProximityError) as info:
        continue_eval((0,), 0.5)
    assert info.value.hyperplanes[0].as_dict() == {"j": 1, "k": 0, "m": 0}
    lam = 2 * math.pi / math.log(0.5)
    with pytest.raises(PoleProximityError):
        continue_eval((1.5, -3.5 + 1j * lam), 0.5)


def test_tail_budget():
    with pytest.raises(BudgetError):
        continue_eval((-0.5, 0.7), 0.5, ContinuationPlan(tail_max_terms=3))


def test_info_reports_stats():
    res = continue_eval((1, -2.3), 0.5)
    assert res.info["K"] == 3
    assert res.info["memo_hits"] > 0
    assert res.err_est < 1e-10
