import itertools
import math

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from oracles import composition_L, qf
from qmz.coefficients import L_n, partitions_no_ones
from qmz.matrices import ContinuationPlan, build_block, check_translation, continue_eval
from qmz.poles import pole_distance
from qmz.series import SumBudget, eval_series
from qmz.textio import format_complex, parse_complex

SETTINGS = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])

qs = st.floats(0.2, 0.7)
re_part = st.floats(-2.5, 2.5)
im_part = st.floats(-1.5, 1.5)


def _off_lattice(t, q, n, margin=0.1):
    period = 2 * math.pi / abs(math.log(q))
    for i in range(n + 1):
        z = t + i
        k = round(-z.real)
        m = round(z.imag / period)
        if k >= 0 and abs(z - complex(-k, m * period)) < margin:
            return False
    return True


@SETTINGS
@given(st.floats(0.6, 3.0), st.floats(0.6, 3.0), st.floats(-0.5, 0.5), qs)
def test_star_splits_into_strict_plus_diagonal(a, b, c, q):
    s = (complex(a, c), complex(b, -c))
    star = eval_series("sz_star", s, q).value
    strict = eval_series("sz", s, q).value
    diag = eval_series("sz", (s[0] + s[1],), q).value
    assert abs(star - strict - diag) < 1e-9


@SETTINGS
@given(st.lists(st.floats(0.3, 3.0), min_size=1, max_size=3), qs)
def test_real_in_domain_values_are_positive(s, q):
    v = eval_series("sz", s, q).value
    assert v.real > 0 and abs(v.imag) <= 1e-12 * abs(v)


@SETTINGS
@given(st.floats(0.2, 2.0), st.floats(0.1, 2.0), st.integers(5, 40), qs)
def test_error_estimate_shrinks_and_bounds_tail(a, b, N, q):
    s = (a, b)
    tiny = 1e-300
    r1 = eval_series("sz", s, q, SumBudget(max_outer_index=N, tol=tiny))
    r2 = eval_series("sz", s, q, SumBudget(max_outer_index=2 * N, tol=tiny))
    r4 = eval_series("sz", s, q, SumBudget(max_outer_index=4 * N, tol=tiny))
    assert r2.err_est <= r1.err_est
    assert abs(r1.value - r4.value) <= r1.err_est + 1e-15


@SETTINGS
@given(re_part, im_part, qs)
def test_low_order_coefficients(a, b, q):
    t = complex(a, b)
    assume(_off_lattice(t, q, 2))
    assert L_n(1, t, q) == 1
    assert abs(L_n(2, t, q) * qf(t, 0, q) - 1) < 1e-12


@SETTINGS
@given(re_part, im_part, qs, st.integers(2, 9))
def test_L_against_compositions(a, b, q, n):
    t = complex(a, b)
    assume(_off_lattice(t, q, n))
    ref = composition_L(n, t, q)
    assert abs(L_n(n, t, q) - ref) <= 1e-11 * abs(ref)


@SETTINGS
@given(re_part, im_part, qs)
def test_inverse_rows_are_shifted_first_rows(a, b, q):
    t = complex(a, b)
    size = 8
    assume(_off_lattice(t, q, size))
    inv = build_block("M_INV", t, size, 0, q, method="backsub").II
    for k in range(1, size + 1):
        row = build_block("M_INV", t + k - 1, size - k + 1, 0, q).II[0]
        for n in range(k, size + 1):
            ref = inv[k - 1, n - 1]
            assert abs(row[n - k] - ref) <= 1e-10 * max(1, abs(ref))


def _brute_partitions(i):
    found = set()
    for length in range(1, i // 2 + 1):
        for combo in itertools.combinations_with_replacement(range(2, i + 1), length):
            if sum(combo) == i:
                found.add(tuple(sorted(combo, reverse=True)))
    return found


def test_partition_enumeration_complete():
    for i in range(2, 21):
        got = [p.parts for p in partitions_no_ones(i)]
        assert len(got) == len(set(got))
        assert set(got) == _brute_partitions(i)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.4, 2.0), st.floats(0.2, 1.5), st.floats(0.3, 0.55))
def test_translation_residual_drops_with_more_terms(a, b, q):
    s = (a, b)
    budget = SumBudget(tol=1e-14)
    r10 = check_translation("sz", s, q, k_terms=10, budget=budget).residual
    r20 = check_translation("sz", s, q, k_terms=20, budget=budget).residual
    r40 = check_translation("sz", s, q, k_terms=40, budget=budget).residual
    assert r20 <= 1.5 * r10 + 1e-13
    assert r40 <= 1.5 * r20 + 1e-13


@settings(max_examples=10, deadline=None)
@given(st.floats(-1.8, 0.2), st.floats(-0.5, 0.5), st.floats(0.5, 2.5), qs)
def test_split_index_independence(a, b, c, q):
    s = (complex(a, b), complex(c, 0.1))
    assume(pole_distance(s, q)[0] > 0.1)
    tail_tol = 1e-13
    v1 = continue_eval(s, q, ContinuationPlan(tail_tol=tail_tol)).value
    K = continue_eval(s, q).info["K"]
    v2 = continue_eval(s, q, ContinuationPlan(K=K + 2, tail_tol=tail_tol)).value
    assert abs(v1 - v2) <= 10 * tail_tol * max(1, abs(v1))


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(max_magnitude=1e12, allow_nan=False, allow_infinity=False))
def test_format_parse_round_trip(z):
    text = format_complex(z)
    w = parse_complex(text)
    assert w == z or (z.real == 0 and z.imag == 0 and w == 0)
    assert format_complex(w) == text
