import math

import numpy as np
import pytest

from oracles import binomial_residue
from qmz.errors import DomainError
from qmz.poles import HyperplaneId, pole_distance, pole_locus
from qmz.residues import numeric_residue, residue, residue_h1, residue_hjk

Q = 0.5
LAM = 2 * math.pi / math.log(Q)


def test_imaginary_lattice_point():
    assert pole_locus("sz", (complex(-1, LAM), 0.5), Q) == [HyperplaneId(1, 1, 1)]


def test_several_hyperplanes_at_once():
    hits = pole_locus("sz", (0, -1, 1), Q)
    assert hits == [HyperplaneId(1, 0, 0), HyperplaneId(2, 1, 0), HyperplaneId(3, 0, 0)]


def test_positive_integers_are_not_poles():
    assert pole_locus("sz", (1, 2, 3), Q) == []


def test_bz_pole_set():
    assert pole_locus("bz", (1,), Q) == [HyperplaneId(1, -1, 0)]
    assert pole_locus("bz", (0,), Q) == []
    assert pole_locus("bz", (complex(0, LAM),), Q) == [HyperplaneId(1, 0, 1)]
    assert pole_locus("bz", (3, -1), Q) == [HyperplaneId(2, -2, 0)]
    assert pole_locus("bz", (3, -4), Q) == [HyperplaneId(2, 1, 0)]
    assert pole_locus("bz", (3, 0), Q) == []


def test_star_model_has_no_pole_set():
    with pytest.raises(ValueError):
        pole_locus("sz_star", (0,), Q)


def test_pole_distance():
    d, h = pole_distance((0.3, -1.25), Q)
    assert h == HyperplaneId(2, 1, 0) and d == pytest.approx(0.05)


def test_depth_one_values():
    assert residue_h1(0, (), Q) == pytest.approx(1 / math.log(2), abs=1e-12)
    assert residue_h1(1, (), Q) == pytest.approx(1 / ((1 - Q) * math.log(Q)))


@pytest.mark.parametrize("n", [0, 1, 2, 3])
@pytest.mark.parametrize("m", [0, 1, -2])
def test_depth_one_against_binomial(n, m):
    q = 0.4
    ref = binomial_residue(1, n, (0,), q, m)
    assert abs(residue_h1(n, (), q, lattice_m=m) - ref) < 1e-11 * abs(ref)


@pytest.mark.parametrize("j, k, point", [(2, 0, (0.3, 0, 0.7)), (2, 1, (0.3, 0, 0.7)),
                                         (2, 2, (-0.4 + 0.2j, 0, 1.1)), (3, 1, (0.4, -0.2, 0, 1.5))])
def test_closed_form_against_binomial(j, k, point):
    ref = binomial_residue(j, k, point, Q, M=30 if len(point) == 4 else 40)
    assert abs(residue_hjk(j, k, point, Q) - ref) < 1e-7 * abs(ref)


@pytest.mark.parametrize("q", [0.4, 0.6])
def test_imaginary_lattice_hyperplane_against_binomial(q):
    point = (0.3, 0, 0.7)
    ref = binomial_residue(2, 1, point, q, lattice_m=1, M=40)
    assert abs(residue_hjk(2, 1, point, q, lattice_m=1) - ref) < 1e-8 * abs(ref)


def test_closed_form_against_limit():
    hp = HyperplaneId(2, 1, 0)
    point = (0.3, -1.3, 2.0)
    num = numeric_residue(hp, point, Q)
    closed = residue_hjk(2, 1, point, Q)
    assert abs(num.value - closed) < 1e-6 * abs(closed)
    assert num.method == "numeric-richardson"


def test_single_step_limit_is_raw():
    res = numeric_residue(HyperplaneId(1, 0), (0,), Q, h_seq=(1e-3,))
    assert res.method == "numeric-raw"
    assert abs(res.value - 1 / math.log(2)) < 1e-4


def test_residue_dispatch():
    out = residue((0.3, -1.3), Q)
    assert [r.hyperplane for r in out] == [HyperplaneId(2, 1, 0)]
    with pytest.raises(DomainError):
        residue((0.3, 0.2), Q)
