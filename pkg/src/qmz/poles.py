"""Pole loci of the SZ and BZ models.

SZ: ``s_1 + ... + s_j`` in ``Z_{<=0} + (2 pi i / log q) Z`` for some ``j``.
BZ: ``s_1`` in ``1 + (2 pi i/log q) Z``, or ``s_1`` in ``Z_{<=0} + (2 pi i/log q) Z_{!=0}``,
or ``s_1 + ... + s_j`` in ``Z_{<=j} + (2 pi i/log q) Z`` for some ``j >= 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kernel import as_args, as_qparam, nearest_lattice_point
from .series import ModelKind


@dataclass(frozen=True, order=True)
class HyperplaneId:
    """``s_1 + ... + s_j = -k + lattice_m * 2 pi i / log q``."""

    j: int
    k: int
    lattice_m: int = 0

    def point(self, q) -> complex:
        q = as_qparam(q)
        return complex(-self.k, self.lattice_m * 2.0 * math.pi / q.log_q)

    def as_dict(self) -> dict:
        return {"j": self.j, "k": self.k, "m": self.lattice_m}


def _nearest_with_shift(z: complex, q, k_min: int, k_max: int | None):
    step = 2.0 * math.pi / q.log_q
    k = int(round(-z.real))
    k = max(k, k_min)
    if k_max is not None:
        k = min(k, k_max)
    m = int(round(z.imag / step))
    return k, m, abs(z - complex(-k, m * step))


def pole_locus(model, s, q, tol: float = 1e-8) -> list:
    """Every hyperplane of the model's pole set passing within ``tol`` of ``s``.

    Distance is measured on the partial sum ``s_1 + ... + s_j`` against the
    lattice point. An empty list means ``s`` is not a pole.
    """
    model = ModelKind.parse(model)
    s = as_args(s)
    q = as_qparam(q)
    hits = []
    sums = s.partial_sums()
    if model is ModelKind.SZ:
        for j, z in enumerate(sums, start=1):
            k, m, dist = nearest_lattice_point(z, q)
            if dist <= tol:
                hits.append(HyperplaneId(j, k, m))
    elif model is ModelKind.BZ:
        z = sums[0]
        k, m, dist = _nearest_with_shift(z, q, -1, -1)
        if dist <= tol:
            hits.append(HyperplaneId(1, k, m))
        k, m, dist = _nearest_with_shift(z, q, 0, None)
        if dist <= tol and m != 0:
            hits.append(HyperplaneId(1, k, m))
        for j, z in enumerate(sums[1:], start=2):
            k, m, dist = _nearest_with_shift(z, q, -j, None)
            if dist <= tol:
                hits.append(HyperplaneId(j, k, m))
    else:
        raise ValueError(f"pole sets are implemented for SZ and BZ, not {model.name}")
    return sorted(hits)


def pole_distance(s, q) -> tuple:
    """Smallest SZ lattice distance over all partial sums, with its hyperplane."""
    s = as_args(s)
    q = as_qparam(q)
    best = (math.inf, None)
    for j, z in enumerate(s.partial_sums(), start=1):
        k, m, dist = nearest_lattice_point(z, q)
        if dist < best[0]:
            best = (dist, HyperplaneId(j, k, m))
    return best
