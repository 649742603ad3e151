"""Closed-form entries of the inverse translation matrix and their oracles.

Notation: ``q_i(t) = q^{-(t+i)} - 1``. The determinant ``D_{1,n}(t)`` of the
``(n-1) x (n-1)`` upper Hessenberg matrix built from the first row of the
translation matrix factors as ``t (t+1) ... (t+n-2) L_n(t)``, where ``L_n`` is
a sum over partitions with every part at least 2.

Each partition contributes, for every ordering of its parts, a nested sum over
the positions of those parts among the ``n-1`` slots (the remaining slots are
singletons). :func:`u_sum` is the two-ordering version (the tuple as stored and
its reverse, the reverse dropped when all parts agree). It covers every
ordering when a partition has at most two distinct arrangements, which holds
for ``n <= 7``. From ``n = 8`` on, partitions such as ``(3, 2, 2)`` have
middle arrangements (``2, 3, 2``); :func:`u_sum_complete` sums all distinct
arrangements and is what :func:`L_n` uses by default.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

from .errors import DomainError, SingularCoefficientError
from .kernel import QParam, as_qparam, q_pole_factor, rising_factorial, rising_over_factorial

SINGULAR_GUARD = 1e-10


@dataclass(frozen=True)
class Partition:
    """Partition of ``total`` into parts >= 2, stored nonincreasing."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts or any(p < 2 for p in parts):
            raise ValueError(f"parts must all be >= 2, got {self.parts!r}")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def all_equal(self) -> bool:
        return len(set(self.parts)) == 1

    def forward_offsets(self) -> list:
        """``T_r = i_1 + ... + i_r`` for ``r = 1..j-1``."""
        return list(itertools.accumulate(self.parts))[:-1]

    def backward_offsets(self) -> list:
        """``T'_r = i_j + ... + i_{j+1-r}`` for ``r = 1..j-1``."""
        return list(itertools.accumulate(reversed(self.parts)))[:-1]

    def arrangements(self) -> list:
        """Distinct orderings of the parts (multiset permutations), sorted descending."""
        return sorted(set(itertools.permutations(self.parts)), reverse=True)

    def factorial_weight(self) -> float:
        return 1.0 / math.prod(math.factorial(p) for p in self.parts)


@lru_cache(maxsize=None)
def _partitions(i: int, largest: int) -> tuple:
    if i == 0:
        return ((),)
    out = []
    for first in range(min(i, largest), 1, -1):
        for rest in _partitions(i - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_no_ones(i: int) -> list:
    """All partitions of ``i`` whose parts are all >= 2, largest part first."""
    if i < 2:
        return []
    return [Partition(p) for p in _partitions(i, i)]


def q_factors(t: complex, count: int, q: QParam) -> list:
    """``[q_0(t), ..., q_{count-1}(t)]`` with the pole-proximity guard."""
    out = []
    for i in range(count):
        v = q_pole_factor(t, i, q)
        if abs(v) < SINGULAR_GUARD:
            raise SingularCoefficientError(i, complex(t), abs(v))
        out.append(v)
    return out


def _inverse_factors(t, n: int, q: QParam) -> list:
    return [1.0 / v for v in q_factors(t, max(n - 1, 0), q)]


def ordered_block_sum(order, t, n: int, q) -> complex:
    """Nested sum over placements of the blocks ``order`` (in that order).

    With ``i = sum(order)`` and ``T_r`` the partial sums of ``order``, this is
    the sum over ``0 <= k_j <= ... <= k_1 <= n-i-1`` of
    ``prod_{u<=k_j} 1/q_u * prod_r prod_{s=k_{j-r+1}}^{k_{j-r}} 1/q_{T_r+s}
    * prod_{v=i+k_1}^{n-2} 1/q_v``.
    """
    q = as_qparam(q)
    inv = _inverse_factors(t, n, q)
    return _ordered_block_sum(tuple(order), inv, n)


def _ordered_block_sum(order: tuple, inv: list, n: int) -> complex:
    j = len(order)
    i = sum(order)
    if n < i + 1:
        raise DomainError(f"n={n} too small for parts summing to {i}")
    offsets = list(itertools.accumulate(order))[:-1]
    total = 0j
    # c[0] <= ... <= c[j-1] corresponds to k_j <= ... <= k_1
    for c in itertools.combinations_with_replacement(range(n - i), j):
        term = 1 + 0j
        for u in range(c[0] + 1):
            term *= inv[u]
        for r in range(1, j):
            base = offsets[r - 1]
            for s in range(c[r - 1], c[r] + 1):
                term *= inv[base + s]
        for v in range(i + c[-1], n - 1):
            term *= inv[v]
        total += term
    return total


def u_sum(p: Partition, t, n: int, q) -> complex:
    """Forward placement sum plus the backward one (skipped when all parts are equal)."""
    q = as_qparam(q)
    if not isinstance(p, Partition):
        p = Partition(tuple(p))
    inv = _inverse_factors(t, n, q)
    value = _ordered_block_sum(p.parts, inv, n)
    if not p.all_equal:
        value += _ordered_block_sum(tuple(reversed(p.parts)), inv, n)
    return value


def u_sum_complete(p: Partition, t, n: int, q) -> complex:
    """Placement sum over every distinct arrangement of the parts."""
    q = as_qparam(q)
    if not isinstance(p, Partition):
        p = Partition(tuple(p))
    inv = _inverse_factors(t, n, q)
    return sum((_ordered_block_sum(order, inv, n) for order in p.arrangements()), 0j)


def L_n(n: int, t, q, literal: bool = False) -> complex:
    """Partition-sum coefficient with ``D_{1,n}(t) = (t)_{n-1} L_n(t)``.

    ``literal=True`` restricts each partition to the forward/backward pair of
    :func:`u_sum`; this differs from the determinant from ``n = 8`` on.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"L_n needs n >= 1, got {n!r}")
    if n == 1:
        return 1 + 0j
    q = as_qparam(q)
    inv = _inverse_factors(t, n, q)
    value = math.prod(inv)
    for i in range(2, n):
        for p in partitions_no_ones(i):
            if literal:
                inner = _ordered_block_sum(p.parts, inv, n)
                if not p.all_equal:
                    inner += _ordered_block_sum(tuple(reversed(p.parts)), inv, n)
            else:
                inner = sum((_ordered_block_sum(o, inv, n) for o in p.arrangements()), 0j)
            value += p.factorial_weight() * inner
    return complex(value)


def hessenberg_matrix(n: int, t, q) -> list:
    """The signed ``(n-1) x (n-1)`` matrix whose determinant is ``D_{1,n}(t)``."""
    q = as_qparam(q)
    size = n - 1
    qf = q_factors(t, size, q)
    t = complex(t)
    rows = []
    for i in range(1, size + 1):
        row = []
        for c in range(1, size + 1):
            if c >= i:
                m = c - i + 1
                row.append((-1) ** (c - i) * rising_over_factorial(t + i - 1, m) / qf[i - 1])
            elif c == i - 1:
                row.append(1 + 0j)
            else:
                row.append(0j)
        rows.append(row)
    return rows


def hessenberg_det(n: int, t, q) -> complex:
    """``D_{1,n}(t)`` by the leading-minor recurrence on sign-free entries."""
    if n < 2:
        raise DomainError("hessenberg_det needs n >= 2")
    q = as_qparam(q)
    size = n - 1
    qf = q_factors(t, size, q)
    t = complex(t)

    def a(i, c):  # 1-indexed, c >= i
        return rising_over_factorial(t + i - 1, c - i + 1) / qf[i - 1]

    d = [1 + 0j]
    for k in range(1, size + 1):
        dk = a(k, k) * d[k - 1]
        for i in range(1, k):
            dk += a(i, k) * d[i - 1]  # subdiagonal entries are all 1
        d.append(dk)
    return d[size]


def _restricted_permutations(size: int):
    """Permutations sigma of 0..size-1 with sigma(j) >= j-1."""
    used = [False] * size
    perm = [0] * size

    def rec(j):
        if j == size:
            yield tuple(perm)
            return
        for c in range(max(0, j - 1), size):
            if not used[c]:
                used[c] = True
                perm[j] = c
                yield from rec(j + 1)
                used[c] = False

    yield from rec(0)


def _perm_sign(perm) -> int:
    inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
    return -1 if inv % 2 else 1


def permutation_det(n: int, t, q) -> complex:
    """``D_{1,n}(t)`` by signed expansion over permutations with ``sigma(j) >= j-1``."""
    if n < 2:
        raise DomainError("permutation_det needs n >= 2")
    if n > 9:
        raise DomainError("permutation_det is an oracle limited to n <= 9")
    g = hessenberg_matrix(n, t, q)
    size = n - 1
    total = 0j
    for perm in _restricted_permutations(size):
        term = complex(_perm_sign(perm))
        for row, col in enumerate(perm):
            term *= g[row][col]
        total += term
    return total


def R_entry(n: int, t, q) -> complex:
    """Entry ``(1, n)`` of the inverse translation matrix, ``(-1)^{n-1} (t)_{n-1} L_n(t)``."""
    if n < 1:
        raise DomainError("R_entry needs n >= 1")
    if n == 1:
        return 1 + 0j
    return (-1) ** (n - 1) * rising_factorial(t, n - 1) * L_n(n, t, q)


def H_entry(n: int, t, q) -> complex:
    """Entry ``(1, n)`` of ``H(t) = M(t)^{-1} N(t)``."""
    if n < 1:
        raise DomainError("H_entry needs n >= 1")
    q = as_qparam(q)
    qf = q_factors(t, n, q)
    acc = 0j
    for i in range(1, n + 1):
        acc += L_n(i, t, q) / (math.factorial(n - i) * qf[i - 1])
    return (-1) ** (n - 1) * rising_factorial(t, n - 1) * acc


def R_tail_entry(m: int, n: int, t, K: int, q) -> complex:
    """Entry ``(m, n)`` of ``M_II(t)^{-1} N_IJ(t)`` for the split at ``K``.

    ``(-1)^{K+n-m} (t+m-1)...(t+K+n-2) sum_{j=1}^{K-m+1} L_j(t+m-1) / ((K+n-m-j+1)! q_{m-2+j}(t))``.
    """
    if not 1 <= m <= K or n < 1:
        raise DomainError(f"R_tail_entry needs 1 <= m <= K and n >= 1 (m={m}, n={n}, K={K})")
    q = as_qparam(q)
    t = complex(t)
    base = t + m - 1
    length = K + n - m
    qf = q_factors(base, K - m + 1, q)
    # (base)_length / (length - j + 1)! = [(base)_length / length!] * length! / (length-j+1)!
    head = rising_over_factorial(base, length)
    acc = 0j
    for j in range(1, K - m + 2):
        falling = math.prod(range(length - j + 2, length + 1))
        acc += L_n(j, base, q) * falling / qf[j - 1]
    return (-1) ** length * head * acc


@dataclass
class CoeffTable:
    """``L_n``, ``R_{1,n}`` and ``H_{1,n}`` at one base point, filled once.

    Filling evaluates the partition sums; later lookups are free. Tables are
    treated as immutable after :meth:`fill`.
    """

    base_t: complex
    q: QParam
    n_max: int
    L: list = field(default_factory=list)
    _qf: list = field(default_factory=list, repr=False)

    @classmethod
    def fill(cls, t, q, n_max: int) -> "CoeffTable":
        q = as_qparam(q)
        table = cls(complex(t), q, n_max)
        table._qf = q_factors(t, n_max, q)
        table.L = [None] + [L_n(n, t, q) for n in range(1, n_max + 1)]
        return table

    def L_value(self, n: int) -> complex:
        return self.L[n]

    def R(self, n: int) -> complex:
        if n == 1:
            return 1 + 0j
        return (-1) ** (n - 1) * rising_factorial(self.base_t, n - 1) * self.L[n]

    def H(self, n: int) -> complex:
        acc = sum(self.L[i] / (math.factorial(n - i) * self._qf[i - 1]) for i in range(1, n + 1))
        return (-1) ** (n - 1) * rising_factorial(self.base_t, n - 1) * acc

    def R_tail_row1(self, n: int, K: int) -> complex:
        """``R*_{1,n}(t)`` for split ``K`` (needs ``n_max >= K``)."""
        length = K + n - 1
        head = rising_over_factorial(self.base_t, length)
        acc = 0j
        for j in range(1, K + 1):
            falling = math.prod(range(length - j + 2, length + 1))
            acc += self.L[j] * falling / self._qf[j - 1]
        return (-1) ** length * head * acc
