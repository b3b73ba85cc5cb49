"""Normal-form synthesis: basis states, elementary matrices, vectors, matrices.

Wire order follows the tensor-product convention: the first output wire holds
the most significant digit, so the digit of weight d**j sits on wire m-1-j.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diagram import (TRIANGLE, W, X, Z, Builder, Diagram, compose_par, compose_seq, cup,
                      identity, last_phase, ones)
from .generators import splitter, xs, zs


def basis_index(digits: Sequence[int], d: int) -> int:
    """Index of |a_{m-1} ... a_0>; ``digits`` is most significant first."""
    idx = 0
    for a in digits:
        if not 0 <= a < d:
            raise ValueError(f"digit {a} out of range for d={d}")
        idx = idx * d + a
    return idx


def digits_of(index: int, d: int, m: int) -> tuple:
    """Inverse of :func:`basis_index`, most significant digit first."""
    if not 0 <= index < d ** m:
        raise ValueError(f"index {index} out of range for d={d}, m={m}")
    out = []
    for _ in range(m):
        index, r = divmod(index, d)
        out.append(r)
    return tuple(reversed(out))


def basis_state(digits: Sequence[int], d: int) -> Diagram:
    """|a_{m-1} ... a_0> as a row of X classical points (K_{d-a} gives |a>)."""
    result = Diagram()
    for a in digits:
        if not 0 <= a < d:
            raise ValueError(f"digit {a} out of range for d={d}")
        result = compose_par(result, xs((d - a) % d, 0, 1, d))
    return result


@dataclass(frozen=True)
class RowAdditionSpec:
    """Adds ``coeff`` times the last row into row l = d^m-1-sum(k_i d^{j_i})."""

    d: int
    m: int
    positions: tuple
    multiplicities: tuple
    coeff: complex

    def __post_init__(self):
        if len(self.positions) != len(self.multiplicities) or not self.positions:
            raise ValueError("need one multiplicity per position and at least one position")
        if list(self.positions) != sorted(set(self.positions)):
            raise ValueError("positions must be strictly increasing")
        if not all(0 <= j < self.m for j in self.positions):
            raise ValueError("position out of range")
        if not all(1 <= k <= self.d - 1 for k in self.multiplicities):
            raise ValueError("multiplicities must lie in [1, d-1]")

    @property
    def target(self) -> int:
        return self.d ** self.m - 1 - sum(k * self.d ** j
                                          for j, k in zip(self.positions, self.multiplicities))

    @classmethod
    def for_target(cls, l: int, d: int, m: int, coeff: complex) -> "RowAdditionSpec":
        digits = digits_of(d ** m - 1 - l, d, m)
        pos, mult = [], []
        for j in range(m):
            k = digits[m - 1 - j]
            if k:
                pos.append(j)
                mult.append(k)
        return cls(d, m, tuple(pos), tuple(mult), complex(coeff))


def _controlled_gadget(d: int, m: int, phase, shifts: dict, tag: str) -> Diagram:
    """Identity on m wires plus a branch firing on |d-1 ... d-1>.

    Each wire is copied by a phase-free Z spider whose third leg runs through
    a triangle into a shared Z node carrying ``phase``.  The triangle passes
    every value when the shared index is 0 and only d-1 when it is d-1.  On a
    wire of weight d**j with ``shifts[j] = k`` the shared node also feeds k
    legs into an X spider, adding k times the shared index to the wire.
    """
    b = Builder()
    n_hub = m + sum(shifts.values())
    hub = b.add(Z, d, n_hub, 0, phase=phase, tag=tag)
    hub_legs = []
    ins = [b.input(d) for _ in range(m)]
    outs = [b.output(d) for _ in range(m)]
    for w in range(m):
        j = m - 1 - w
        copy = b.add(Z, d, 1, 2, phase=ones(d))
        t = b.add(TRIANGLE, d)
        b.wire(ins[w], b.inp(copy))
        b.wire(b.out(copy, 1), b.inp(t))
        hub_legs.append(b.out(t))
        k = shifts.get(j, 0)
        if k:
            add = b.add(X, d, 1 + k, 1, label=0)
            b.wire(b.out(copy, 0), b.inp(add, 0))
            for r in range(k):
                hub_legs.append(b.inp(add, 1 + r))
            b.wire(b.out(add), outs[w])
        else:
            b.wire(b.out(copy, 0), outs[w])
    for r, leg in enumerate(hub_legs):
        b.wire(b.inp(hub, r), leg)
    return b.build()


def row_addition_diagram(spec: RowAdditionSpec) -> Diagram:
    """Diagram of I + coeff |l><d^m - 1| on m wires."""
    shifts = dict(zip(spec.positions, spec.multiplicities))
    return _controlled_gadget(spec.d, spec.m, last_phase(spec.coeff, spec.d), shifts,
                              f"row_add:{spec.target}")


def row_mult_diagram(d: int, m: int, a: complex) -> Diagram:
    """Diagram of diag(1, ..., 1, a) on m wires."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _controlled_gadget(d, m, last_phase(complex(a) - 1, d), {}, "row_mult")


def _check_vector(v, d, m):
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != d ** m:
        raise ValueError(f"vector of length {v.size} given, expected d^m = {d ** m}")
    return v


def vector_normal_form(v, d: int, m: int) -> Diagram:
    """Row-addition normal form of a length d^m vector.

    Starts from |d-1>^m, adds v[l] into row l for l = 0 .. d^m - 2 in
    increasing order, then scales the last row by v[-1].
    """
    v = _check_vector(v, d, m)
    D = basis_state([d - 1] * m, d)
    for l in range(d ** m - 1):
        D = compose_seq(D, row_addition_diagram(RowAdditionSpec.for_target(l, d, m, v[l])))
    return compose_seq(D, row_mult_diagram(d, m, v[-1]))


def count_row_additions(D: Diagram) -> int:
    return sum(1 for n in D.nodes.values() if n.tag.startswith("row_add"))


def scalar_normal_form(a: complex, d: int = 2) -> Diagram:
    """Closed diagram worth ``a``: the state |0> + a|d-1> met by <d-1|."""
    return compose_seq(zs(last_phase(a, d), 0, 1, d), xs(d - 1, 1, 0, d))


def w_normal_form(v, d: int, m: int) -> Diagram:
    """W-spider normal form of a length d^m vector.

    A K_1 point feeds a W spider with one leg per basis index j; the W
    spider puts d-1 on exactly one leg.  Leg j enters a Z box with phase
    (0, ..., 0, v_j), so the active box carries weight v_j.  Box j is joined
    to the phase-free X spider of wire i by d - k_i wires (none when k_i = 0),
    where k_i is digit i of j; each X spider adds its inputs mod d, and
    (d - k_i)(d - 1) = k_i mod d.
    """
    v = _check_vector(v, d, m)
    n = d ** m
    b = Builder()
    root = b.add(X, d, 0, 1, label=1)
    wn = b.add(W, d, 1, n)
    b.wire(b.out(root), b.inp(wn))
    legs_for_wire = [[] for _ in range(m)]  # indexed by digit weight i
    boxes = []
    for j in range(n):
        digits = digits_of(j, d, m)
        fan = [(i, d - digits[m - 1 - i]) for i in range(m) if digits[m - 1 - i]]
        n_legs = sum(c for _, c in fan)
        box = b.add(Z, d, 1, n_legs, phase=last_phase(v[j], d), tag=f"w_box:{j}")
        boxes.append(box)
        b.wire(b.out(wn, j), b.inp(box))
        port = 0
        for i, c in fan:
            for _ in range(c):
                legs_for_wire[i].append(b.out(box, port))
                port += 1
    outs = [b.output(d) for _ in range(m)]
    for i in range(m):
        adder = b.add(X, d, len(legs_for_wire[i]), 1, label=0)
        for r, leg in enumerate(legs_for_wire[i]):
            b.wire(leg, b.inp(adder, r))
        b.wire(b.out(adder), outs[m - 1 - i])
    return b.build()


def count_w_boxes(D: Diagram) -> int:
    return sum(1 for n in D.nodes.values() if n.tag.startswith("w_box"))


def matrix_normal_form(M) -> Diagram:
    """Diagram with one output of dimension s and one input of dimension t
    interpreting to the s x t matrix ``M``.

    The row-major flattening of M is synthesised as a vector on one wire of
    dimension s*t, split into an s wire and a t wire, and the t wire is bent
    down into the input with a cup.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or min(M.shape) < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    s, t = M.shape
    if s * t == 1:
        # a 1x1 matrix: a scalar between two trivial wires
        return compose_par(scalar_normal_form(M[0, 0]), identity(1))
    vec = vector_normal_form(M.reshape(-1), s * t, 1)
    D = compose_par(vec, identity(t))
    D = compose_seq(D, compose_par(splitter(s, t), identity(t)))
    return compose_seq(D, compose_par(identity(s), cup(t)))
