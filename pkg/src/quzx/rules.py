"""Rewrite rules and derived lemmas as (lhs, rhs) diagram pairs, plus a
semantic verifier that interprets both sides and compares the tensors.

Every constructor takes the dimension ``d`` and keyword parameters; every
entry in the registry also carries a sampler that draws those parameters
from a seeded generator, so a sweep is reproducible from one integer seed.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .diagram import (SPLITTER, W, X, Z, Builder, Diagram, cap, compose_par, compose_seq,
                      cup, empty, identity, last_phase, ones, permutation, phase_entry,
                      s_phase, swap, tau_phase, tau_values, transpose, v_phase, zeros)
from .generators import (antipode, binder, had, had_dag, power, red_phase, scalar_gadget,
                         splitter, tri, tri_inv, ws, xs, zk, zplain, zs)
from .tensor import ContractionCapError, deviation, interpret

EQ = "eq"
# equal at d = 2, different at d >= 3
HORIZONTAL = "horizontal"
INEQUALITY_MARGIN = 0.5


@dataclass(frozen=True)
class RuleInstance:
    name: str
    d: int
    params: dict
    lhs: Diagram
    rhs: Diagram
    source: str
    relation: str = EQ

    def __post_init__(self):
        if self.lhs.signature() != self.rhs.signature():
            raise ValueError(f"{self.name}: lhs {self.lhs.signature()} and "
                             f"rhs {self.rhs.signature()} have different boundaries")

    def expects_equal(self) -> bool:
        return self.relation == EQ or self.d == 2


# -- small gadgets ------------------------------------------------------------

def dbox(d: int) -> Diagram:
    """The D box, H scaled by the 1/d scalar gadget: [[D]] = H / d."""
    return compose_par(had(d), zs(s_phase(d), 0, 0, d))


def _ids(d: int, n: int) -> Diagram:
    return identity((d,) * n)


def _ta(phase, d: int) -> Diagram:
    """Generalised triangle W(1,2) >> (Z(a) 1->0 (x) id): |x> -> |x> + a_x |0>."""
    return compose_seq(ws(1, 2, d), compose_par(zs(phase, 1, 0, d), identity(d)))


def _cx(d: int, plus: bool) -> Diagram:
    """Copy the control wire into an X spider on the target wire.

    ``plus`` plugs the copied leg into an X input, giving (x, y) -> (x, y + x);
    otherwise the leg goes into an X output, giving (x, y) -> (x, y - x).
    """
    b = Builder()
    c, t = b.input(d), b.input(d)
    oc, ot = b.output(d), b.output(d)
    z = b.add(Z, d, 1, 2, phase=ones(d))
    b.wire(c, b.inp(z))
    b.wire(b.out(z, 0), oc)
    if plus:
        x = b.add(X, d, 2, 1, label=0)
        b.wire(b.out(z, 1), b.inp(x, 0))
        b.wire(t, b.inp(x, 1))
        b.wire(b.out(x), ot)
    else:
        x = b.add(X, d, 1, 2, label=0)
        b.wire(b.out(z, 1), b.out(x, 0))
        b.wire(t, b.inp(x))
        b.wire(b.out(x, 1), ot)
    return b.build()


def unit_state() -> Diagram:
    """The dimension-1 state |0> = 1, built from a cap and a binder."""
    return compose_seq(cap(1), binder(1, 1))


def unit_effect() -> Diagram:
    """The dimension-1 effect <0| = 1, built from a splitter and a cup."""
    b = Builder()
    sp = b.add(SPLITTER, s=1, t=1, n_in=1, n_out=2)
    b.wire(b.input(1), b.inp(sp))
    b.wire(b.out(sp, 0), b.out(sp, 1))
    return b.build()


def _rev(phase) -> tuple:
    return tuple(reversed(tuple(phase)))


def _add(a, b) -> tuple:
    return tuple(complex(x) + complex(y) for x, y in zip(a, b))


def _mul(a, b) -> tuple:
    return tuple(complex(x) * complex(y) for x, y in zip(a, b))


def _value(phase) -> complex:
    """Value of the 0-legged Z spider with this phase."""
    return 1 + sum(complex(p) for p in phase)


# -- base rules -----------------------------------------------------------------

def rule_s1(d, a, b, n1=1, m1=1, n2=1, m2=1):
    lhs = compose_seq(compose_par(zs(a, n1, m1 + 1, d), _ids(d, n2)),
                      compose_par(_ids(d, m1), zs(b, 1 + n2, m2, d)))
    return lhs, zs(_mul(a, b), n1 + n2, m1 + m2, d)


def rule_s2(d):
    return zplain(1, 1, d), identity(d)


def rule_s3(d):
    return zplain(0, 2, d), cap(d)


def rule_ept(d, a):
    return compose_seq(zs(a, 0, 1, d), xs(0, 1, 0, d)), empty()


def rule_b1(d):
    return compose_seq(zplain(0, 1, d), xs(0, 1, 2, d)), power(zplain(0, 1, d), 2)


def rule_b2(d):
    copies = power(zplain(1, 2, d), 2)
    adds = power(xs(0, 2, 1, d), 2)
    lhs = compose_seq(compose_seq(copies, permutation((d,) * 4, (0, 2, 1, 3))), adds)
    return lhs, compose_seq(xs(0, 2, 1, d), zplain(1, 2, d))


def rule_b3(d, n=2, m=2):
    perm = [k * n + i for i in range(n) for k in range(m)]
    lhs = compose_seq(compose_seq(power(zplain(1, m, d), n), permutation((d,) * (n * m), perm)),
                      power(xs(0, n, 1, d), m))
    return lhs, compose_seq(xs(0, n, 1, d), zplain(1, m, d))


def rule_k1(d, a, j=1, m=2):
    lhs = compose_seq(xs(j, 0, 1, d), zs(a, 1, m, d))
    rhs = compose_par(scalar_gadget(phase_entry(a, d - j, d), d), power(xs(j, 0, 1, d), m))
    return lhs, rhs


def k2_prime(a, j: int, d: int) -> tuple:
    den = phase_entry(a, d - j, d)
    return tuple(phase_entry(a, x - j, d) / den for x in range(1, d))


def rule_k2(d, a, j=1, m=2):
    lhs = compose_seq(xs(j, 1, 1, d), zs(a, 1, m, d))
    body = compose_seq(zs(k2_prime(a, j, d), 1, m, d), power(xs(j, 1, 1, d), m))
    return lhs, compose_par(scalar_gadget(phase_entry(a, d - j, d), d), body)


def euler_constant(d: int) -> complex:
    return d / sum(np.exp(1j * t) for t in tau_values(d))


def rule_eu(d):
    tz = zs(tau_phase(d), 1, 1, d)
    body = compose_seq(compose_seq(tz, red_phase(tau_phase(d), d)), tz)
    return had(d), compose_par(body, scalar_gadget(euler_constant(d), d))


def rule_zer(d, n=1, m=1):
    rhs = compose_par(power(xs(0, 0, 1, d), m), power(xs(0, 1, 0, d), n))
    return zs(zeros(d), n, m, d), rhs


def rule_h1(d):
    return compose_seq(had(d), had_dag(d)), compose_par(identity(d), scalar_gadget(d, d))


def rule_p1(d, j=0, k=0):
    return compose_seq(xs(j, 1, 1, d), xs(k, 1, 1, d)), xs((j + k) % d, 1, 1, d)


def rule_d1(d, j=0):
    lhs = compose_seq(xs(j, 0, 1, d), dbox(d))
    return lhs, compose_par(scalar_gadget(1 / d, d), zk((d - j) % d, 0, 1, d))


def rule_sca(d, a, b):
    c = _value(a) * _value(b)
    return (compose_par(zs(a, 0, 0, d), zs(b, 0, 0, d)),
            zs(last_phase(c - 1, d), 0, 0, d))


def rule_bs0(d):
    lhs = compose_seq(compose_seq(xs(0, 0, 1, d), tri(d)), zplain(1, 2, d))
    return lhs, power(xs(0, 0, 1, d), 2)


def rule_bsj(d, j=1):
    return compose_seq(xs(j, 0, 1, d), tri(d)), zs(v_phase(j, d), 0, 1, d)


def rule_bsj_flipped(d, j=1):
    """The stated upside-down form of (Bsj): a triangle absorbed by <j|."""
    return compose_seq(tri(d), xs(j, 1, 0, d)), xs(j, 1, 0, d)


def rule_suc(d):
    lhs = compose_seq(zplain(0, 1, d), tri(d))
    return lhs, compose_par(zs((1 / d,) * (d - 1), 0, 1, d), scalar_gadget(d, d))


def rule_inv(d):
    return compose_seq(tri(d), tri_inv(d)), identity(d)


def rule_pcy(d, a):
    lhs = compose_seq(ws(2, 1, d), zs(a, 1, 1, d))
    return lhs, compose_seq(power(zs(a, 1, 1, d), 2), ws(2, 1, d))


def rule_ad(d, a, b):
    lhs = compose_seq(compose_par(zs(a, 0, 1, d), zs(b, 0, 1, d)), ws(2, 1, d))
    return lhs, zs(_add(a, b), 0, 1, d)


def rule_sym(d):
    return compose_seq(ws(1, 2, d), swap(d)), ws(1, 2, d)


def rule_aso(d):
    lhs = compose_seq(ws(1, 2, d), compose_par(ws(1, 2, d), identity(d)))
    return lhs, compose_seq(ws(1, 2, d), compose_par(identity(d), ws(1, 2, d)))


def rule_whf(d):
    lhs = compose_seq(ws(1, 2, d), zplain(2, 1, d))
    return lhs, compose_par(xs(0, 1, 0, d), xs(0, 0, 1, d))


def rule_brk(d):
    return tri(d), _ta(ones(d), d)


def rule_dt(d):
    lhs = compose_seq(compose_seq(tri_inv(d), dbox(d)), xs(0, 1, 0, d))
    return lhs, compose_par(xs(0, 1, 0, d), scalar_gadget(1 / d, d))


def rule_tre(d, k=2):
    lhs = identity(d)
    for _ in range(k):
        lhs = compose_seq(lhs, tri(d))
    return lhs, _ta((complex(k),) * (d - 1), d)


def rule_tkj(d, j=0):
    lhs = compose_seq(compose_seq(zk(j, 0, 1, d), tri(d)), xs(0, 1, 0, d))
    return lhs, zk(j, 0, 0, d)


def rule_brk2(d):
    rhs = compose_seq(compose_par(identity(d), zplain(0, 1, d)), ws(2, 1, d))
    return transpose(tri(d)), rhs


def rule_binder_unit1(d, s=2, t=2):
    return compose_seq(binder(s, t), splitter(s, t)), identity((s, t))


def rule_binder_unit2(d, s=2, t=2):
    return compose_seq(splitter(s, t), binder(s, t)), identity(s * t)


def rule_binder_assoc(d, s=2, t=2, u=2):
    lhs = compose_seq(compose_par(binder(s, t), identity(u)), binder(s * t, u))
    rhs = compose_seq(compose_par(identity(s), binder(t, u)), binder(s, t * u))
    return lhs, rhs


def binder_phase(a, b, s: int, t: int) -> tuple:
    """c_{kt+l} = a_k b_l with a_0 = b_0 = 1."""
    return tuple(phase_entry(a, k, s) * phase_entry(b, l, t)
                 for k, l in (divmod(x, t) for x in range(1, s * t)))


def rule_binder_gspider(d, a, b, t=2, m=2):
    s = d
    states = compose_par(zs(a, 0, m, s), zs(b, 0, m, t))
    dims = (s,) * m + (t,) * m
    perm = [2 * i for i in range(m)] + [2 * i + 1 for i in range(m)]
    lhs = compose_seq(compose_seq(states, permutation(dims, perm)), power(binder(s, t), m))
    return lhs, zs(binder_phase(a, b, s, t), 0, m, s * t)


def rule_binder_with1_r(d, s=2):
    return binder(s, 1), compose_par(identity(s), unit_effect())


def rule_binder_with1_l(d, t=2):
    return binder(1, t), compose_par(unit_effect(), identity(t))


# -- lemmas -----------------------------------------------------------------------

def lemma_triangle_transpose(d):
    left = compose_seq(compose_seq(compose_par(cap(d), identity(d)),
                                   compose_par(compose_par(identity(d), tri(d)), identity(d))),
                       compose_par(identity(d), cup(d)))
    right = compose_seq(compose_seq(compose_par(identity(d), cap(d)),
                                    compose_par(compose_par(identity(d), tri(d)), identity(d))),
                        compose_par(cup(d), identity(d)))
    return left, right


def lemma_control_triangle(d):
    return (compose_seq(cap(d), compose_par(identity(d), tri(d))),
            compose_seq(cap(d), compose_par(transpose(tri(d)), identity(d))))


def lemma_kjga(d, a, j=1):
    return (compose_seq(xs(j, 0, 1, d), zs(a, 1, 0, d)),
            scalar_gadget(phase_entry(a, d - j, d), d))


def lemma_zero_empty(d):
    return compose_par(zs(zeros(d), 0, 0, d), xs(0, 0, 0, d)), empty()


def lemma_scalar_multiply(d):
    return compose_par(zs(s_phase(d), 0, 0, d), scalar_gadget(d, d)), empty()


def lemma_scalar_general_mult(d, a=1.0, b=1.0):
    return (compose_par(scalar_gadget(a, d), scalar_gadget(b, d)),
            scalar_gadget(complex(a) * complex(b), d))


def lemma_dbox_equal_h(d):
    return compose_par(dbox(d), scalar_gadget(d, d)), had(d)


def lemma_h1_scalar(d):
    return compose_seq(had(d), had(d)), compose_par(antipode(d), scalar_gadget(d, d))


def lemma_colour_change(d, j=0, n=1, m=1):
    body = compose_seq(compose_seq(power(had_dag(d), n), zk(j, n, m, d)), power(had(d), m))
    return xs(j, n, m, d), compose_par(body, scalar_gadget(1 / d, d))


def lemma_x_fusion(d, j=0, k=0, n1=1, m1=1, n2=1, m2=1):
    lhs = compose_seq(compose_par(xs(j, n1, m1 + 1, d), _ids(d, n2)),
                      compose_par(_ids(d, m1), xs(k, 1 + n2, m2, d)))
    return lhs, xs((j + k) % d, n1 + n2, m1 + m2, d)


def lemma_x_multi_edge(d, j=0, k=0, r=2):
    lhs = compose_seq(xs(j, 1, r, d), xs(k, r, 1, d))
    return lhs, compose_par(xs((j + k) % d, 1, 1, d), scalar_gadget(d ** (r - 1), d))


def lemma_dbox_square(d):
    return (compose_seq(dbox(d), dbox(d)),
            compose_par(antipode(d), scalar_gadget(1 / d, d)))


def lemma_dbox_gcopy(d):
    lhs = compose_seq(zplain(1, 2, d), power(dbox(d), 2))
    rhs = compose_par(compose_seq(dbox(d), xs(0, 1, 2, d)), scalar_gadget(1 / d, d))
    return lhs, rhs


def lemma_dbox_gdot(d):
    return compose_seq(zplain(0, 1, d), dbox(d)), xs(0, 0, 1, d)


def lemma_dbox_on_kj(d, j=0):
    return compose_seq(zk(j, 0, 1, d), dbox(d)), xs(j, 0, 1, d)


def lemma_dualisers(d):
    return compose_seq(antipode(d), antipode(d)), identity(d)


def lemma_had_slide(d):
    return compose_seq(antipode(d), had(d)), had_dag(d)


def lemma_dbox_slide_grn(d, j=0):
    return (compose_seq(dbox(d), zk(j, 1, 1, d)),
            compose_seq(xs((d - j) % d, 1, 1, d), dbox(d)))


def lemma_rkj_slide_gn(d, j=0):
    return (compose_seq(xs(j, 1, 1, d), had(d)),
            compose_seq(had(d), zk((d - j) % d, 1, 1, d)))


def lemma_swap_rg_cap_cup(d):
    return xs(0, 0, 2, d), compose_seq(cap(d), compose_par(identity(d), antipode(d)))


def lemma_gr_connect_d(d):
    lhs = compose_seq(zplain(1, d, d), xs(0, d, 1, d))
    return lhs, compose_par(zplain(1, 0, d), xs(0, 0, 1, d))


def lemma_horizontal_wire(d):
    return _cx(d, True), _cx(d, False)


def lemma_slide_cup(d, a):
    return (compose_seq(xs(0, 0, 2, d), compose_par(zs(a, 1, 1, d), identity(d))),
            compose_seq(xs(0, 0, 2, d), compose_par(identity(d), zs(_rev(a), 1, 1, d))))


def lemma_copy_vars(d, a):
    return compose_seq(zs(a, 0, 1, d), antipode(d)), zs(_rev(a), 0, 1, d)


def lemma_spider0_to_rdots(d):
    return zs(zeros(d), 1, 1, d), compose_par(xs(0, 0, 1, d), xs(0, 1, 0, d))


def _hopf_pair(d: int, k: int) -> Diagram:
    """Z copy spider sending k legs into X inputs and k legs into X outputs."""
    b = Builder()
    z = b.add(Z, d, 1, 2 * k, phase=ones(d))
    x = b.add(X, d, k, k + 1, label=0)
    b.wire(b.input(d), b.inp(z))
    for r in range(k):
        b.wire(b.out(z, r), b.inp(x, r))
        b.wire(b.out(z, k + r), b.out(x, r))
    b.wire(b.out(x, k), b.output(d))
    return b.build()


def lemma_hopf(d):
    return _hopf_pair(d, 1), compose_par(zplain(1, 0, d), xs(0, 0, 1, d))


def lemma_red_green_m_change(d, k=1):
    return _hopf_pair(d, k), compose_par(zplain(1, 0, d), xs(0, 0, 1, d))


def lemma_triangle_on_red_dot(d):
    return compose_seq(tri(d), xs(0, 1, 0, d)), zplain(1, 0, d)


def lemma_suc_inv(d, j=1):
    neg_v = tuple(-x for x in v_phase(j, d))
    return (compose_seq(xs(j, 0, 1, d), tri_inv(d)),
            compose_par(zs(neg_v, 0, 1, d), scalar_gadget(-1, d)))


def lemma_triangle_pi_inverse(d):
    return tri_inv(d), _ta((-1 + 0j,) * (d - 1), d)


def lemma_triangle_add(d, a, b):
    return compose_seq(_ta(a, d), _ta(b, d)), _ta(_add(a, b), d)


def lemma_two_triangle_up(d):
    return compose_seq(tri(d), tri(d)), _ta((2 + 0j,) * (d - 1), d)


def lemma_cnot_inverse(d):
    return compose_seq(_cx(d, True), _cx(d, False)), identity((d, d))


def lemma_brkp(d, a):
    rhs = compose_seq(compose_par(identity(d), zs(a, 0, 1, d)), ws(2, 1, d))
    return transpose(_ta(a, d)), rhs


def lemma_brk2_transpose(d):
    lhs = compose_seq(cap(d), compose_par(transpose(tri(d)), identity(d)))
    b = Builder()
    w = b.add(W, d, 2, 1)
    z = b.add(Z, d, 0, 1, phase=ones(d))
    b.wire(b.out(w), b.output(d))
    b.wire(b.inp(w, 0), b.output(d))
    b.wire(b.out(z), b.inp(w, 1))
    return lhs, b.build()


def lemma_cnot_like_move(d):
    n = compose_par(identity(d), antipode(d))
    return compose_seq(compose_seq(n, _cx(d, True)), n), _cx(d, False)


def lemma_euler_dual(d):
    rx = red_phase(tau_phase(d), d)
    body = compose_seq(compose_seq(rx, zs(tau_phase(d), 1, 1, d)), rx)
    return had(d), compose_par(body, scalar_gadget(euler_constant(d), d))


def lemma_tau_reversal(d):
    return zs(tau_phase(d), 1, 1, d), zs(_rev(tau_phase(d)), 1, 1, d)


def lemma_general_addition(d, phases=()):
    states = identity(())
    for p in phases:
        states = compose_par(states, zs(p, 0, 1, d))
    total = tuple(sum(complex(p[i]) for p in phases) for i in range(d - 1))
    return compose_seq(states, ws(len(phases), 1, d)), zs(total, 0, 1, d)


def lemma_equivalent_add_rule(d, a, b):
    lhs = compose_seq(compose_seq(ws(1, 2, d), compose_par(zs(a, 1, 1, d), zs(b, 1, 1, d))),
                      ws(2, 1, d))
    return lhs, zs(_add(a, b), 1, 1, d)


# -- parameter sampling -----------------------------------------------------------

def sample_phase(rng: np.random.Generator, d: int, trial: int = 2) -> tuple:
    """Trial 0 gives 1-vector, trial 1 the 0-vector, later trials random draws."""
    if trial == 0:
        return ones(d)
    if trial == 1:
        return zeros(d)
    style = rng.integers(3)
    if style == 0:
        return tuple(complex(z) for z in np.exp(2j * math.pi * rng.random(d - 1)))
    vec = rng.normal(size=d - 1) + 1j * rng.normal(size=d - 1)
    if style == 2:
        # a zero entry in a random position
        vec[rng.integers(d - 1)] = 0
    return tuple(complex(z) for z in vec)


def _p(**kw):
    return lambda rng, d, trial: kw


def _a(rng, d, trial):
    return {"a": sample_phase(rng, d, trial)}


def _ab(rng, d, trial):
    return {"a": sample_phase(rng, d, trial), "b": sample_phase(rng, d, trial + 2)}


def _s1(rng, d, trial):
    ar = [int(x) for x in rng.integers(0, 3, size=4)]
    return {**_ab(rng, d, trial), "n1": ar[0], "m1": ar[1], "n2": ar[2], "m2": ar[3]}


def _b3(rng, d, trial):
    return {"n": int(rng.integers(1, 4)), "m": int(rng.integers(1, 4))}


def _k1(rng, d, trial):
    return {"a": sample_phase(rng, d, trial), "j": int(rng.integers(d)),
            "m": int(rng.integers(0, 4))}


def _k2(rng, d, trial):
    j = int(rng.integers(d))
    a = sample_phase(rng, d, trial)
    while abs(phase_entry(a, d - j, d)) <= 1e-6:
        a = sample_phase(rng, d, 2)
    return {"a": a, "j": j, "m": int(rng.integers(1, 4))}


def _nm(rng, d, trial):
    return {"n": int(rng.integers(0, 3)), "m": int(rng.integers(0, 3))}


def _j(lo: int = 0):
    return lambda rng, d, trial: {"j": int(rng.integers(lo, d))}


def _jk(rng, d, trial):
    return {"j": int(rng.integers(d)), "k": int(rng.integers(d))}


def _tre(rng, d, trial):
    return {"k": int(rng.integers(1, 4))}


def _st(rng, d, trial):
    return {"s": int(rng.integers(1, 6)), "t": int(rng.integers(1, 6))}


def _stu(rng, d, trial):
    return {"s": int(rng.integers(1, 5)), "t": int(rng.integers(1, 5)),
            "u": int(rng.integers(1, 5))}


def _gspider(rng, d, trial):
    t = int(rng.integers(2, 4))
    return {"a": sample_phase(rng, d, trial), "b": sample_phase(rng, t, trial + 2),
            "t": t, "m": int(rng.integers(1, 3))}


def _scalars(rng, d, trial):
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    return {"a": complex(a), "b": complex(b)}


def _colour(rng, d, trial):
    return {"j": int(rng.integers(d)), "n": int(rng.integers(0, 3)),
            "m": int(rng.integers(0, 3))}


def _xfusion(rng, d, trial):
    ar = [int(x) for x in rng.integers(0, 3, size=4)]
    return {**_jk(rng, d, trial), "n1": ar[0], "m1": ar[1], "n2": ar[2], "m2": ar[3]}


def _multi_edge(rng, d, trial):
    return {**_jk(rng, d, trial), "r": int(rng.integers(2, 4))}


def _general_add(rng, d, trial):
    n = int(rng.integers(1, 4))
    return {"phases": tuple(sample_phase(rng, d, trial + 2 * i) for i in range(n))}


@dataclass(frozen=True)
class Entry:
    name: str
    source: str
    build: Callable
    sample: Callable
    relation: str = EQ
    flipped: Callable | None = None


def _entries(source, table):
    return {row[0]: Entry(row[0], source, *row[1:]) for row in table}


RULES: dict = {}
RULES.update(_entries("Figure1", [
    ("S1", rule_s1, _s1), ("S2", rule_s2, _p()), ("S3", rule_s3, _p()),
    ("Ept", rule_ept, _a), ("B1", rule_b1, _p()), ("B2", rule_b2, _p()),
    ("B3", rule_b3, _b3), ("K1", rule_k1, _k1), ("K2", rule_k2, _k2),
    ("EU", rule_eu, _p()), ("Zer", rule_zer, _nm), ("H1", rule_h1, _p()),
    ("P1", rule_p1, _jk), ("D1", rule_d1, _j()), ("Sca", rule_sca, _ab),
]))
RULES.update(_entries("Figure2", [
    ("Bs0", rule_bs0, _p()),
    ("Bsj", rule_bsj, _j(1), EQ, rule_bsj_flipped),
    ("Suc", rule_suc, _p()), ("Inv", rule_inv, _p()), ("Pcy", rule_pcy, _a),
    ("AD", rule_ad, _ab), ("Sym", rule_sym, _p()), ("Aso", rule_aso, _p()),
    ("Whf", rule_whf, _p()), ("Brk", rule_brk, _p()), ("DT", rule_dt, _p()),
    ("Tre", rule_tre, _tre), ("TKj", rule_tkj, _j()), ("Brk2", rule_brk2, _p()),
]))
RULES.update(_entries("Figure3", [
    ("BinderUnit1", rule_binder_unit1, _st), ("BinderUnit2", rule_binder_unit2, _st),
    ("BinderAssoc", rule_binder_assoc, _stu), ("BinderGSpider", rule_binder_gspider, _gspider),
    ("BinderWith1R", rule_binder_with1_r, lambda rng, d, t: {"s": int(rng.integers(1, 6))}),
    ("BinderWith1L", rule_binder_with1_l, lambda rng, d, t: {"t": int(rng.integers(1, 6))}),
]))

LEMMAS: dict = {}
LEMMAS.update(_entries("Lemma", [
    ("TriangleTranspose", lemma_triangle_transpose, _p()),
    ("ControlTriangle", lemma_control_triangle, _p()),
    ("KjGa", lemma_kjga, lambda rng, d, t: {**_a(rng, d, t), "j": int(rng.integers(1, d))}),
    ("ZeroEmpty", lemma_zero_empty, _p()),
    ("ScalarMultiply", lemma_scalar_multiply, _p()),
    ("ScalarGeneralMult", lemma_scalar_general_mult, _scalars),
    ("H1Scalar", lemma_h1_scalar, _p()),
    ("XFusion", lemma_x_fusion, _xfusion),
    ("XMultiEdge", lemma_x_multi_edge, _multi_edge),
    ("DBoxSquare", lemma_dbox_square, _p()),
    ("DBoxGCopy", lemma_dbox_gcopy, _p()),
    ("DBoxGDot", lemma_dbox_gdot, _p()),
    ("DBoxOnKj", lemma_dbox_on_kj, _j()),
    ("Dualisers", lemma_dualisers, _p()),
    ("HadSlide", lemma_had_slide, _p()),
    ("SwapRGCapCup", lemma_swap_rg_cap_cup, _p()),
    ("GrConnectD", lemma_gr_connect_d, _p()),
    ("HorizontalWire", lemma_horizontal_wire, _p(), HORIZONTAL),
    ("SlideCup", lemma_slide_cup, _a),
    ("CopyVars", lemma_copy_vars, _a),
    ("Spider0ToRDots", lemma_spider0_to_rdots, _p()),
    ("Hopf", lemma_hopf, _p()),
    ("TriangleOnRedDot", lemma_triangle_on_red_dot, _p()),
    ("SucInv", lemma_suc_inv, _j(1)),
    ("TrianglePiInverse", lemma_triangle_pi_inverse, _p()),
    ("TriangleAdd", lemma_triangle_add, _ab),
    ("TwoTriangleUp", lemma_two_triangle_up, _p()),
    ("CnotInverse", lemma_cnot_inverse, _p()),
    ("Brkp", lemma_brkp, _a),
    ("Brk2Transpose", lemma_brk2_transpose, _p()),
    ("CnotLikeMove", lemma_cnot_like_move, _p()),
    ("GeneralAddition", lemma_general_addition, _general_add),
    ("EquivalentAddRule", lemma_equivalent_add_rule, _ab),
]))
LEMMAS.update(_entries("Corollary", [
    ("DBoxEqualH", lemma_dbox_equal_h, _p()),
    ("ColourChange", lemma_colour_change, _colour),
    ("DBoxSlideGrn", lemma_dbox_slide_grn, _j()),
    ("RKjSlideGn", lemma_rkj_slide_gn, _j()),
    ("RedGreenMChange", lemma_red_green_m_change,
     lambda rng, d, t: {"k": int(rng.integers(1, d))}),
]))
LEMMAS.update(_entries("Derived", [
    ("EulerDual", lemma_euler_dual, _p()),
    ("TauReversal", lemma_tau_reversal, _p()),
]))


def _lookup(table: dict, name: str, what: str) -> Entry:
    try:
        return table[name]
    except KeyError:
        raise KeyError(f"unknown {what} {name!r}; known: {', '.join(table)}") from None


def _instantiate(entry: Entry, d: int, params: dict, flipped: bool) -> RuleInstance:
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    try:
        if flipped and entry.flipped is not None:
            lhs, rhs = entry.flipped(d, **params)
        else:
            lhs, rhs = entry.build(d, **params)
            if flipped:
                lhs, rhs = transpose(lhs), transpose(rhs)
    except TypeError as exc:
        raise ValueError(f"{entry.name}: bad parameters {sorted(params)}: {exc}") from None
    name = entry.name + ("^T" if flipped else "")
    return RuleInstance(name, d, dict(params), lhs, rhs, entry.source, entry.relation)


def build_rule(name: str, d: int, params: dict | None = None, *, flipped: bool = False,
               seed: int = 0) -> RuleInstance:
    """Instantiate a rule; missing parameters are drawn from ``seed``."""
    entry = _lookup(RULES, name, "rule")
    return _instantiate(entry, d, _fill(entry, d, params, seed), flipped)


def build_lemma(name: str, d: int, params: dict | None = None, *, flipped: bool = False,
                seed: int = 0) -> RuleInstance:
    entry = _lookup(LEMMAS, name, "lemma")
    return _instantiate(entry, d, _fill(entry, d, params, seed), flipped)


def _rng(seed: int, name: str, d: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode()), d, trial])


def _fill(entry: Entry, d: int, params: dict | None, seed: int, trial: int = 2) -> dict:
    drawn = entry.sample(_rng(seed, entry.name, d, trial), d, trial)
    drawn.update(params or {})
    return drawn


# -- verification -------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    name: str
    d: int
    params: dict
    passed: bool
    max_dev: float
    status: str  # "pass", "fail" or "inconclusive"
    relation: str = EQ
    message: str = ""


def verify_rule(r: RuleInstance, tol: float = 1e-10, cap: int | None = None) -> Verdict:
    """Interpret both sides and compare.

    Equalities pass when the normalised deviation is at most ``tol``.  The
    horizontal-wire lemma at d >= 3 passes when the two sides differ by at
    least ``INEQUALITY_MARGIN`` in absolute terms.  A side that cannot be
    contracted under the cap gives an inconclusive verdict, never a pass.
    """
    try:
        A = interpret(r.lhs, cap=cap)
        B = interpret(r.rhs, cap=cap)
    except ContractionCapError as exc:
        return Verdict(r.name, r.d, r.params, False, float("nan"), "inconclusive",
                       r.relation, str(exc))
    if r.expects_equal():
        dev = deviation(A, B)
        ok = dev <= tol
    else:
        if A.axis_dims != B.axis_dims:
            dev = float("inf")
        else:
            dev = float(np.max(np.abs(A.data - B.data))) if A.data.size else 0.0
        ok = dev >= max(INEQUALITY_MARGIN, tol)
    return Verdict(r.name, r.d, r.params, bool(ok), float(dev), "pass" if ok else "fail",
                   r.relation)


@dataclass
class VerificationReport:
    verdicts: list = field(default_factory=list)

    @property
    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "inconclusive": 0}
        for v in self.verdicts:
            out[v.status] += 1
        return out

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def max_dev(self) -> float:
        devs = [v.max_dev for v in self.verdicts if v.relation == EQ or v.d == 2]
        return max(devs, default=0.0)

    def to_dict(self) -> dict:
        return {"summary": {**self.counts, "total": len(self.verdicts)},
                "results": [{"name": v.name, "d": v.d, "params": jsonable(v.params),
                             "max_dev": v.max_dev, "status": v.status,
                             "relation": v.relation, "message": v.message}
                            for v in self.verdicts]}

    def table(self) -> str:
        rows = [f"{'rule':<22} {'d':>2} {'max_dev':>10}  status"]
        for v in self.verdicts:
            rows.append(f"{v.name:<22} {v.d:>2} {v.max_dev:>10.2e}  {v.status}")
        c = self.counts
        rows.append(f"{c['pass']} passed, {c['fail']} failed, "
                    f"{c['inconclusive']} inconclusive")
        return "\n".join(rows)


def jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def verify_all(d_range, seed: int = 0, trials_per_rule: int = 5, kind: str = "rules",
               tol: float = 1e-10, flipped: bool = False, names=None,
               cap: int | None = None) -> VerificationReport:
    """Sweep a registry over ``d_range`` with ``trials_per_rule`` draws each.

    Results are ordered by registry order, then d, then trial.
    """
    table = {"rules": RULES, "lemmas": LEMMAS}[kind]
    report = VerificationReport()
    for name, entry in table.items():
        if names is not None and name not in names:
            continue
        for d in d_range:
            for trial in range(trials_per_rule):
                params = entry.sample(_rng(seed, name, d, trial), d, trial)
                r = _instantiate(entry, d, params, flipped)
                report.verdicts.append(verify_rule(r, tol, cap))
    return report
