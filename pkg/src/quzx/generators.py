"""Short constructors for single generators and common gadgets."""
from __future__ import annotations

from .diagram import (BINDER, H, H_DAG, SPLITTER, TRIANGLE, TRIANGLE_INV, W, X, Z,
                      Builder, Diagram, compose_par, compose_seq, empty, last_phase,
                      new_generator, ones, tensor_all)


def zs(phase, n_in: int, n_out: int, d: int | None = None, label=None) -> Diagram:
    d = len(phase) + 1 if d is None else d
    return new_generator(Z, d, n_in, n_out, phase=phase, label=label)


def zk(j: int, n_in: int, n_out: int, d: int) -> Diagram:
    """Z spider with phase K_j."""
    return new_generator(Z, d, n_in, n_out, label=j)


def zplain(n_in: int, n_out: int, d: int) -> Diagram:
    return zs(ones(d), n_in, n_out, d)


def xs(j: int, n_in: int, n_out: int, d: int) -> Diagram:
    return new_generator(X, d, n_in, n_out, label=j)


def had(d: int) -> Diagram:
    return new_generator(H, d)


def had_dag(d: int) -> Diagram:
    return new_generator(H_DAG, d)


def tri(d: int) -> Diagram:
    return new_generator(TRIANGLE, d)


def tri_inv(d: int) -> Diagram:
    return new_generator(TRIANGLE_INV, d)


def ws(n_in: int, n_out: int, d: int) -> Diagram:
    return new_generator(W, d, n_in, n_out)


def binder(s: int, t: int) -> Diagram:
    return new_generator(BINDER, s=s, t=t, n_in=2, n_out=1)


def splitter(s: int, t: int) -> Diagram:
    return new_generator(SPLITTER, s=s, t=t, n_in=1, n_out=2)


def scalar_gadget(c: complex, d: int = 2) -> Diagram:
    """0-legged Z spider with value c (phase (0, ..., 0, c - 1))."""
    return zs(last_phase(complex(c) - 1, d), 0, 0, d)


def power(D: Diagram, n: int) -> Diagram:
    return tensor_all([D] * n) if n else empty()


def antipode(d: int) -> Diagram:
    """|x> -> |-x mod d>, an X(K_0) 0->2 spider with one leg bent to an input."""
    b = Builder()
    x = b.add(X, d, 0, 2, label=0)
    b.wire(b.input(d), b.out(x, 0))
    b.wire(b.out(x, 1), b.output(d))
    return b.build()


def red_phase(phase, d: int) -> Diagram:
    """Red phase gate (1/d) H diag(1, phase) H^dagger."""
    return compose_par(compose_seq(compose_seq(had_dag(d), zs(phase, 1, 1, d)), had(d)),
                       zs(last_phase(1 / d - 1, d), 0, 0, d))
