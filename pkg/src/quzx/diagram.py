"""Open string diagrams with dimension-labelled wires.

A :class:`Diagram` is an immutable multigraph of generator nodes.  Every node
port and every boundary slot is the end of exactly one edge.  Identity wires,
swaps, caps and cups are not nodes: an edge from an input slot to an output
slot is an identity, an edge between two output slots is a cap, and so on.

Node ports are numbered outputs first, then inputs, which is also the axis
order of the node's tensor.  Endpoints are either ``(node_id, port)`` or a
boundary slot ``("in", k)`` / ``("out", k)``.
"""
from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

Z = "Z"
X = "X"
H = "H"
H_DAG = "H_dag"
TRIANGLE = "triangle"
TRIANGLE_INV = "triangle_inv"
W = "W"
BINDER = "binder"
SPLITTER = "splitter"

KINDS = (Z, X, H, H_DAG, TRIANGLE, TRIANGLE_INV, W, BINDER, SPLITTER)
ONE_TO_ONE = (H, H_DAG, TRIANGLE, TRIANGLE_INV)

PHASE_ATOL = 1e-12


class DiagramError(ValueError):
    """Illegal generator parameters or incompatible composition."""


# -- phase vectors -----------------------------------------------------------
# A phase vector is a tuple (a_1, ..., a_{d-1}); a_0 = 1 is implicit.

def k_phase(j: int, d: int) -> tuple:
    """Root-of-unity phase K_j = (xi^j, xi^2j, ...), xi = exp(2 pi i / d)."""
    return tuple(_root(k * j, d) for k in range(1, d))


def _root(n: int, d: int) -> complex:
    # reduce the exponent first so that e.g. xi^d is exactly 1
    n %= d
    if 4 * n == d:
        return 1j
    if 2 * n == d:
        return -1.0 + 0j
    if 4 * n == 3 * d:
        return -1j
    if n == 0:
        return 1.0 + 0j
    return cmath.exp(2j * math.pi * n / d)


def ones(d: int) -> tuple:
    return (1.0 + 0j,) * (d - 1)


def zeros(d: int) -> tuple:
    return (0j,) * (d - 1)


def const_phase(c: complex, d: int) -> tuple:
    return (complex(c),) * (d - 1)


def last_phase(c: complex, d: int, rest: complex = 0) -> tuple:
    """(rest, ..., rest, c)."""
    return (complex(rest),) * (d - 2) + (complex(c),)


def s_phase(d: int) -> tuple:
    """The phase whose 0-legged Z spider evaluates to 1/d."""
    return last_phase(1 / d - 1, d)


def tau_values(d: int) -> list:
    """tau_k = k pi + k^2 pi / d for k = 0 .. d-1 (tau_0 = 0)."""
    return [k * math.pi + k * k * math.pi / d for k in range(d)]


def tau_phase(d: int) -> tuple:
    return tuple(cmath.exp(1j * t) for t in tau_values(d)[1:])


def v_phase(j: int, d: int) -> tuple:
    """V_j: a single 1 at position d - j (1-indexed), zeros elsewhere."""
    if not 1 <= j <= d - 1:
        raise DiagramError(f"V_j needs 1 <= j <= d-1, got j={j}, d={d}")
    vec = [0j] * (d - 1)
    vec[d - j - 1] = 1.0 + 0j
    return tuple(vec)


def phase_entry(phase: Sequence[complex], k: int, d: int) -> complex:
    """a_k with a_0 = a_d = 1 and the index taken mod d."""
    k %= d
    return 1.0 + 0j if k == 0 else complex(phase[k - 1])


def k_label(phase: Sequence[complex], d: int, atol: float = PHASE_ATOL):
    """Return j if ``phase`` equals K_j within ``atol``, else None."""
    if len(phase) != d - 1:
        return None
    if d == 1:
        return 0
    # a_1 pins j down
    a1 = complex(phase[0])
    j = round(cmath.phase(a1) * d / (2 * math.pi)) % d
    ref = k_phase(j, d)
    if all(abs(complex(p) - r) <= atol for p, r in zip(phase, ref)):
        return j
    return None


# -- nodes --------------------------------------------------------------------

@dataclass(frozen=True)
class Node:
    """One generator instance.

    ``d`` is the wire dimension of every leg, except for binder/splitter where
    ``s`` and ``t`` give the factor dimensions and ``d == s * t``.  For Z
    spiders ``label`` optionally records that the phase is K_label; for X
    spiders it is the K_j label itself.
    """

    kind: str
    d: int
    n_in: int
    n_out: int
    phase: tuple = ()
    label: int | None = None
    s: int = 0
    t: int = 0
    tag: str = ""

    @property
    def arity(self) -> int:
        return self.n_in + self.n_out

    def is_output(self, port: int) -> bool:
        return port < self.n_out

    def out_port(self, k: int) -> int:
        return k

    def in_port(self, k: int) -> int:
        return self.n_out + k

    def port_dims(self) -> tuple:
        if self.kind == BINDER:
            return (self.s * self.t, self.s, self.t)
        if self.kind == SPLITTER:
            return (self.s, self.t, self.s * self.t)
        return (self.d,) * self.arity

    def port_dim(self, port: int) -> int:
        return self.port_dims()[port]


def make_node(kind: str, d: int = 0, n_in: int = 1, n_out: int = 1, *,
              phase=None, label=None, s: int = 0, t: int = 0,
              tag: str = "") -> Node:
    """Validated :class:`Node` constructor."""
    if kind not in KINDS:
        raise DiagramError(f"unknown generator kind {kind!r}")
    if n_in < 0 or n_out < 0:
        raise DiagramError("negative arity")
    if kind in (BINDER, SPLITTER):
        if s < 1 or t < 1:
            raise DiagramError(f"{kind} needs s, t >= 1, got s={s}, t={t}")
        want = (2, 1) if kind == BINDER else (1, 2)
        if (n_in, n_out) != want:
            raise DiagramError(f"{kind} is {want[0]}->{want[1]}, got {n_in}->{n_out}")
        return Node(kind, s * t, n_in, n_out, s=s, t=t, tag=tag)
    if d < 2:
        raise DiagramError(f"{kind} needs d >= 2, got d={d}")
    if kind in ONE_TO_ONE and (n_in, n_out) != (1, 1):
        raise DiagramError(f"{kind} is 1->1, got {n_in}->{n_out}")
    if kind == Z:
        if phase is None:
            if label is None:
                raise DiagramError("Z spider needs a phase vector or a K label")
            phase = k_phase(label, d)
        phase = tuple(complex(p) for p in phase)
        if len(phase) != d - 1:
            raise DiagramError(f"phase vector length {len(phase)} != d-1 = {d - 1}")
        if not all(math.isfinite(p.real) and math.isfinite(p.imag) for p in phase):
            raise DiagramError("non-finite phase entry")
        if label is not None:
            label %= d
            ref = k_phase(label, d)
            if any(abs(p - r) > PHASE_ATOL for p, r in zip(phase, ref)):
                raise DiagramError(f"phase does not match K_{label}")
        return Node(Z, d, n_in, n_out, phase=phase, label=label, tag=tag)
    if kind == X:
        if label is None:
            raise DiagramError("X spider needs an integer label j")
        return Node(X, d, n_in, n_out, label=int(label) % d, tag=tag)
    return Node(kind, d, n_in, n_out, tag=tag)


# -- diagrams -----------------------------------------------------------------

class Edge(NamedTuple):
    a: tuple
    b: tuple
    dim: int


def in_slot(k: int) -> tuple:
    return ("in", k)


def out_slot(k: int) -> tuple:
    return ("out", k)


def is_boundary(e: tuple) -> bool:
    return isinstance(e[0], str)


@dataclass(frozen=True, eq=False)
class Diagram:
    """Immutable open diagram.  Treat ``nodes`` as read-only."""

    nodes: dict = field(default_factory=dict)
    edges: tuple = ()
    inputs: tuple = ()
    outputs: tuple = ()
    scalar: complex = 1.0 + 0j

    @property
    def n_in(self) -> int:
        return len(self.inputs)

    @property
    def n_out(self) -> int:
        return len(self.outputs)

    def signature(self) -> tuple:
        return (self.inputs, self.outputs)

    def endpoint_dim(self, e: tuple) -> int:
        if e[0] == "in":
            return self.inputs[e[1]]
        if e[0] == "out":
            return self.outputs[e[1]]
        return self.nodes[e[0]].port_dim(e[1])

    def incidence(self) -> dict:
        """endpoint -> edge index."""
        inc = {}
        for i, e in enumerate(self.edges):
            inc[e.a] = i
            inc[e.b] = i
        return inc

    def other_end(self, edge_index: int, end: tuple) -> tuple:
        e = self.edges[edge_index]
        return e.b if e.a == end else e.a

    def next_id(self) -> int:
        return max(self.nodes, default=-1) + 1

    def __rshift__(self, other: "Diagram") -> "Diagram":
        return compose_seq(self, other)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return compose_par(self, other)

    def __repr__(self) -> str:
        return (f"Diagram({len(self.nodes)} nodes, {len(self.edges)} edges, "
                f"{list(self.inputs)} -> {list(self.outputs)}, scalar={self.scalar})")

    def same_as(self, other: "Diagram") -> bool:
        """Exact structural equality (same ids, same edge list)."""
        return (self.nodes == other.nodes and self.edges == other.edges
                and self.inputs == other.inputs and self.outputs == other.outputs
                and self.scalar == other.scalar)


class Builder:
    """Mutable helper for wiring up a :class:`Diagram` by hand."""

    def __init__(self):
        self.nodes: dict = {}
        self.edges: list = []
        self.inputs: list = []
        self.outputs: list = []
        self.scalar = 1.0 + 0j

    def add(self, kind: str, d: int = 0, n_in: int = 1, n_out: int = 1, **kw) -> int:
        nid = len(self.nodes)
        self.nodes[nid] = make_node(kind, d, n_in, n_out, **kw)
        return nid

    def out(self, nid: int, k: int = 0) -> tuple:
        node = self.nodes[nid]
        if not 0 <= k < node.n_out:
            raise DiagramError(f"node {nid} has no output {k}")
        return (nid, k)

    def inp(self, nid: int, k: int = 0) -> tuple:
        node = self.nodes[nid]
        if not 0 <= k < node.n_in:
            raise DiagramError(f"node {nid} has no input {k}")
        return (nid, node.n_out + k)

    def input(self, dim: int) -> tuple:
        self.inputs.append(dim)
        return ("in", len(self.inputs) - 1)

    def output(self, dim: int) -> tuple:
        self.outputs.append(dim)
        return ("out", len(self.outputs) - 1)

    def _dim(self, e: tuple):
        if e[0] == "in":
            return self.inputs[e[1]]
        if e[0] == "out":
            return self.outputs[e[1]]
        return self.nodes[e[0]].port_dim(e[1])

    def wire(self, a: tuple, b: tuple) -> None:
        da, db = self._dim(a), self._dim(b)
        if da != db:
            raise DiagramError(f"dimension mismatch wiring {a} ({da}) to {b} ({db})")
        self.edges.append(Edge(a, b, da))

    def build(self) -> Diagram:
        return Diagram(dict(self.nodes), tuple(self.edges), tuple(self.inputs),
                       tuple(self.outputs), complex(self.scalar))


# -- constructors -------------------------------------------------------------

def new_generator(kind: str, d: int = 0, n_in: int = 1, n_out: int = 1, **kw) -> Diagram:
    """Single-node diagram with its ports wired to boundary slots in order."""
    node = make_node(kind, d, n_in, n_out, **kw)
    dims = node.port_dims()
    edges = [Edge((0, k), ("out", k), dims[k]) for k in range(node.n_out)]
    edges += [Edge((0, node.n_out + k), ("in", k), dims[node.n_out + k])
              for k in range(node.n_in)]
    return Diagram({0: node}, tuple(edges), dims[node.n_out:], dims[:node.n_out])


def empty(scalar: complex = 1) -> Diagram:
    return Diagram(scalar=complex(scalar))


def identity(dims) -> Diagram:
    if isinstance(dims, int):
        dims = (dims,)
    dims = tuple(dims)
    edges = tuple(Edge(("in", k), ("out", k), dim) for k, dim in enumerate(dims))
    return Diagram({}, edges, dims, dims)


def permutation(dims: Sequence[int], perm: Sequence[int]) -> Diagram:
    """Wiring that sends input k to output perm[k]."""
    dims = tuple(dims)
    if sorted(perm) != list(range(len(dims))):
        raise DiagramError(f"not a permutation: {perm}")
    out_dims = [0] * len(dims)
    edges = []
    for k, p in enumerate(perm):
        out_dims[p] = dims[k]
        edges.append(Edge(("in", k), ("out", p), dims[k]))
    return Diagram({}, tuple(edges), dims, tuple(out_dims))


def swap(d1: int, d2: int | None = None) -> Diagram:
    return permutation((d1, d1 if d2 is None else d2), (1, 0))


def cap(d: int) -> Diagram:
    """0 -> 2 wiring, interpreted as sum_j |jj>."""
    return Diagram({}, (Edge(("out", 0), ("out", 1), d),), (), (d, d))


def cup(d: int) -> Diagram:
    """2 -> 0 wiring, interpreted as sum_j <jj|."""
    return Diagram({}, (Edge(("in", 0), ("in", 1), d),), (d, d), ())


# -- composition --------------------------------------------------------------

def _shift(e: tuple, offset: int, in_off: int = 0, out_off: int = 0) -> tuple:
    if e[0] == "in":
        return ("in", e[1] + in_off)
    if e[0] == "out":
        return ("out", e[1] + out_off)
    return (e[0] + offset, e[1])


def _splice(edges: list, is_glue) -> tuple:
    """Resolve chains of edges through glue points.

    Every glue endpoint occurs in exactly two edge ends.  Returns the merged
    edge list and the product of dimensions of closed loops made only of glue.
    """
    at = defaultdict(list)
    for i, (a, b, _) in enumerate(edges):
        if is_glue(a):
            at[a].append((i, 0))
        if is_glue(b):
            at[b].append((i, 1))
    used = [False] * len(edges)
    merged = []
    for i, (a, b, dim) in enumerate(edges):
        if used[i] or (is_glue(a) and is_glue(b)):
            continue
        used[i] = True
        start, side = (a, 1) if not is_glue(a) else (b, 0)
        j = i
        far = edges[j][side]
        while is_glue(far):
            (j1, s1), (j2, s2) = at[far]
            j, s = (j2, s2) if (j1, s1) == (j, side) else (j1, s1)
            if edges[j].dim != dim:
                raise DiagramError("dimension mismatch across glued boundary")
            used[j] = True
            side = 1 - s
            far = edges[j][side]
        merged.append(Edge(start, far, dim))
    loops = 1
    for i, e in enumerate(edges):
        if used[i]:
            continue
        # a closed loop of glue edges
        loops *= e.dim
        used[i] = True
        side, j = 1, i
        far = e.b
        while True:
            (j1, s1), (j2, s2) = at[far]
            j, s = (j2, s2) if (j1, s1) == (j, side) else (j1, s1)
            if j == i:
                break
            used[j] = True
            side = 1 - s
            far = edges[j][side]
    return merged, loops


def compose_seq(first: Diagram, then_: Diagram) -> Diagram:
    """Plug the outputs of ``first`` into the inputs of ``then_``."""
    if first.outputs != then_.inputs:
        raise DiagramError(
            f"cannot compose: outputs {list(first.outputs)} vs inputs {list(then_.inputs)}")
    offset = first.next_id()
    nodes = dict(first.nodes)
    for nid, node in then_.nodes.items():
        nodes[nid + offset] = node

    def glue_first(e):
        return ("g", e[1]) if e[0] == "out" else e

    def glue_then(e):
        if e[0] == "in":
            return ("g", e[1])
        return _shift(e, offset)

    edges = [Edge(glue_first(e.a), glue_first(e.b), e.dim) for e in first.edges]
    edges += [Edge(glue_then(e.a), glue_then(e.b), e.dim) for e in then_.edges]
    merged, loops = _splice(edges, lambda e: e[0] == "g")
    return Diagram(nodes, tuple(merged), first.inputs, then_.outputs,
                   first.scalar * then_.scalar * loops)


def compose_par(left: Diagram, right: Diagram) -> Diagram:
    """Side-by-side composition; left boundaries come first."""
    offset = left.next_id()
    nodes = dict(left.nodes)
    for nid, node in right.nodes.items():
        nodes[nid + offset] = node
    n_in, n_out = len(left.inputs), len(left.outputs)
    edges = list(left.edges)
    edges += [Edge(_shift(e.a, offset, n_in, n_out), _shift(e.b, offset, n_in, n_out), e.dim)
              for e in right.edges]
    return Diagram(nodes, tuple(edges), left.inputs + right.inputs,
                   left.outputs + right.outputs, left.scalar * right.scalar)


def tensor_all(diagrams: Sequence[Diagram]) -> Diagram:
    result = empty()
    for dg in diagrams:
        result = compose_par(result, dg)
    return result


def seq_all(diagrams: Sequence[Diagram]) -> Diagram:
    result = diagrams[0]
    for dg in diagrams[1:]:
        result = compose_seq(result, dg)
    return result


def scaled(D: Diagram, c: complex) -> Diagram:
    return replace(D, scalar=D.scalar * c)


def transpose(D: Diagram) -> Diagram:
    """Bend every wire: inputs become outputs in reversed order and vice versa."""
    n_in, n_out = len(D.inputs), len(D.outputs)

    def flip(e):
        if e[0] == "in":
            return ("out", n_in - 1 - e[1])
        if e[0] == "out":
            return ("in", n_out - 1 - e[1])
        return e

    edges = tuple(Edge(flip(e.a), flip(e.b), e.dim) for e in D.edges)
    return Diagram(dict(D.nodes), edges, tuple(reversed(D.outputs)),
                   tuple(reversed(D.inputs)), D.scalar)


def _conj_node(node: Node) -> Node:
    if node.kind == Z:
        label = None if node.label is None else (-node.label) % node.d
        return replace(node, phase=tuple(p.conjugate() for p in node.phase), label=label)
    if node.kind == H:
        return replace(node, kind=H_DAG)
    if node.kind == H_DAG:
        return replace(node, kind=H)
    return node


def adjoint(D: Diagram) -> Diagram:
    """Transpose plus entrywise conjugation of every node and the scalar."""
    T = transpose(D)
    nodes = {nid: _conj_node(node) for nid, node in T.nodes.items()}
    return Diagram(nodes, T.edges, T.inputs, T.outputs, complex(D.scalar).conjugate())


def bend_output(D: Diagram, k: int) -> Diagram:
    """Turn output slot ``k`` into a new last input slot (a cup with an identity)."""
    dim = D.outputs[k]

    def move(e):
        if e[0] == "out":
            if e[1] == k:
                return ("in", len(D.inputs))
            return ("out", e[1] - (e[1] > k))
        return e

    edges = tuple(Edge(move(e.a), move(e.b), e.dim) for e in D.edges)
    outs = D.outputs[:k] + D.outputs[k + 1:]
    return Diagram(dict(D.nodes), edges, D.inputs + (dim,), outs, D.scalar)


def relabel(D: Diagram) -> Diagram:
    """Renumber node ids to 0..n-1 in increasing order of the old ids."""
    mapping = {old: new for new, old in enumerate(sorted(D.nodes))}
    nodes = {mapping[k]: v for k, v in D.nodes.items()}

    def m(e):
        return e if is_boundary(e) else (mapping[e[0]], e[1])

    edges = tuple(Edge(m(e.a), m(e.b), e.dim) for e in D.edges)
    return Diagram(nodes, edges, D.inputs, D.outputs, D.scalar)


# -- validation ---------------------------------------------------------------

def validate(D: Diagram) -> list:
    """List of invariant violations; empty iff ``D`` is well formed."""
    problems = []
    for nid, node in D.nodes.items():
        try:
            make_node(node.kind, node.d, node.n_in, node.n_out,
                      phase=node.phase if node.kind == Z else None,
                      label=node.label, s=node.s, t=node.t)
        except DiagramError as exc:
            problems.append(f"node {nid}: {exc}")
    seen = defaultdict(int)
    for i, e in enumerate(D.edges):
        for end in (e.a, e.b):
            seen[end] += 1
            try:
                dim = D.endpoint_dim(end)
            except (KeyError, IndexError):
                problems.append(f"edge {i}: endpoint {end} does not exist")
                continue
            if dim != e.dim:
                problems.append(f"edge {i}: dimension {e.dim} does not match "
                                f"endpoint {end} of dimension {dim}")
        if e.dim < 1:
            problems.append(f"edge {i}: dimension {e.dim} < 1")
    expected = []
    for nid, node in D.nodes.items():
        expected += [(nid, p) for p in range(node.arity)]
    expected += [("in", k) for k in range(len(D.inputs))]
    expected += [("out", k) for k in range(len(D.outputs))]
    for end in expected:
        n = seen.get(end, 0)
        if n == 0:
            problems.append(f"arity: {_describe(end)} is dangling")
        elif n > 1:
            problems.append(f"arity: {_describe(end)} is used by {n} edge ends")
    if not (math.isfinite(complex(D.scalar).real) and math.isfinite(complex(D.scalar).imag)):
        problems.append("scalar is not finite")
    return problems


def _describe(end: tuple) -> str:
    if end[0] == "in":
        return f"input slot {end[1]}"
    if end[0] == "out":
        return f"output slot {end[1]}"
    return f"node {end[0]} port {end[1]}"
