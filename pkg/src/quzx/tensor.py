"""Standard interpretation of diagrams as dense complex tensors.

Generators are evaluated from their closed-form formulas.  Whole diagrams are
evaluated by pairwise contraction of a factor network in which

* every Z spider becomes a single shared index plus a weight vector
  (Z spiders are diagonal, so all their legs carry the same value);
* X and W spiders with many legs are split into chains of 3-leg factors;
* everything else is a small dense tensor.

Contraction order is chosen greedily by smallest intermediate size.
"""
from __future__ import annotations

import heapq
import math
import os
import random
from collections import Counter, OrderedDict, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .diagram import (BINDER, H, H_DAG, SPLITTER, TRIANGLE, TRIANGLE_INV, W, X, Z,
                      Diagram, DiagramError, Node, validate)

DEFAULT_CAP = 2 ** 24
# dense factors above this many entries are split into chains (X and W only)
DENSE_LIMIT = 4096


def default_cap() -> int:
    env = os.environ.get("QUZX_CAP")
    return int(env) if env else DEFAULT_CAP


class ContractionCapError(RuntimeError):
    """A contraction step would exceed the configured element cap."""

    def __init__(self, message: str, size: int, cap: int):
        super().__init__(message)
        self.size = size
        self.cap = cap


@dataclass
class DenseTensor:
    """Dense tensor with axes ordered outputs first, then inputs."""

    data: np.ndarray
    n_out: int

    @property
    def axis_dims(self) -> tuple:
        return tuple(self.data.shape)

    @property
    def n_in(self) -> int:
        return self.data.ndim - self.n_out

    def matrix(self) -> np.ndarray:
        rows = math.prod(self.data.shape[:self.n_out])
        return self.data.reshape(rows, -1)


# -- generator formulas -------------------------------------------------------

def _omega_table(d: int) -> np.ndarray:
    k = np.arange(d)
    return np.exp(2j * np.pi * (np.outer(k, k) % d) / d)


def _leg_sums(dims_sign, d):
    """Broadcast sum of sign * index over legs, as an integer array."""
    total = np.zeros((), dtype=np.int64)
    for sign in dims_sign:
        total = np.add.outer(total, sign * np.arange(d))
    return total


def _w_counts(n: int, d: int):
    """(number of nonzero legs, sum of leg values) broadcast over n legs."""
    idx = np.arange(d)
    cnt = np.zeros((), dtype=np.int64)
    val = np.zeros((), dtype=np.int64)
    for _ in range(n):
        cnt = np.add.outer(cnt, (idx != 0).astype(np.int64))
        val = np.add.outer(val, idx)
    return cnt, val


def interpret_node(node: Node) -> np.ndarray:
    """Tensor of one generator, axes ordered as the node's ports."""
    d, n_in, n_out = node.d, node.n_in, node.n_out
    kind = node.kind
    if kind == Z:
        weights = np.concatenate([[1.0 + 0j], np.asarray(node.phase, dtype=complex)])
        n = n_in + n_out
        if n == 0:
            return np.array(weights.sum())
        out = np.zeros((d,) * n, dtype=complex)
        idx = np.arange(d)
        out[(idx,) * n] = weights
        return out
    if kind == X:
        sums = _leg_sums([1] * n_out + [-1] * n_in, d)
        return ((sums + node.label) % d == 0).astype(complex)
    if kind == H:
        return _omega_table(d)
    if kind == H_DAG:
        return _omega_table(d).conj()
    if kind in (TRIANGLE, TRIANGLE_INV):
        out = np.eye(d, dtype=complex)
        out[0, 1:] = 1 if kind == TRIANGLE else -1
        return out
    if kind == W:
        c_out, v_out = _w_counts(n_out, d)
        c_in, v_in = _w_counts(n_in, d)
        ok_out = (c_out <= 1)
        ok_in = (c_in <= 1)
        match = np.equal.outer(v_out, v_in)
        return (np.multiply.outer(ok_out, ok_in) & match).astype(complex)
    if kind == BINDER:
        s, t = node.s, node.t
        out = np.zeros((s * t, s, t), dtype=complex)
        k, l = np.meshgrid(np.arange(s), np.arange(t), indexing="ij")
        out[k * t + l, k, l] = 1
        return out
    if kind == SPLITTER:
        s, t = node.s, node.t
        out = np.zeros((s, t, s * t), dtype=complex)
        k = np.arange(s * t)
        out[k // t, k % t, k] = 1
        return out
    raise DiagramError(f"unknown kind {kind!r}")


def interpret_kind(kind: str, d: int = 0, n_in: int = 1, n_out: int = 1, **kw) -> DenseTensor:
    from .diagram import make_node
    node = make_node(kind, d, n_in, n_out, **kw)
    return DenseTensor(interpret_node(node), node.n_out)


# -- factor network -----------------------------------------------------------

@dataclass
class _Factor:
    labels: tuple
    make: object  # zero-argument callable producing the array
    origin: int   # node id it came from, -1 for boundary helpers


@dataclass
class _Network:
    factors: list
    dims: dict
    out_labels: tuple


class _Labels:
    def __init__(self):
        self.dims = {}

    def new(self, dim: int) -> int:
        lab = len(self.dims)
        self.dims[lab] = dim
        return lab


def _const(arr):
    return lambda: arr


@lru_cache(maxsize=None)
def _x_link(d: int, arity: int, sign: int, j: int = 0) -> np.ndarray:
    """Shared read-only pieces of an X chain; chains reuse them across nodes."""
    idx = np.arange(d)
    if arity == 2 and j is None:
        arr = np.subtract.outer(idx, sign * idx) % d == 0
    elif arity == 2:
        arr = (idx[:, None] + sign * idx[None, :] + j) % d == 0
    else:
        arr = (idx[:, None, None] - idx[None, :, None] - sign * idx[None, None, :]) % d == 0
    arr = arr.astype(complex)
    arr.setflags(write=False)
    return arr


def _x_chain(d, signs, legs, j, labels, node_id):
    """Split the congruence sum(sign * leg) + j = 0 (mod d) into 3-leg factors."""
    factors = []
    n = len(legs)
    # carry_k = sum of the first k signed legs
    carry = labels.new(d)
    factors.append(_Factor((carry, legs[0]), _const(_x_link(d, 2, signs[0], None)), node_id))
    for k in range(1, n - 1):
        nxt = labels.new(d)
        factors.append(_Factor((nxt, carry, legs[k]), _const(_x_link(d, 3, signs[k])), node_id))
        carry = nxt
    factors.append(_Factor((carry, legs[-1]), _const(_x_link(d, 2, signs[-1], j % d)), node_id))
    return factors


_W2_CACHE = {}


def _w2(d):
    if d not in _W2_CACHE:
        from .diagram import make_node
        _W2_CACHE[d] = interpret_node(make_node(W, d, 1, 2))
    return _W2_CACHE[d]


def _w_side(d, legs, value, labels, node_id):
    """Factors spreading ``value`` over ``legs`` (W 1->m)."""
    if not legs:
        vec = np.zeros(d, dtype=complex)
        vec[0] = 1
        return [_Factor((value,), _const(vec), node_id)]
    if len(legs) == 1:
        return [_Factor((legs[0], value), _const(np.eye(d, dtype=complex)), node_id)]
    factors = []
    carry = value
    for k, leg in enumerate(legs[:-1]):
        nxt = legs[-1] if k == len(legs) - 2 else labels.new(d)
        factors.append(_Factor((leg, nxt, carry), _const(_w2(d)), node_id))
        carry = nxt
    return factors


def _node_factors(nid, node, legs, labels):
    size = node.d ** node.arity if node.kind in (X, W) else 0
    if node.kind == X and size > DENSE_LIMIT and node.arity >= 3:
        signs = [1] * node.n_out + [-1] * node.n_in
        return _x_chain(node.d, signs, legs, node.label, labels, nid)
    if node.kind == W and size > DENSE_LIMIT:
        value = labels.new(node.d)
        return (_w_side(node.d, legs[:node.n_out], value, labels, nid)
                + _w_side(node.d, legs[node.n_out:], value, labels, nid))
    return [_Factor(tuple(legs), lambda node=node: interpret_node(node), nid)]


def _build_network(D: Diagram) -> _Network:
    labels = _Labels()
    edge_label = [labels.new(e.dim) for e in D.edges]
    parent = list(range(len(edge_label)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    inc = D.incidence()
    factors = []
    # Z spiders identify all their legs
    for nid in sorted(D.nodes):
        node = D.nodes[nid]
        if node.kind != Z:
            continue
        ports = [inc[(nid, p)] for p in range(node.arity)]
        for p in ports[1:]:
            ra, rb = find(ports[0]), find(p)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    for nid in sorted(D.nodes):
        node = D.nodes[nid]
        if node.kind == Z:
            weights = np.concatenate([[1.0 + 0j], np.asarray(node.phase, dtype=complex)])
            if node.arity == 0:
                lab = labels.new(node.d)
            else:
                lab = edge_label[find(inc[(nid, 0)])]
            factors.append(_Factor((lab,), _const(weights), nid))
            continue
        legs = [edge_label[find(inc[(nid, p)])] for p in range(node.arity)]
        factors.extend(_node_factors(nid, node, legs, labels))
    present = set()
    for f in factors:
        present.update(f.labels)
    out_labels = []
    slots = [("out", k) for k in range(len(D.outputs))] + [("in", k) for k in range(len(D.inputs))]
    for slot in slots:
        lab = edge_label[find(inc[slot])]
        if lab in out_labels or lab not in present:
            if lab in out_labels:
                fresh = labels.new(labels.dims[lab])
                eye = np.eye(labels.dims[lab], dtype=complex)
                factors.append(_Factor((fresh, lab), _const(eye), -1))
                present.add(lab)
                lab = fresh
        out_labels.append(lab)
        present.add(lab)
    # labels used only in the output and by no factor (a pure wire between
    # two slots) get an identity factor through the duplicate branch above;
    # a single unmatched slot cannot happen in a valid diagram.
    return _Network(factors, labels.dims, tuple(out_labels))


# -- planning -----------------------------------------------------------------

@dataclass
class ContractionPlan:
    """Pairwise contraction order over the factor network of a diagram.

    ``steps`` holds ``(i, j, summed_labels)`` merges, where new factors are
    numbered after the initial ones, followed by one ``("final", k, summed)``
    step that sums leftover indices and orders the result axes.
    """

    steps: list
    peak: int
    n_factors: int
    _network: _Network = field(repr=False, default=None)


def _size(labels, dims) -> int:
    return math.prod(dims[l] for l in labels)


def _plan(net: _Network, cap: int, rng=None) -> ContractionPlan:
    dims = net.dims
    alive = {i: frozenset(f.labels) for i, f in enumerate(net.factors)}
    count = Counter()
    for labs in alive.values():
        count.update(labs)
    out_set = set(net.out_labels)
    for l in out_set:
        count[l] += 1
    holders = defaultdict(set)
    for i, labs in alive.items():
        for l in labs:
            holders[l].add(i)

    peak = max((_size(l, dims) for l in alive.values()), default=1)
    if peak > cap:
        raise ContractionCapError(f"a single factor has {peak} entries (cap {cap})", peak, cap)

    def merged(i, j):
        li, lj = alive[i], alive[j]
        keep = frozenset(l for l in li | lj if count[l] - (l in li) - (l in lj) > 0)
        return keep, (li | lj) - keep

    def neighbours(i):
        out = set()
        for l in alive[i]:
            out |= holders[l]
        out.discard(i)
        return out

    heap = []
    if rng is None:
        for i in sorted(alive):
            for j in sorted(neighbours(i)):
                if i < j:
                    heap.append((_size(merged(i, j)[0], dims), i, j))
        heapq.heapify(heap)

    steps = []
    next_id = len(net.factors)
    while len(alive) > 1:
        pair = None
        if rng is not None:
            cands = sorted((i, j) for i in alive for j in neighbours(i) if i < j)
            if not cands:
                cands = sorted((i, j) for i in alive for j in alive if i < j)
            pair = cands[rng.randrange(len(cands))]
        else:
            while heap:
                cost, i, j = heapq.heappop(heap)
                if i not in alive or j not in alive:
                    continue
                now = _size(merged(i, j)[0], dims)
                if now != cost:
                    heapq.heappush(heap, (now, i, j))
                    continue
                pair = (i, j)
                break
            if pair is None:
                # disconnected pieces: outer product of the two smallest
                order = sorted(alive, key=lambda k: (_size(alive[k], dims), k))
                pair = tuple(sorted(order[:2]))
        i, j = pair
        keep, summed = merged(i, j)
        size = _size(keep, dims)
        if size > cap:
            raise ContractionCapError(
                f"contraction step {len(steps)} (factors {i}, {j}) needs {size} entries "
                f"(cap {cap})", size, cap)
        peak = max(peak, size)
        for l in alive[i] | alive[j]:
            count[l] -= (l in alive[i]) + (l in alive[j])
            holders[l].discard(i)
            holders[l].discard(j)
        k = next_id
        next_id += 1
        for l in keep:
            count[l] += 1
            holders[l].add(k)
        del alive[i], alive[j]
        alive[k] = keep
        steps.append((i, j, tuple(sorted(summed))))
        if rng is None:
            for n in sorted(neighbours(k)):
                heapq.heappush(heap, (_size(merged(min(k, n), max(k, n))[0], dims),
                                      min(k, n), max(k, n)))
    if alive:
        (k, labs), = alive.items()
        summed = tuple(sorted(labs - out_set))
    else:
        k, summed = -1, ()
    final = _size(net.out_labels, dims)
    if final > cap:
        raise ContractionCapError(f"result tensor has {final} entries (cap {cap})", final, cap)
    peak = max(peak, final)
    steps.append(("final", k, summed))
    return ContractionPlan(steps, peak, len(net.factors), net)


_PLAN_CACHE: "OrderedDict[tuple, list]" = OrderedDict()
_PLAN_CACHE_SIZE = 256


def _structure_key(D: Diagram) -> tuple:
    nodes = tuple((nid, n.kind, n.d, n.n_in, n.n_out, n.s, n.t)
                  for nid, n in sorted(D.nodes.items()))
    return (nodes, D.edges, D.inputs, D.outputs)


def plan_contraction(D: Diagram, cap: int | None = None, rng=None) -> ContractionPlan:
    """Greedy (or, with ``rng``, random) contraction plan for ``D``."""
    cap = default_cap() if cap is None else cap
    net = _build_network(D)
    return _plan(net, cap, rng)


def _cached_plan(D: Diagram, cap: int) -> ContractionPlan:
    key = _structure_key(D)
    hit = _PLAN_CACHE.get(key)
    if hit is not None and hit[0] <= cap:
        _PLAN_CACHE.move_to_end(key)
        steps, peak = hit[1], hit[0]
        net = _build_network(D)
        return ContractionPlan(steps, peak, len(net.factors), net)
    plan = plan_contraction(D, cap)
    _PLAN_CACHE[key] = (plan.peak, plan.steps)
    if len(_PLAN_CACHE) > _PLAN_CACHE_SIZE:
        _PLAN_CACHE.popitem(last=False)
    return plan


def _einsum(ops, out):
    """np.einsum with arbitrary integer labels remapped to the 52-letter range."""
    remap = {}
    args = []
    for arr, labs in ops:
        args += [arr, [remap.setdefault(l, len(remap)) for l in labs]]
    args.append([remap[l] for l in out])
    return np.einsum(*args, optimize=False)


def execute(plan: ContractionPlan) -> np.ndarray:
    net = plan._network
    tensors = {i: (f.make(), f.labels) for i, f in enumerate(net.factors)}
    next_id = len(net.factors)
    result = np.array(1.0 + 0j)
    for step in plan.steps:
        if step[0] == "final":
            k = step[1]
            if k == -1:
                result = np.array(1.0 + 0j)
            else:
                arr, labs = tensors.pop(k)
                result = _einsum([(arr, labs)], net.out_labels)
            break
        i, j, summed = step
        ai, li = tensors.pop(i)
        aj, lj = tensors.pop(j)
        summed = set(summed)
        keep = []
        for l in tuple(li) + tuple(lj):
            if l not in summed and l not in keep:
                keep.append(l)
        tensors[next_id] = (_einsum([(ai, li), (aj, lj)], keep), tuple(keep))
        next_id += 1
    return result


def interpret(D: Diagram, cap: int | None = None, plan: ContractionPlan | None = None,
              check: bool = True) -> DenseTensor:
    """Evaluate ``D``; axes are its outputs then its inputs."""
    if check:
        problems = validate(D)
        if problems:
            raise DiagramError("invalid diagram: " + "; ".join(problems[:5]))
    cap = default_cap() if cap is None else cap
    if plan is None:
        plan = _cached_plan(D, cap)
    data = execute(plan) * D.scalar
    return DenseTensor(np.asarray(data, dtype=complex), len(D.outputs))


def approx_eq(A: DenseTensor, B: DenseTensor, tol: float = 1e-10) -> bool:
    return deviation(A, B) <= tol


def deviation(A: DenseTensor, B: DenseTensor) -> float:
    """max|A - B| / max(1, max|A|, max|B|); infinite on shape mismatch."""
    if A.axis_dims != B.axis_dims or A.n_out != B.n_out:
        return math.inf
    if A.data.size == 0:
        return 0.0
    diff = np.max(np.abs(A.data - B.data))
    scale = max(1.0, float(np.max(np.abs(A.data))), float(np.max(np.abs(B.data))))
    return float(diff / scale)


def random_plan(D: Diagram, seed: int = 0, cap: int | None = None) -> ContractionPlan:
    return plan_contraction(D, cap, rng=random.Random(seed))
