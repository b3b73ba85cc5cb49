"""Random diagram generator shared by the tests, the acceptance run and demos."""
from __future__ import annotations

import numpy as np

from .diagram import (H, H_DAG, TRIANGLE, TRIANGLE_INV, W, X, Z, Diagram, Edge, k_phase,
                      make_node, ones)

_KINDS = (Z, Z, Z, X, X, X, H, H_DAG, TRIANGLE, TRIANGLE_INV, W)


def _random_phase(rng, d):
    style = rng.integers(4)
    if style == 0:
        return ones(d), None
    if style == 1:
        j = int(rng.integers(d))
        return k_phase(j, d), j
    if style == 2:
        return tuple(complex(z) for z in np.exp(2j * np.pi * rng.random(d - 1))), None
    return tuple(complex(z) for z in rng.normal(size=d - 1) + 1j * rng.normal(size=d - 1)), None


def random_diagram(rng: np.random.Generator, max_nodes: int = 10, d: int | None = None,
                   max_boundary: int = 5, max_arity: int = 4) -> Diagram:
    """Well-formed random diagram on a single wire dimension.

    Ports are paired at random, so parallel edges, self-loops and closed
    components all occur; the leftover ports become boundary slots (at most
    ``max_boundary``, any excess is closed off pairwise).
    """
    d = int(rng.integers(2, 5)) if d is None else d
    n = int(rng.integers(1, max_nodes + 1))
    nodes = {}
    for nid in range(n):
        kind = _KINDS[rng.integers(len(_KINDS))]
        if kind in (H, H_DAG, TRIANGLE, TRIANGLE_INV):
            nodes[nid] = make_node(kind, d)
            continue
        arity = int(rng.integers(0 if kind != W else 1, max_arity + 1))
        n_in = int(rng.integers(0, arity + 1))
        if kind == W and arity - n_in == 0 and n_in == 0:
            n_in = 1
        if kind == Z:
            phase, label = _random_phase(rng, d)
            nodes[nid] = make_node(Z, d, n_in, arity - n_in, phase=phase, label=label)
        elif kind == X:
            nodes[nid] = make_node(X, d, n_in, arity - n_in, label=int(rng.integers(d)))
        else:
            nodes[nid] = make_node(W, d, n_in, max(arity - n_in, 0))
    ports = [(nid, p) for nid, node in nodes.items() for p in range(node.arity)]
    rng.shuffle(ports)
    n_free = int(rng.integers(0, min(max_boundary, len(ports)) + 1))
    if (len(ports) - n_free) % 2:
        n_free = n_free - 1 if n_free > 0 else n_free + 1
    n_free = min(n_free, len(ports))
    free, paired = ports[:n_free], ports[n_free:]
    edges = [Edge(tuple(paired[k]), tuple(paired[k + 1]), d) for k in range(0, len(paired), 2)]
    n_out = int(rng.integers(0, len(free) + 1))
    for k, port in enumerate(free):
        end = ("out", k) if k < n_out else ("in", k - n_out)
        edges.append(Edge(tuple(port), end, d))
    return Diagram(nodes, tuple(edges), (d,) * (len(free) - n_out), (d,) * n_out)
