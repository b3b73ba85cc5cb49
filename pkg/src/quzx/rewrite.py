"""Structural simplification with a small sound rule set.

Every automatic rule strictly decreases (node count, edge count), so
:func:`simplify` stops after at most ``len(nodes) + len(edges)`` steps.
Rules are tried in the fixed order of ``CORE_RULES``; within a rule the
site whose lowest node id is smallest goes first.  Each step is recorded as
a :class:`RewriteStep`, and applying the recorded sites again from the
initial diagram rebuilds the final diagram exactly.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .diagram import (H, H_DAG, W, X, Z, Diagram, DiagramError, Edge, Node, is_boundary,
                      k_label)
from .tensor import ContractionCapError, interpret, plan_contraction

CORE_RULES = ("z-fusion", "x-fusion", "hh-dagger-elim", "identity-spider-elim",
              "hopf-disconnect", "colour-change-push", "scalar-fold")

ONE_ATOL = 1e-12


class StaleSiteError(ValueError):
    """The site does not match the diagram it is applied to."""


@dataclass(frozen=True)
class Site:
    rule: str
    nodes: tuple


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    matched: tuple
    removed_nodes: tuple
    added_nodes: tuple
    removed_edges: int
    added_edges: int
    scalar: complex

    def to_dict(self) -> dict:
        rec = asdict(self)
        rec["matched"] = list(self.matched)
        rec["removed_nodes"] = list(self.removed_nodes)
        rec["added_nodes"] = list(self.added_nodes)
        rec["scalar"] = [self.scalar.real, self.scalar.imag]
        return rec

    @classmethod
    def from_dict(cls, rec: dict) -> "RewriteStep":
        return cls(rec["rule"], tuple(rec["matched"]), tuple(rec["removed_nodes"]),
                   tuple(rec["added_nodes"]), int(rec["removed_edges"]),
                   int(rec["added_edges"]), complex(*rec["scalar"]))


class Trace(list):
    """List of steps; ``exhausted`` is True when max_steps cut the run short."""

    exhausted: bool = False

    def to_json(self) -> str:
        return json.dumps({"exhausted": self.exhausted,
                           "steps": [s.to_dict() for s in self]}, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Trace":
        obj = json.loads(text)
        tr = cls(RewriteStep.from_dict(r) for r in obj["steps"])
        tr.exhausted = bool(obj.get("exhausted", False))
        return tr


# -- graph helpers -------------------------------------------------------------

def _ports(D: Diagram, nid: int) -> list:
    """(port, edge index, far endpoint) for every port of ``nid``."""
    inc = D.incidence()
    out = []
    for p in range(D.nodes[nid].arity):
        i = inc[(nid, p)]
        out.append((p, i, D.other_end(i, (nid, p))))
    return out


def _neighbours(D: Diagram) -> dict:
    adj = {nid: set() for nid in D.nodes}
    for e in D.edges:
        if not is_boundary(e.a) and not is_boundary(e.b):
            adj[e.a[0]].add(e.b[0])
            adj[e.b[0]].add(e.a[0])
    return adj


def _is_ones(phase) -> bool:
    return all(abs(complex(p) - 1) <= ONE_ATOL for p in phase)


class _Rewrite:
    """Accumulates one step: dropped edges, endpoint remaps, new edges."""

    def __init__(self, D: Diagram):
        self.D = D
        self.nodes = dict(D.nodes)
        self.drop = set()
        self.remap = {}
        self.extra = []
        self.scalar = 1.0 + 0j
        self.removed = []
        self.added = []

    def remove_node(self, nid):
        del self.nodes[nid]
        self.removed.append(nid)

    def join(self, a, b, dim):
        self.extra.append(Edge(a, b, dim))

    def finish(self, rule, matched) -> tuple:
        edges = []
        for i, e in enumerate(self.D.edges):
            if i in self.drop:
                continue
            edges.append(Edge(self.remap.get(e.a, e.a), self.remap.get(e.b, e.b), e.dim))
        edges.extend(self.extra)
        out = Diagram(self.nodes, tuple(edges), self.D.inputs, self.D.outputs,
                      self.D.scalar * self.scalar)
        step = RewriteStep(rule, tuple(matched), tuple(self.removed), tuple(self.added),
                           len(self.drop), len(self.extra), complex(self.scalar))
        return out, step


def _rebuild_spider(rw: _Rewrite, nid: int, template: Node, legs: list, **changes) -> None:
    """Replace ``nid`` by a spider whose ports are ``legs``.

    ``legs`` lists (old endpoint, is_output); outputs are numbered first.
    """
    outs = [e for e, o in legs if o]
    ins = [e for e, o in legs if not o]
    kw = dict(kind=template.kind, d=template.d, n_in=len(ins), n_out=len(outs),
              phase=template.phase, label=template.label, tag=template.tag)
    kw.update(changes)
    node = Node(**kw)
    for k, e in enumerate(outs + ins):
        rw.remap[e] = (nid, k)
    rw.nodes[nid] = node
    rw.added.append(nid)


# -- matching -------------------------------------------------------------------

def _edges_between(D: Diagram, u: int, v: int) -> list:
    return [i for i, e in enumerate(D.edges)
            if not is_boundary(e.a) and not is_boundary(e.b)
            and {e.a[0], e.b[0]} == {u, v}]


def _self_loops(D: Diagram, u: int) -> list:
    return [i for i, e in enumerate(D.edges)
            if not is_boundary(e.a) and not is_boundary(e.b) and e.a[0] == e.b[0] == u]


def _role(D: Diagram, end: tuple) -> int:
    """+1 for an output port, -1 for an input port."""
    return 1 if D.nodes[end[0]].is_output(end[1]) else -1


def _pair_sites(D: Diagram, kind: str) -> list:
    sites = []
    adj = _neighbours(D)
    for u in sorted(D.nodes):
        nu = D.nodes[u]
        if nu.kind != kind:
            continue
        if kind == Z and _self_loops(D, u):
            sites.append((u,))
        if kind == X and any(_role(D, D.edges[i].a) != _role(D, D.edges[i].b)
                             for i in _self_loops(D, u)):
            sites.append((u,))
        for v in sorted(adj[u]):
            if v > u and D.nodes[v].kind == kind and D.nodes[v].d == nu.d:
                sites.append((u, v))
    return sites


def _hh_sites(D: Diagram) -> list:
    sites = []
    adj = _neighbours(D)
    for u in sorted(D.nodes):
        if D.nodes[u].kind not in (H, H_DAG):
            continue
        for v in sorted(adj[u]):
            if v == u:
                continue
            pair = {D.nodes[u].kind, D.nodes[v].kind}
            if pair == {H, H_DAG} and D.nodes[u].d == D.nodes[v].d:
                sites.append((min(u, v), max(u, v)))
    return sorted(set(sites))


def _identity_sites(D: Diagram) -> list:
    sites = []
    for nid in sorted(D.nodes):
        n = D.nodes[nid]
        if n.kind == Z and n.arity == 2 and _is_ones(n.phase):
            sites.append((nid,))
        elif n.kind == X and n.label == 0 and (n.n_in, n.n_out) == (1, 1):
            sites.append((nid,))
        elif n.kind == X and n.label == 0 and n.arity == 2 and n.d == 2:
            sites.append((nid,))
        elif n.kind == W and (n.n_in, n.n_out) == (1, 1):
            sites.append((nid,))
    return sites


def _hopf_plan(D: Diagram, u: int, v: int):
    """Edges between Z node u and X node v to drop, or None."""
    between = _edges_between(D, u, v)
    ins, outs = [], []
    for i in between:
        e = D.edges[i]
        xe = e.a if e.a[0] == v else e.b
        (outs if D.nodes[v].is_output(xe[1]) else ins).append(i)
    if ins and outs:
        return [ins[0], outs[0]]
    d = D.nodes[u].d
    for group in (ins, outs):
        if len(group) >= d:
            return group[:d]
    return None


def _hopf_sites(D: Diagram) -> list:
    sites = []
    adj = _neighbours(D)
    for u in sorted(D.nodes):
        if D.nodes[u].kind not in (Z, X):
            continue
        for v in sorted(adj[u]):
            if v <= u or D.nodes[v].d != D.nodes[u].d:
                continue
            kinds = (D.nodes[u].kind, D.nodes[v].kind)
            if kinds == (Z, X) and _hopf_plan(D, u, v):
                sites.append((u, v))
            elif kinds == (X, Z) and _hopf_plan(D, v, u):
                sites.append((u, v))
    return sites


def _colour_plan(D: Diagram, z: int):
    """[(h node, far end of h)] if every leg of Z(K_j) ``z`` meets its own H/H^dagger."""
    node = D.nodes[z]
    if node.kind != Z or node.arity == 0:
        return None
    if node.label is None and k_label(node.phase, node.d) is None:
        return None
    plan = []
    seen = set()
    for p, i, far in _ports(D, z):
        if is_boundary(far) or far[0] == z:
            return None
        h = far[0]
        if D.nodes[h].kind not in (H, H_DAG) or h in seen:
            return None
        seen.add(h)
        hp = 1 - far[1]
        j = D.incidence()[(h, hp)]
        plan.append((h, D.other_end(j, (h, hp))))
    for h, far in plan:
        if not is_boundary(far) and (far[0] == z or far[0] in seen):
            return None
    return plan


def _colour_sites(D: Diagram) -> list:
    sites = []
    for z in sorted(D.nodes):
        plan = _colour_plan(D, z)
        if plan:
            sites.append((z,) + tuple(sorted(h for h, _ in plan)))
    return sites


def _components(D: Diagram) -> list:
    """Node sets of the connected components that touch no boundary slot."""
    adj = _neighbours(D)
    open_nodes = set()
    for e in D.edges:
        for a, b in ((e.a, e.b), (e.b, e.a)):
            if is_boundary(a) and not is_boundary(b):
                open_nodes.add(b[0])
    seen, comps = set(), []
    for start in sorted(D.nodes):
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            n = stack.pop()
            if n in comp:
                continue
            comp.add(n)
            stack.extend(adj[n] - comp)
        seen |= comp
        if not comp & open_nodes:
            comps.append(tuple(sorted(comp)))
    return comps


def _subdiagram(D: Diagram, nodes) -> Diagram:
    keep = set(nodes)
    edges = tuple(e for e in D.edges
                  if not is_boundary(e.a) and e.a[0] in keep)
    return Diagram({n: D.nodes[n] for n in nodes}, edges)


def _scalar_sites(D: Diagram, cap=None) -> list:
    sites = []
    for comp in _components(D):
        try:
            plan_contraction(_subdiagram(D, comp), cap=cap)
        except ContractionCapError:
            continue
        sites.append(comp)
    return sites


_FINDERS = {
    "z-fusion": lambda D: _pair_sites(D, Z),
    "x-fusion": lambda D: _pair_sites(D, X),
    "hh-dagger-elim": _hh_sites,
    "identity-spider-elim": _identity_sites,
    "hopf-disconnect": _hopf_sites,
    "colour-change-push": _colour_sites,
    "scalar-fold": _scalar_sites,
}


def find_matches(D: Diagram, rule: str) -> list:
    """Non-overlapping sites for ``rule``, lowest node id first."""
    if rule not in _FINDERS:
        raise KeyError(f"unknown core rule {rule!r}; known: {', '.join(CORE_RULES)}")
    used, out = set(), []
    for nodes in sorted(_FINDERS[rule](D), key=lambda s: (min(s), s)):
        if used.isdisjoint(nodes):
            used.update(nodes)
            out.append(Site(rule, tuple(nodes)))
    return out


# -- application -------------------------------------------------------------

def _apply_z_fusion(D, nodes):
    rw = _Rewrite(D)
    if len(nodes) == 1:
        u, = nodes
        loops = _self_loops(D, u)
        if not loops or D.nodes[u].kind != Z:
            raise StaleSiteError(f"z-fusion: node {u} has no self-loop")
        rw.drop.update(loops)
        legs = [((u, p), D.nodes[u].is_output(p)) for p, i, _ in _ports(D, u) if i not in loops]
        _rebuild_spider(rw, u, D.nodes[u], legs)
        return rw.finish("z-fusion", nodes)
    u, v = nodes
    nu, nv = D.nodes[u], D.nodes[v]
    between = _edges_between(D, u, v)
    if nu.kind != Z or nv.kind != Z or not between:
        raise StaleSiteError(f"z-fusion: nodes {u}, {v} are not adjacent Z spiders")
    inner = set(between) | set(_self_loops(D, u)) | set(_self_loops(D, v))
    rw.drop.update(inner)
    legs = [((n, p), D.nodes[n].is_output(p))
            for n in (u, v) for p, i, _ in _ports(D, n) if i not in inner]
    phase = tuple(a * b for a, b in zip(nu.phase, nv.phase))
    label = None
    if nu.label is not None and nv.label is not None:
        label = (nu.label + nv.label) % nu.d
    rw.remove_node(v)
    _rebuild_spider(rw, u, nu, legs, phase=phase, label=label)
    return rw.finish("z-fusion", nodes)


def _apply_x_fusion(D, nodes):
    rw = _Rewrite(D)
    if len(nodes) == 1:
        u, = nodes
        if D.nodes[u].kind != X:
            raise StaleSiteError(f"x-fusion: node {u} is not an X spider")
        loops = [i for i in _self_loops(D, u)
                 if _role(D, D.edges[i].a) != _role(D, D.edges[i].b)]
        if not loops:
            raise StaleSiteError(f"x-fusion: node {u} has no in/out self-loop")
        rw.drop.update(loops)
        rw.scalar *= D.nodes[u].d ** len(loops)
        legs = [((u, p), D.nodes[u].is_output(p)) for p, i, _ in _ports(D, u) if i not in loops]
        _rebuild_spider(rw, u, D.nodes[u], legs)
        return rw.finish("x-fusion", nodes)
    u, v = nodes
    nu, nv = D.nodes[u], D.nodes[v]
    between = _edges_between(D, u, v)
    if nu.kind != X or nv.kind != X or not between:
        raise StaleSiteError(f"x-fusion: nodes {u}, {v} are not adjacent X spiders")
    d = nu.d

    def ends(i):
        e = D.edges[i]
        return (e.a, e.b) if e.a[0] == u else (e.b, e.a)

    def opposite(i):
        a, b = ends(i)
        return _role(D, a) != _role(D, b)

    # with equal roles on the pivot edge, v's constraint is negated first
    pivot = next((i for i in between if opposite(i)), between[0])
    flip = not opposite(pivot)
    label = (nu.label - nv.label if flip else nu.label + nv.label) % d

    def out_role(end):
        o = D.nodes[end[0]].is_output(end[1])
        return (not o) if (flip and end[0] == v) else o

    drop = {pivot}
    for i in between:
        if i == pivot:
            continue
        a, b = ends(i)
        if out_role(a) != out_role(b):
            drop.add(i)
            rw.scalar *= d
    rw.drop.update(drop)
    legs = [((n, p), out_role((n, p)))
            for n in (u, v) for p, i, _ in _ports(D, n) if i not in drop]
    rw.remove_node(v)
    _rebuild_spider(rw, u, nu, legs, label=label)
    return rw.finish("x-fusion", nodes)


def _apply_hh(D, nodes):
    u, v = nodes
    if {D.nodes[u].kind, D.nodes[v].kind} != {H, H_DAG}:
        raise StaleSiteError(f"hh-dagger-elim: nodes {u}, {v} are not an H, H^dagger pair")
    between = _edges_between(D, u, v)
    if not between:
        raise StaleSiteError(f"hh-dagger-elim: nodes {u}, {v} are not adjacent")
    rw = _Rewrite(D)
    d = D.nodes[u].d
    rw.scalar *= d
    pu = _ports(D, u)
    pv = _ports(D, v)
    rw.drop.update(i for _, i, _ in pu + pv)
    if len(between) == 2:
        # a closed ring H, H^dagger: trace of d * I
        rw.scalar *= d
    else:
        fu = next(far for _, i, far in pu if i != between[0])
        fv = next(far for _, i, far in pv if i != between[0])
        rw.join(fu, fv, d)
    rw.remove_node(u)
    rw.remove_node(v)
    return rw.finish("hh-dagger-elim", nodes)


def _apply_identity(D, nodes):
    u, = nodes
    if (u,) not in _identity_sites(D):
        raise StaleSiteError(f"identity-spider-elim: node {u} is not an identity spider")
    rw = _Rewrite(D)
    ports = _ports(D, u)
    rw.drop.update(i for _, i, _ in ports)
    if ports[0][1] == ports[1][1]:
        rw.scalar *= D.nodes[u].d
    else:
        rw.join(ports[0][2], ports[1][2], D.nodes[u].d)
    rw.remove_node(u)
    return rw.finish("identity-spider-elim", nodes)


def _apply_hopf(D, nodes):
    u, v = nodes
    z, x = (u, v) if D.nodes[u].kind == Z else (v, u)
    if D.nodes[z].kind != Z or D.nodes[x].kind != X:
        raise StaleSiteError(f"hopf-disconnect: nodes {u}, {v} are not a Z, X pair")
    plan = _hopf_plan(D, z, x)
    if not plan:
        raise StaleSiteError(f"hopf-disconnect: no removable edges between {u} and {v}")
    rw = _Rewrite(D)
    rw.drop.update(plan)
    for n in (u, v):
        legs = [((n, p), D.nodes[n].is_output(p)) for p, i, _ in _ports(D, n) if i not in plan]
        _rebuild_spider(rw, n, D.nodes[n], legs)
    return rw.finish("hopf-disconnect", nodes)


def _apply_colour(D, nodes):
    z = nodes[0]
    plan = _colour_plan(D, z)
    if not plan or tuple(sorted(h for h, _ in plan)) != tuple(nodes[1:]):
        raise StaleSiteError(f"colour-change-push: node {z} does not match")
    node = D.nodes[z]
    j = node.label if node.label is not None else k_label(node.phase, node.d)
    rw = _Rewrite(D)
    rw.scalar *= node.d
    for h, _ in plan:
        rw.drop.update(i for _, i, _ in _ports(D, h))
        rw.remove_node(h)
    # H legs become outputs of the X spider, H^dagger legs its inputs
    outs = [far for h, far in plan if D.nodes[h].kind == H]
    ins = [far for h, far in plan if D.nodes[h].kind == H_DAG]
    rw.nodes[z] = Node(X, node.d, len(ins), len(outs), label=j, tag=node.tag)
    rw.added.append(z)
    for k, far in enumerate(outs + ins):
        rw.join((z, k), far, node.d)
    return rw.finish("colour-change-push", nodes)


def _apply_scalar(D, nodes, cap=None):
    if tuple(nodes) not in _components(D):
        raise StaleSiteError(f"scalar-fold: {list(nodes)} is not a closed component")
    sub = _subdiagram(D, nodes)
    value = complex(interpret(sub, cap=cap).data.reshape(()))
    rw = _Rewrite(D)
    keep = set(nodes)
    rw.drop.update(i for i, e in enumerate(D.edges)
                   if not is_boundary(e.a) and e.a[0] in keep)
    for n in nodes:
        rw.remove_node(n)
    rw.scalar *= value
    return rw.finish("scalar-fold", nodes)


_APPLY = {
    "z-fusion": _apply_z_fusion,
    "x-fusion": _apply_x_fusion,
    "hh-dagger-elim": _apply_hh,
    "identity-spider-elim": _apply_identity,
    "hopf-disconnect": _apply_hopf,
    "colour-change-push": _apply_colour,
    "scalar-fold": _apply_scalar,
}


def apply_step(D: Diagram, site: Site) -> tuple:
    """Rewrite ``D`` at ``site``; returns (new diagram, RewriteStep)."""
    if site.rule not in _APPLY:
        raise KeyError(f"unknown core rule {site.rule!r}")
    missing = [n for n in site.nodes if n not in D.nodes]
    if missing:
        raise StaleSiteError(f"{site.rule}: nodes {missing} are not in the diagram")
    try:
        return _APPLY[site.rule](D, tuple(site.nodes))
    except DiagramError as exc:
        raise StaleSiteError(f"{site.rule}: {exc}") from None


def measure(D: Diagram) -> tuple:
    return (len(D.nodes), len(D.edges))


def simplify(D: Diagram, max_steps: int | None = None, rules=CORE_RULES) -> tuple:
    """Apply ``rules`` until none matches or ``max_steps`` steps were taken."""
    if max_steps is None:
        max_steps = len(D.nodes) + len(D.edges)
    trace = Trace()
    for _ in range(max_steps):
        site = next((s[0] for s in (find_matches(D, r) for r in rules) if s), None)
        if site is None:
            return D, trace
        D2, step = apply_step(D, site)
        if not measure(D2) < measure(D):
            raise AssertionError(f"{site.rule} did not decrease the measure")
        D = D2
        trace.append(step)
    trace.exhausted = any(find_matches(D, r) for r in rules)
    return D, trace


def replay(D: Diagram, trace) -> Diagram:
    for step in trace:
        D, _ = apply_step(D, Site(step.rule, step.matched))
    return D


def extract_scalar(D: Diagram, cap=None) -> tuple:
    """Remove every closed component.

    Returns the remaining diagram (scalar field untouched) and the product of
    the values of the removed components.
    """
    value = 1.0 + 0j
    for comp in _components(D):
        sub = _subdiagram(D, comp)
        value *= complex(interpret(sub, cap=cap).data.reshape(()))
    comps = {n for c in _components(D) for n in c}
    nodes = {k: v for k, v in D.nodes.items() if k not in comps}
    edges = tuple(e for e in D.edges if is_boundary(e.a) or e.a[0] not in comps)
    return Diagram(nodes, edges, D.inputs, D.outputs, D.scalar), value
