"""JSON interchange for diagrams, tensors and matrices.

Complex numbers are always ``[re, im]`` pairs.  Floats go through ``repr``
which round-trips doubles exactly.
"""
from __future__ import annotations

import json

import numpy as np

from .diagram import Diagram, DiagramError, Edge, Z, make_node
from .tensor import DenseTensor

VERSION = "1"


class FormatError(ValueError):
    """Malformed input file; the message names the offending field."""


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _uc(pair, where: str) -> complex:
    if (not isinstance(pair, (list, tuple)) or len(pair) != 2
            or not all(isinstance(v, (int, float)) for v in pair)):
        raise FormatError(f"{where}: expected [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def _end_out(e):
    return [e[0], e[1]]


def _end_in(raw, where):
    if (not isinstance(raw, list) or len(raw) != 2
            or not isinstance(raw[1], int)
            or not (raw[0] in ("in", "out") or isinstance(raw[0], int))):
        raise FormatError(f"{where}: bad endpoint {raw!r}")
    return (raw[0], raw[1])


def diagram_to_dict(D: Diagram) -> dict:
    nodes = []
    for nid in sorted(D.nodes):
        n = D.nodes[nid]
        rec = {"id": nid, "kind": n.kind, "d": n.d, "n_in": n.n_in, "n_out": n.n_out}
        if n.kind == Z:
            rec["phase"] = [_c(p) for p in n.phase]
        if n.label is not None:
            rec["label"] = n.label
        if n.s:
            rec["s"], rec["t"] = n.s, n.t
        if n.tag:
            rec["tag"] = n.tag
        nodes.append(rec)
    edges = [{"a": _end_out(e.a), "b": _end_out(e.b), "dim": e.dim} for e in D.edges]
    return {"version": VERSION, "scalar": _c(D.scalar), "nodes": nodes, "edges": edges,
            "inputs": list(D.inputs), "outputs": list(D.outputs)}


def diagram_from_dict(obj: dict) -> Diagram:
    if not isinstance(obj, dict):
        raise FormatError("diagram: top level must be an object")
    if obj.get("version") != VERSION:
        raise FormatError(f"version: expected {VERSION!r}, got {obj.get('version')!r}")
    for key in ("nodes", "edges", "inputs", "outputs"):
        if not isinstance(obj.get(key), list):
            raise FormatError(f"{key}: missing or not a list")
    nodes = {}
    for i, rec in enumerate(obj["nodes"]):
        where = f"nodes[{i}]"
        try:
            kind = rec["kind"]
            nid = rec["id"]
            phase = None
            if kind == Z and "phase" in rec:
                phase = [_uc(p, f"{where}.phase") for p in rec["phase"]]
            node = make_node(kind, rec.get("d", 0), rec.get("n_in", 1), rec.get("n_out", 1),
                             phase=phase, label=rec.get("label"), s=rec.get("s", 0),
                             t=rec.get("t", 0), tag=rec.get("tag", ""))
        except KeyError as exc:
            raise FormatError(f"{where}: missing field {exc}") from None
        except DiagramError as exc:
            raise FormatError(f"{where}: {exc}") from None
        if not isinstance(nid, int) or nid in nodes:
            raise FormatError(f"{where}.id: bad or duplicate id {nid!r}")
        nodes[nid] = node
    edges = []
    for i, rec in enumerate(obj["edges"]):
        where = f"edges[{i}]"
        try:
            edges.append(Edge(_end_in(rec["a"], where + ".a"), _end_in(rec["b"], where + ".b"),
                              int(rec["dim"])))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"{where}: missing field {exc}") from None
    scalar = _uc(obj.get("scalar", [1.0, 0.0]), "scalar")
    return Diagram(nodes, tuple(edges), tuple(int(x) for x in obj["inputs"]),
                   tuple(int(x) for x in obj["outputs"]), scalar)


def dumps(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def diagram_dumps(D: Diagram) -> str:
    return dumps(diagram_to_dict(D))


def diagram_loads(text: str) -> Diagram:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return diagram_from_dict(obj)


def tensor_to_dict(T: DenseTensor) -> dict:
    flat = T.data.reshape(-1)
    return {"version": VERSION, "axis_dims": list(T.axis_dims), "n_out": T.n_out,
            "data": [_c(z) for z in flat]}


def tensor_from_dict(obj: dict) -> DenseTensor:
    try:
        dims, raw = tuple(int(x) for x in obj["axis_dims"]), list(obj["data"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"tensor: missing or malformed field {exc}") from None
    data = np.array([_uc(p, f"data[{i}]") for i, p in enumerate(raw)], dtype=complex)
    if data.size != int(np.prod(dims)):
        raise FormatError(f"data: {data.size} entries for axis_dims {list(dims)}")
    return DenseTensor(data.reshape(dims), int(obj.get("n_out", len(dims))))


def matrix_from_dict(obj: dict) -> np.ndarray:
    """Parse ``{"rows": s, "cols": t, "data": [[re, im], ...]}`` (row-major)."""
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"matrix: missing field {exc}") from None
    if not (isinstance(rows, int) and isinstance(cols, int) and rows >= 1 and cols >= 1):
        raise FormatError(f"rows/cols: expected positive integers, got {rows!r}, {cols!r}")
    if not isinstance(data, list):
        raise FormatError("data: expected a list of [re, im] pairs")
    if len(data) != rows * cols:
        raise FormatError(f"data: expected {rows * cols} entries, got {len(data)}")
    vals = [_uc(p, f"data[{i}]") for i, p in enumerate(data)]
    return np.array(vals, dtype=complex).reshape(rows, cols)


def matrix_to_dict(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"rows": M.shape[0], "cols": M.shape[1], "data": [_c(z) for z in M.reshape(-1)]}
