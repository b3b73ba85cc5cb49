import json

import numpy as np
import pytest

from quzx.diagram import compose_par, compose_seq
from quzx.generators import binder, had, splitter, tri, ws, xs, zs
from quzx.normal_form import matrix_normal_form
from quzx.serialize import (FormatError, diagram_dumps, diagram_from_dict, diagram_loads,
                            diagram_to_dict, matrix_from_dict, matrix_to_dict, tensor_from_dict,
                            tensor_to_dict)
from quzx.tensor import interpret
from quzx.testing import random_diagram


def test_round_trip_random_diagrams():
    rng = np.random.default_rng(9)
    for _ in range(50):
        D = random_diagram(rng)
        text = diagram_dumps(D)
        back = diagram_loads(text)
        assert back.same_as(D)
        assert diagram_dumps(back) == text


def test_round_trip_keeps_exact_floats_and_tags():
    D = compose_seq(zs((0.1 + 1 / 3j, np.pi), 1, 1, 3), had(3))
    D = compose_par(D, compose_seq(splitter(2, 3), binder(2, 3)))
    D = compose_par(D, matrix_normal_form(np.array([[1, 2j]])))
    back = diagram_loads(diagram_dumps(D))
    assert back.same_as(D)
    assert [n.tag for n in back.nodes.values()] == [n.tag for n in D.nodes.values()]
    assert np.array_equal(interpret(back).data, interpret(D).data)


def test_tensor_and_matrix_round_trip():
    T = interpret(compose_seq(ws(1, 2, 3), compose_par(xs(1, 1, 1, 3), tri(3))))
    T2 = tensor_from_dict(json.loads(json.dumps(tensor_to_dict(T))))
    assert T2.axis_dims == T.axis_dims and T2.n_out == T.n_out
    assert np.array_equal(T2.data, T.data)
    M = np.array([[1, 2j], [-0.5, 1e-300]])
    assert np.array_equal(matrix_from_dict(json.loads(json.dumps(matrix_to_dict(M)))), M)


@pytest.mark.parametrize("mutate,needle", [
    (lambda o: o.update(version="9"), "version"),
    (lambda o: o.pop("edges"), "edges"),
    (lambda o: o["nodes"][0].pop("kind"), "nodes[0]"),
    (lambda o: o["nodes"][0].update(kind="Q"), "nodes[0]"),
    (lambda o: o["nodes"][0].update(phase=[[1, 0, 3]]), "phase"),
    (lambda o: o["edges"][0].update(a=["nowhere", 0]), "edges[0].a"),
    (lambda o: o.update(scalar="one"), "scalar"),
])
def test_diagram_format_errors_name_the_field(mutate, needle):
    obj = diagram_to_dict(zs((2,), 1, 1, 2))
    mutate(obj)
    with pytest.raises(FormatError, match=needle.replace("[", r"\[").replace("]", r"\]")):
        diagram_from_dict(obj)


def test_bad_json_reports_position():
    with pytest.raises(FormatError, match="line 2 column"):
        diagram_loads('{\n  "version": }')


@pytest.mark.parametrize("obj,needle", [
    ({"rows": 1, "cols": 2, "data": [[1, 0]]}, "expected 2"),
    ({"rows": 0, "cols": 2, "data": []}, "rows/cols"),
    ({"cols": 2, "data": []}, "rows"),
    ({"rows": 1, "cols": 1, "data": [[1, "x"]]}, r"data\[0\]"),
    ({"rows": 1, "cols": 1, "data": 5}, "data"),
    ([1, 2], "matrix"),
])
def test_matrix_format_errors(obj, needle):
    with pytest.raises(FormatError, match=needle):
        matrix_from_dict(obj)


def test_tensor_format_errors():
    with pytest.raises(FormatError):
        tensor_from_dict({"axis_dims": [2, 2], "data": [[1, 0]]})
    with pytest.raises(FormatError):
        tensor_from_dict({"data": []})
