import numpy as np
import pytest

from oracle import oracle_tensor
from quzx.diagram import Builder, Z, compose_par, compose_seq, seq_all
from quzx.generators import had, had_dag, tri, xs, zk, zs
from quzx.tensor import (ContractionCapError, DenseTensor, approx_eq, deviation, interpret,
                         plan_contraction, random_plan)
from quzx.testing import random_diagram


def test_contraction_order_independence():
    rng = np.random.default_rng(2024)
    for k in range(200):
        D = random_diagram(rng, max_nodes=8, d=int(rng.integers(2, 5)))
        A = interpret(D)
        B = interpret(D, plan=random_plan(D, seed=k))
        assert A.axis_dims == B.axis_dims
        assert deviation(A, B) <= 1e-12, k


def test_random_diagrams_match_brute_force():
    # contract each random diagram by summing over every edge assignment
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 25:
        D = random_diagram(rng, max_nodes=4, d=2, max_arity=3)
        if len(D.edges) > 10:
            continue
        checked += 1
        assert deviation(interpret(D), DenseTensor(_brute(D), len(D.outputs))) <= 1e-12


def _brute(D):
    import itertools
    tensors = {nid: oracle_tensor(n.kind, n.d, n.n_in, n.n_out, phase=n.phase, label=n.label)
               for nid, n in D.nodes.items()}
    shape = tuple(D.outputs) + tuple(D.inputs)
    out = np.zeros(shape, dtype=complex)
    for vals in itertools.product(*[range(e.dim) for e in D.edges]):
        port_val, bnd = {}, {}
        for e, v in zip(D.edges, vals):
            for end in (e.a, e.b):
                (bnd if isinstance(end[0], str) else port_val)[end] = v
        # a cap/cup edge ties two boundary slots to the same value
        amp = 1 + 0j
        for nid, arr in tensors.items():
            amp *= arr[tuple(port_val[(nid, p)] for p in range(arr.ndim))]
        idx = tuple(bnd[("out", k)] for k in range(len(D.outputs))) + \
            tuple(bnd[("in", k)] for k in range(len(D.inputs)))
        out[idx] += amp
    return out * D.scalar


def test_single_node_plan_has_one_step():
    for D in (had(3), xs(1, 2, 1, 3), tri(4)):
        plan = plan_contraction(D)
        assert len(plan.steps) == 1 and plan.steps[0][0] == "final"


def test_chain_peak():
    D = seq_all([tri(3), had(3), tri(3), xs(1, 1, 1, 3), had_dag(3)])
    assert plan_contraction(D).peak == 9


def test_fully_connected_blob_hits_cap():
    b = Builder()
    ids = [b.add(Z, 5, 0, 29, phase=(1, 2, 3, 4)) for _ in range(30)]
    used = [0] * 30
    for i in range(30):
        for j in range(i + 1, 30):
            b.wire((ids[i], used[i]), (ids[j], used[j]))
            used[i] += 1
            used[j] += 1
    D = b.build()
    # Z spiders share one hyperindex per connected group; X spiders do not
    with pytest.raises(ContractionCapError):
        interpret(_x_blob(30, 5))
    assert interpret(D).data.shape == ()


def _x_blob(n, d):
    b = Builder()
    ids = [b.add("X", d, 0, n - 1, label=0) for _ in range(n)]
    used = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            b.wire((ids[i], used[i]), (ids[j], used[j]))
            used[i] += 1
            used[j] += 1
    return b.build()


def test_cap_env_override(monkeypatch):
    D = compose_par(zs((1,), 0, 9, 2), zs((1,), 0, 9, 2))
    interpret(D)
    monkeypatch.setenv("QUZX_CAP", "1000")
    with pytest.raises(ContractionCapError) as err:
        interpret(D)
    assert err.value.cap == 1000


def test_approx_eq():
    A = interpret(had(4) >> had_dag(4))
    B = DenseTensor(4 * np.eye(4, dtype=complex), 1)
    assert approx_eq(A, A, 1e-10)
    assert approx_eq(A, B, 1e-10)
    assert not approx_eq(A, DenseTensor(np.eye(2, dtype=complex), 1))
    assert not approx_eq(A, DenseTensor(4.1 * np.eye(4, dtype=complex), 1), 1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_colour_change_consistency(d):
    for j in range(d):
        M = interpret(seq_all([had_dag(d), zk(j, 1, 1, d), had(d)])).matrix() / d
        assert np.allclose(M, interpret(xs(j, 1, 1, d)).matrix(), atol=1e-12)


def test_empty_diagram_scalar():
    from quzx.diagram import empty
    T = interpret(empty(3 - 1j))
    assert T.axis_dims == () and T.data == 3 - 1j


def test_deterministic_plans():
    rng = np.random.default_rng(9)
    D = random_diagram(rng, max_nodes=8, d=3)
    assert plan_contraction(D).steps == plan_contraction(D).steps
