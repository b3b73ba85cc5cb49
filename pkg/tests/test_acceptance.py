"""End-to-end acceptance run: seven criteria, each printed as one pass/fail line.

Every check compares against an independent reference (naive loops or plain
numpy products) at the stated tolerance and within the stated time budget.
"""
import itertools
import time

import numpy as np
import pytest

from oracle import oracle_tensor
from quzx.diagram import compose_seq, k_phase
from quzx.generators import binder, had, had_dag, splitter, tri, tri_inv
from quzx.normal_form import count_row_additions, matrix_normal_form, vector_normal_form, w_normal_form
from quzx.rewrite import replay, simplify
from quzx.rules import verify_all
from quzx.serialize import diagram_dumps
from quzx.tensor import deviation, interpret, interpret_kind
from quzx.testing import random_diagram

DS = [2, 3, 4, 5]


@pytest.fixture
def report(capsys):
    def emit(num, title, ok, detail, seconds, budget):
        in_time = budget is None or seconds < budget
        status = "PASS" if ok and in_time else "FAIL"
        limit = f" (limit {budget:.0f}s)" if budget else ""
        with capsys.disabled():
            print(f"\nCRITERION {num} {status}: {title}: {detail}; {seconds:.2f}s{limit}")
        assert ok, detail
        assert in_time, f"took {seconds:.2f}s, budget {budget}s"
    return emit


def naive_matmul(A, B):
    out = np.zeros((A.shape[0], B.shape[1]), dtype=complex)
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            for k in range(A.shape[1]):
                out[i, j] += A[i, k] * B[k, j]
    return out


def rand_c(rng, size):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def test_criterion_1_generator_semantics(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst, count = 0.0, 0

    def check(got, want):
        nonlocal worst, count
        worst = max(worst, float(np.max(np.abs(got - want), initial=0)))
        count += 1

    arities = [(a, t - a) for t in range(5) for a in range(t + 1)]
    for d in DS:
        phases = [(1.0,) * (d - 1), (0.0,) * (d - 1), k_phase(1, d),
                  tuple(rand_c(rng, d - 1))]
        for n_in, n_out in arities:
            for ph in phases:
                check(interpret_kind("Z", d, n_in, n_out, phase=ph).data,
                      oracle_tensor("Z", d, n_in, n_out, phase=ph))
            for j in range(d):
                check(interpret_kind("X", d, n_in, n_out, label=j).data,
                      oracle_tensor("X", d, n_in, n_out, label=j))
            if n_in + n_out:
                check(interpret_kind("W", d, n_in, n_out).data,
                      oracle_tensor("W", d, n_in, n_out))
        for kind in ("H", "H_dag", "triangle", "triangle_inv"):
            check(interpret_kind(kind, d).data, oracle_tensor(kind, d))
    for s, t in itertools.product(range(1, 6), repeat=2):
        check(interpret_kind("binder", s=s, t=t, n_in=2, n_out=1).data,
              oracle_tensor("binder", s=s, t=t))
        check(interpret_kind("splitter", s=s, t=t, n_in=1, n_out=2).data,
              oracle_tensor("splitter", s=s, t=t))
    dt = time.perf_counter() - t0
    report(1, "generator semantics vs naive oracle", worst <= 1e-12,
           f"{count} tensors, max dev {worst:.1e} (tol 1e-12)", dt, 5)


def test_criterion_2_rule_soundness(report):
    t0 = time.perf_counter()
    rep = verify_all(DS, seed=0, trials_per_rule=5, kind="rules", tol=1e-10)
    dt = time.perf_counter() - t0
    c = rep.counts
    report(2, "rule soundness sweep", rep.all_passed,
           f"{c['pass']}/{len(rep.verdicts)} pass, {c['fail']} fail, "
           f"{c['inconclusive']} inconclusive, max dev {rep.max_dev:.1e}", dt, 120)


def test_criterion_3_lemma_suite(report):
    t0 = time.perf_counter()
    rep = verify_all(DS, seed=0, trials_per_rule=5, kind="lemmas", tol=1e-10)
    dt = time.perf_counter() - t0
    horiz = [v for v in rep.verdicts if v.name == "HorizontalWire"]
    horiz_ok = bool(horiz) and all(
        (v.max_dev <= 1e-10) if v.d == 2 else (v.max_dev >= 0.5) for v in horiz)
    c = rep.counts
    report(3, "lemma suite", rep.all_passed and horiz_ok,
           f"{c['pass']}/{len(rep.verdicts)} pass, horizontal wire "
           f"{'ok' if horiz_ok else 'wrong'}", dt, 120)


def test_criterion_4_universality(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst, bad_counts = 0.0, 0
    for d in DS:
        for m in (1, 2):
            for _ in range(100):
                v = rand_c(rng, d ** m)
                D = vector_normal_form(v, d, m)
                if count_row_additions(D) != d ** m - 1:
                    bad_counts += 1
                for form in (D, w_normal_form(v, d, m)):
                    got = interpret(form).matrix().reshape(-1)
                    worst = max(worst, float(np.max(np.abs(got - v))))
    shapes = [(s, t) for s in range(1, 25) for t in range(1, 25) if s * t <= 24]
    for k in range(50):
        s, t = shapes[int(rng.integers(len(shapes)))]
        M = rand_c(rng, (s, t))
        worst = max(worst, float(np.max(np.abs(interpret(matrix_normal_form(M)).matrix() - M))))
    dt = time.perf_counter() - t0
    report(4, "universality round trip", worst <= 1e-9 and bad_counts == 0,
           f"1600 vector forms + 50 matrices, max dev {worst:.1e}, "
           f"{bad_counts} wrong row-addition counts", dt, 60)


def test_criterion_5_inverse_identities(report):
    t0 = time.perf_counter()
    worst = 0.0
    for d in DS:
        I = np.eye(d)
        worst = max(worst, np.max(np.abs(interpret(compose_seq(tri_inv(d), tri(d))).matrix() - I)),
                    np.max(np.abs(interpret(compose_seq(had_dag(d), had(d))).matrix() - d * I)))
    for s, t in itertools.product(DS, repeat=2):
        bs = interpret(compose_seq(splitter(s, t), binder(s, t))).matrix()
        sb = interpret(compose_seq(binder(s, t), splitter(s, t))).matrix()
        worst = max(worst, np.max(np.abs(bs - np.eye(s * t))),
                    np.max(np.abs(sb - np.kron(np.eye(s), np.eye(t)))))
    dt = time.perf_counter() - t0
    report(5, "inverse and unitary identities", worst <= 1e-12,
           f"max dev {worst:.1e} (tol 1e-12)", dt, None)


def test_criterion_6_simplifier_safety(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst, over_budget, replay_mismatch, steps = 0.0, 0, 0, 0
    for _ in range(500):
        D = random_diagram(rng, max_nodes=10)
        S, trace = simplify(D)
        steps += len(trace)
        if trace.exhausted or len(trace) > len(D.nodes) + len(D.edges):
            over_budget += 1
        worst = max(worst, deviation(interpret(D), interpret(S)))
        if diagram_dumps(replay(D, trace)) != diagram_dumps(S):
            replay_mismatch += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and over_budget == 0 and replay_mismatch == 0
    report(6, "simplifier safety", ok,
           f"500 diagrams, {steps} steps, max dev {worst:.1e}, {over_budget} over budget, "
           f"{replay_mismatch} replay mismatches", dt, None)


def test_criterion_7_composition(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    triples = [(s, t, v) for s in range(1, 61) for t in range(1, 61) for v in range(1, 61)
               if s * t * v <= 60]
    # the largest intermediate dimensions first, then random shapes
    cases = [(6, 10, 1), (1, 60, 1), (60, 1, 1), (1, 1, 60), (3, 4, 5), (5, 12, 1)]
    cases += [triples[int(rng.integers(len(triples)))] for _ in range(40)]
    worst = 0.0
    for s, t, v in cases:
        M, N = rand_c(rng, (s, t)), rand_c(rng, (t, v))
        D = compose_seq(matrix_normal_form(N), matrix_normal_form(M))
        assert D.signature() == ((v,), (s,))
        worst = max(worst, float(np.max(np.abs(interpret(D).matrix() - naive_matmul(M, N)))))
    dt = time.perf_counter() - t0
    report(7, "type-matching composition", worst <= 1e-8,
           f"{len(cases)} products with stv <= 60, max dev {worst:.1e} (tol 1e-8)", dt, None)
