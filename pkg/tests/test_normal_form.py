import itertools

import numpy as np
import pytest

from quzx.diagram import compose_seq, seq_all
from quzx.normal_form import (RowAdditionSpec, basis_index, basis_state, count_row_additions,
                              count_w_boxes, digits_of, matrix_normal_form, row_addition_diagram,
                              row_mult_diagram, scalar_normal_form, vector_normal_form,
                              w_normal_form)
from quzx.tensor import interpret


def naive_index(digits, d):
    # sum of a_j d^j with a_j read right to left
    return sum(a * d ** j for j, a in enumerate(reversed(digits)))


def naive_elementary(d, m, l, a):
    n = d ** m
    E = [[1.0 + 0j if r == c else 0j for c in range(n)] for r in range(n)]
    E[l][n - 1] += a
    return np.array(E)


def rand_c(rng, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def test_basis_index_examples():
    assert basis_index((2, 1), 3) == 7
    assert basis_index((1, 0, 1), 2) == 5
    assert digits_of(7, 3, 2) == (2, 1)
    with pytest.raises(ValueError):
        basis_index((3,), 3)
    with pytest.raises(ValueError):
        digits_of(9, 3, 2)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_basis_states_exhaustive(d, m):
    for digits in itertools.product(range(d), repeat=m):
        v = interpret(basis_state(digits, d)).matrix().reshape(-1)
        want = np.zeros(d ** m, dtype=complex)
        want[naive_index(digits, d)] = 1
        assert np.array_equal(v, want), digits
        assert basis_index(digits, d) == naive_index(digits, d)


@pytest.mark.parametrize("d,m", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_elementary_matrices_exhaustive(d, m):
    rng = np.random.default_rng(d * 10 + m)
    for l in range(d ** m - 1):
        a = complex(rand_c(rng))
        spec = RowAdditionSpec.for_target(l, d, m, a)
        assert spec.target == l
        M = interpret(row_addition_diagram(spec)).matrix()
        assert np.max(np.abs(M - naive_elementary(d, m, l, a))) <= 1e-12


def test_row_addition_example():
    spec = RowAdditionSpec(3, 2, (0, 1), (1, 2), 5)
    assert spec.target == 1
    M = interpret(row_addition_diagram(spec)).matrix()
    want = np.eye(9, dtype=complex)
    want[1, 8] = 5
    assert np.max(np.abs(M - want)) <= 1e-12


def test_row_addition_spec_validation():
    with pytest.raises(ValueError):
        RowAdditionSpec(3, 2, (1, 0), (1, 1), 1)
    with pytest.raises(ValueError):
        RowAdditionSpec(3, 2, (0,), (3,), 1)
    with pytest.raises(ValueError):
        RowAdditionSpec(3, 2, (2,), (1,), 1)
    with pytest.raises(ValueError):
        RowAdditionSpec(3, 2, (), (), 1)


@pytest.mark.parametrize("d,m,a", [(2, 1, -1), (3, 1, 2j), (2, 2, 0), (3, 2, 0.5 - 1j)])
def test_row_mult(d, m, a):
    M = interpret(row_mult_diagram(d, m, a)).matrix()
    want = np.eye(d ** m, dtype=complex)
    want[-1, -1] = a
    assert np.max(np.abs(M - want)) <= 1e-12


@pytest.mark.parametrize("d,m", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (4, 2), (5, 1)])
def test_vector_round_trip_both_styles(d, m):
    rng = np.random.default_rng(d + 7 * m)
    for _ in range(5):
        v = rand_c(rng, d ** m)
        D = vector_normal_form(v, d, m)
        assert D.signature() == ((), (d,) * m)
        assert count_row_additions(D) == d ** m - 1
        assert np.max(np.abs(interpret(D).matrix().reshape(-1) - v)) <= 1e-9
        W = w_normal_form(v, d, m)
        assert count_w_boxes(W) == d ** m
        assert np.max(np.abs(interpret(W).matrix().reshape(-1) - v)) <= 1e-9


def test_vector_special_cases():
    for v in (np.zeros(4), np.eye(4)[3], np.eye(4)[0], np.ones(4)):
        for D in (vector_normal_form(v, 2, 2), w_normal_form(v, 2, 2)):
            assert np.max(np.abs(interpret(D).matrix().reshape(-1) - v)) <= 1e-12
    with pytest.raises(ValueError):
        vector_normal_form(np.ones(5), 2, 2)


def test_row_additions_commute():
    d, m = 3, 2
    rng = np.random.default_rng(5)
    v = rand_c(rng, d ** m)
    order = rng.permutation(d ** m - 1)
    parts = [basis_state([d - 1] * m, d)]
    parts += [row_addition_diagram(RowAdditionSpec.for_target(int(l), d, m, v[l])) for l in order]
    parts.append(row_mult_diagram(d, m, v[-1]))
    got = interpret(seq_all(parts)).matrix().reshape(-1)
    assert np.max(np.abs(got - v)) <= 1e-9


@pytest.mark.parametrize("a", [1, 0, 2 + 1j])
@pytest.mark.parametrize("d", [2, 3])
def test_scalar_normal_form(a, d):
    D = scalar_normal_form(a, d)
    assert D.signature() == ((), ())
    assert abs(complex(interpret(D).data.reshape(-1)[0]) - a) <= 1e-12


def test_matrix_identity():
    D = matrix_normal_form(np.eye(2))
    assert D.signature() == ((2,), (2,))
    assert np.max(np.abs(interpret(D).matrix() - np.eye(2))) <= 1e-9


def test_matrix_indexed_entries():
    s, t = 3, 4
    M = np.array([[k * t + l + 1 for l in range(t)] for k in range(s)], dtype=complex)
    got = interpret(matrix_normal_form(M)).matrix()
    assert np.max(np.abs(got - M)) <= 1e-9


def test_matrix_random_and_degenerate_shapes():
    rng = np.random.default_rng(11)
    for shape in [(4, 5), (1, 3), (3, 1), (1, 1), (2, 2)]:
        M = rand_c(rng, shape)
        D = matrix_normal_form(M)
        assert D.signature() == ((shape[1],), (shape[0],))
        assert np.max(np.abs(interpret(D).matrix() - M)) <= 1e-9
    with pytest.raises(ValueError):
        matrix_normal_form(np.ones(3))


def test_composition_types_as_matrix_product():
    rng = np.random.default_rng(2)
    M, N = rand_c(rng, (2, 3)), rand_c(rng, (3, 4))
    D = compose_seq(matrix_normal_form(N), matrix_normal_form(M))
    assert D.signature() == ((4,), (2,))
    assert np.max(np.abs(interpret(D).matrix() - M @ N)) <= 1e-8


def test_frozen_row_addition_structure():
    D = row_addition_diagram(RowAdditionSpec(3, 2, (0, 1), (1, 2), 5))
    kinds = sorted(n.kind for n in D.nodes.values())
    assert kinds.count("triangle") == 2 and len(D.nodes) == 7
