import numpy as np
import pytest

from quzx.diagram import compose_par
from quzx.generators import scalar_gadget, zs
from quzx.rules import (LEMMAS, RULES, RuleInstance, build_lemma, build_rule, dbox, k2_prime,
                        verify_all, verify_rule)
from quzx.tensor import interpret

DS = [2, 3, 4, 5]
BASE_RULES = ["S1", "S2", "S3", "Ept", "B1", "B2", "B3", "K1", "K2", "EU", "Zer", "H1",
                "P1", "D1", "Sca", "Bs0", "Bsj", "Suc", "Inv", "Pcy", "AD", "Sym", "Aso",
                "Whf", "Brk", "DT", "Tre", "TKj", "Brk2", "BinderUnit1", "BinderUnit2",
                "BinderAssoc", "BinderGSpider", "BinderWith1R", "BinderWith1L"]


def test_registry_is_complete():
    assert list(RULES) == BASE_RULES
    assert len(LEMMAS) >= 34


@pytest.mark.parametrize("name", BASE_RULES)
def test_rule_sound(name):
    rep = verify_all(DS, seed=3, trials_per_rule=5, names={name})
    bad = [(v.d, v.max_dev, v.params) for v in rep.verdicts if not v.passed]
    assert not bad


@pytest.mark.parametrize("name", BASE_RULES)
def test_rule_flip_closure(name):
    rep = verify_all(DS, seed=4, trials_per_rule=3, names={name}, flipped=True)
    assert rep.all_passed, [(v.d, v.max_dev) for v in rep.verdicts if not v.passed]


@pytest.mark.parametrize("name", sorted(LEMMAS))
def test_lemma_sound(name):
    rep = verify_all(DS, seed=5, trials_per_rule=3, kind="lemmas", names={name})
    assert rep.all_passed, [(v.d, v.max_dev) for v in rep.verdicts if not v.passed]


def test_bsj_flip_uses_stated_form():
    r = build_rule("Bsj", 4, {"j": 3}, flipped=True)
    # the stated upside-down form is a triangle absorbed by a red effect
    assert r.lhs.signature() == ((4,), ())
    assert {n.kind for n in r.lhs.nodes.values()} == {"triangle", "X"}
    assert verify_rule(r).passed


@pytest.mark.parametrize("d", [3, 4, 5])
def test_horizontal_wire_is_an_inequality(d):
    v = verify_rule(build_lemma("HorizontalWire", d))
    assert v.passed and v.max_dev >= 0.5


def test_horizontal_wire_equal_at_d2():
    v = verify_rule(build_lemma("HorizontalWire", 2))
    assert v.passed and v.max_dev <= 1e-12


def test_s1_example():
    r = build_rule("S1", 3, {"a": (2, 1j), "b": (1, -1), "n1": 1, "m1": 1, "n2": 0, "m2": 1})
    rhs_node = list(r.rhs.nodes.values())[0]
    assert rhs_node.phase == (2, -1j)
    assert len(r.lhs.nodes) == 2
    assert verify_rule(r).passed


def test_inv_and_eu_examples():
    v = verify_rule(build_rule("Inv", 4))
    assert v.passed and v.max_dev < 1e-12
    for d in DS:
        assert verify_rule(build_rule("EU", d)).max_dev < 1e-12


def test_mutation_is_caught():
    r = build_rule("K2", 3, seed=1)
    bad = RuleInstance("K2-mutant", 3, r.params, r.lhs,
                       compose_par(r.rhs, scalar_gadget(1.5, 3)), "Figure1")
    v = verify_rule(bad)
    assert not v.passed and v.status == "fail" and v.max_dev > 1e-3


def test_edge_case_phases():
    zero, one = (0,) * 3, (1,) * 3
    for a in (zero, one, (0, 2, 0)):
        for name in ("S1", "Pcy", "Ept"):
            params = {"a": a, "b": one} if name == "S1" else {"a": a}
            assert verify_rule(build_rule(name, 4, params)).passed
    assert verify_rule(build_rule("AD", 4, {"a": zero, "b": (0, 5, 0)})).passed


def test_k2_prime_frozen():
    # d = 3, j = 1: a' = (a_0 / a_2, a_1 / a_2)
    assert k2_prime((2, 4), 1, 3) == pytest.approx((1 / 4, 2 / 4))


def test_inconclusive_when_capped():
    r = build_rule("B3", 5, {"n": 3, "m": 3})
    v = verify_rule(r, cap=10)
    assert v.status == "inconclusive" and not v.passed


def test_dbox():
    assert np.allclose(interpret(dbox(2)).matrix(), 0.5 * np.array([[1, 1], [1, -1]]))
    assert interpret(zs((0, 0, -0.75), 0, 0, 4)).data == pytest.approx(0.25)


def test_verify_all_deterministic_and_ordered():
    a = verify_all([2, 3], seed=7, trials_per_rule=2)
    b = verify_all([2, 3], seed=7, trials_per_rule=2)
    assert a.to_dict() == b.to_dict()
    names = [v.name for v in a.verdicts]
    assert names == [n for n in BASE_RULES for _ in range(4)]


def test_empty_d_range():
    rep = verify_all([], seed=0)
    assert rep.verdicts == [] and rep.all_passed


def test_unknown_names_and_params():
    with pytest.raises(KeyError):
        build_rule("Nope", 3)
    with pytest.raises(KeyError):
        build_lemma("Nope", 3)
    with pytest.raises(ValueError):
        build_rule("S2", 3, {"bogus": 1})
    with pytest.raises(ValueError):
        build_rule("S2", 1)


def test_signature_mismatch_rejected():
    with pytest.raises(ValueError):
        RuleInstance("x", 2, {}, zs((1,), 1, 1, 2), zs((1,), 1, 2, 2), "Derived")


def test_x_fusion_label():
    r = build_lemma("XFusion", 2, {"j": 1, "k": 1, "n1": 1, "m1": 0, "n2": 0, "m2": 1})
    assert list(r.rhs.nodes.values())[0].label == 0
    assert verify_rule(r).passed
