"""quzx: qudit and mixed-dimension ZX diagrams, their tensor semantics,
rule verification, structural simplification and normal-form synthesis."""

__version__ = "0.1.0"

from .diagram import (BINDER, H, H_DAG, SPLITTER, TRIANGLE, TRIANGLE_INV, W, X, Z, Builder,
                      Diagram, DiagramError, Edge, Node, adjoint, cap, compose_par, compose_seq,
                      cup, empty, identity, make_node, new_generator, permutation, swap,
                      transpose, validate)
from .normal_form import (RowAdditionSpec, basis_index, basis_state, digits_of,
                          matrix_normal_form, row_addition_diagram, row_mult_diagram,
                          scalar_normal_form, vector_normal_form, w_normal_form)
from .rewrite import (CORE_RULES, RewriteStep, Site, Trace, apply_step, extract_scalar,
                      find_matches, replay, simplify)
from .rules import (LEMMAS, RULES, RuleInstance, VerificationReport, build_lemma, build_rule,
                    dbox, verify_all, verify_rule)
from .tensor import (ContractionCapError, ContractionPlan, DenseTensor, approx_eq,
                     interpret, interpret_kind, plan_contraction)
