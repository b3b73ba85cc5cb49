"""Build normal-form diagrams for a vector and a matrix and check them."""
import numpy as np

from quzx import interpret
from quzx.diagram import compose_seq
from quzx.normal_form import (count_row_additions, count_w_boxes, matrix_normal_form,
                              vector_normal_form, w_normal_form)

rng = np.random.default_rng(0)
d, m = 3, 2
v = rng.normal(size=d ** m) + 1j * rng.normal(size=d ** m)

D = vector_normal_form(v, d, m)
W = w_normal_form(v, d, m)
print(f"qutrit pair: row-addition form has {len(D.nodes)} nodes "
      f"({count_row_additions(D)} row additions), W form has {len(W.nodes)} nodes "
      f"({count_w_boxes(W)} boxes)")
for name, form in (("row-addition", D), ("W", W)):
    dev = np.max(np.abs(interpret(form).matrix().reshape(-1) - v))
    print(f"  {name:>12} form reconstructs v to {dev:.1e}")

M = rng.normal(size=(2, 3))
N = rng.normal(size=(3, 4))
prod = compose_seq(matrix_normal_form(N), matrix_normal_form(M))
dev = np.max(np.abs(interpret(prod).matrix() - M @ N))
print(f"2x3 times 3x4 via composed normal forms: deviation {dev:.1e}")
