"""Independent reference semantics written as plain loops over basis indices.

Nothing here imports the evaluator; every entry is computed straight from
the generator formulas, one index tuple at a time.
"""
import cmath
import itertools
import math

import numpy as np


def xi(d):
    return cmath.exp(2j * math.pi / d)


def z_entry(phase, outs, ins):
    legs = tuple(outs) + tuple(ins)
    if not legs:
        return 1 + sum(phase)
    if any(v != legs[0] for v in legs):
        return 0
    return 1 if legs[0] == 0 else phase[legs[0] - 1]


def x_entry(d, j, outs, ins):
    return 1 if (sum(outs) + j - sum(ins)) % d == 0 else 0


def h_entry(d, o, i, dagger=False):
    val = xi(d) ** (o * i)
    return val.conjugate() if dagger else val


def tri_entry(o, i, inverse=False):
    diag = 1 if o == i else 0
    top = 1 if (o == 0 and i >= 1) else 0
    return diag - top if inverse else diag + top


def _w_side(vals):
    nz = [v for v in vals if v != 0]
    if len(nz) > 1:
        return None
    return nz[0] if nz else 0


def w_entry(outs, ins):
    a, b = _w_side(outs), _w_side(ins)
    return 1 if a is not None and b is not None and a == b else 0


def oracle_tensor(kind, d=0, n_in=1, n_out=1, phase=None, label=None, s=0, t=0):
    """Dense array with axes outputs first, filled entry by entry."""
    if kind == "binder":
        arr = np.zeros((s * t, s, t), dtype=complex)
        for o in range(s * t):
            for k in range(s):
                for l in range(t):
                    arr[o, k, l] = 1 if o == k * t + l else 0
        return arr
    if kind == "splitter":
        arr = np.zeros((s, t, s * t), dtype=complex)
        for k in range(s):
            for l in range(t):
                for i in range(s * t):
                    arr[k, l, i] = 1 if (k, l) == divmod(i, t) else 0
        return arr
    shape = (d,) * (n_out + n_in)
    arr = np.zeros(shape, dtype=complex)
    for idx in itertools.product(range(d), repeat=n_out + n_in):
        outs, ins = idx[:n_out], idx[n_out:]
        if kind == "Z":
            val = z_entry(phase, outs, ins)
        elif kind == "X":
            val = x_entry(d, label, outs, ins)
        elif kind in ("H", "H_dag"):
            val = h_entry(d, outs[0], ins[0], dagger=kind == "H_dag")
        elif kind in ("triangle", "triangle_inv"):
            val = tri_entry(outs[0], ins[0], inverse=kind == "triangle_inv")
        elif kind == "W":
            val = w_entry(outs, ins)
        else:
            raise ValueError(kind)
        arr[idx] = val
    return arr


def matmul_chain(*mats):
    """Product applying the first matrix first (diagram order)."""
    out = np.eye(mats[0].shape[1], dtype=complex)
    for m in mats:
        out = m @ out
    return out
