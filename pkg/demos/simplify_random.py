"""Simplify random diagrams and show what the rewrite engine did."""
from collections import Counter

import numpy as np

from quzx import interpret
from quzx.rewrite import replay, simplify
from quzx.serialize import diagram_dumps
from quzx.tensor import deviation
from quzx.testing import random_diagram

rng = np.random.default_rng(1)
fired = Counter()
worst = 0.0
for _ in range(100):
    D = random_diagram(rng, max_nodes=10)
    S, trace = simplify(D)
    fired.update(step.rule for step in trace)
    worst = max(worst, deviation(interpret(D), interpret(S)))
    assert diagram_dumps(replay(D, trace)) == diagram_dumps(S)

print(f"100 random diagrams, worst deviation {worst:.1e}")
for rule, n in fired.most_common():
    print(f"  {rule:<22} {n}")

D = random_diagram(np.random.default_rng(5), max_nodes=8, d=3)
S, trace = simplify(D)
print(f"\none diagram: {len(D.nodes)} nodes / {len(D.edges)} edges -> "
      f"{len(S.nodes)} nodes / {len(S.edges)} edges")
for step in trace:
    print(f"  {step.rule:<22} on {step.matched} scalar {step.scalar:.3g}")
