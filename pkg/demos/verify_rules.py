"""Check every rule and lemma numerically at a few dimensions."""
from quzx.rules import verify_all

for kind in ("rules", "lemmas"):
    rep = verify_all([2, 3, 4, 5], seed=7, trials_per_rule=3, kind=kind)
    c = rep.counts
    print(f"{kind}: {c['pass']} passed, {c['fail']} failed, "
          f"{c['inconclusive']} inconclusive, max deviation {rep.max_dev:.1e}")

rep = verify_all([3], trials_per_rule=1, names=["S1", "EU", "Bsj", "K2"])
print()
print(rep.table())
