"""
Checking inference rules for probability thresholds
===================================================

Every rule instance is tried on every measure coming from a small structure.
"""

from stepdual.fo import Signature, parse_fo
from stepdual.gamma import check_rules, pairing_universe, qgrid, synthetic_measures

sig = Signature({"P": 1})
formulas = [parse_fo(t, sig) for t in ("P(v1)", "exists v1. P(v1)", "forall v1. P(v1)")]
measures = pairing_universe(sig, 3, 1, formulas)

report = check_rules(measures, qgrid(4))
for name, result in report.rules.items():
    print(f"{name:18s} sound={result.sound} instances={result.instances}")

# the same rules over every measure with values in quarters
extra = synthetic_measures(measures[0].algebra, measures[0].space, 4)
print(len(extra), "synthetic measures; all sound:", check_rules(extra, qgrid(4)).ok)
