"""
Random assignments, pairing values and tagged probabilities
===========================================================

"""

from stepdual.fo import FinStructure, Signature, parse_fo
from stepdual.gamma import down, gamma_approx, measure_of, parse_prob, prob_sat, stone_pairing, stone_pairing_gamma, up

sig = Signature({"P": 1})
A = FinStructure(2, {"P": [(1,)]})

print(stone_pairing(parse_fo("P(v1)", sig), A, 1))
print(stone_pairing(parse_fo("P(v1) & P(v2)", sig), A, 2))
print(stone_pairing_gamma(parse_fo("P(v1)", sig), A, 1))

# each rational splits into a point reached from below and a point that stabilises
for n in (2, 4, 8):
    print(n, gamma_approx(down("1/2"), n), gamma_approx(up("1/2"), n))

mu = measure_of(A, [parse_fo("P(v1)", sig)], 1)
for text in ("P>=1/2 { P(v1) }", "P>=3/4 { P(v1) }", "P<3/4 { P(v1) }"):
    print(text, prob_sat(mu, parse_prob(text, sig)))
