"""
Lattices from generators and relations
======================================

Elements are sets of admissible points: valuations of the generators that
respect every relation.
"""

import warnings

from stepdual.duality import f_arrow, f_box, joins_at_primes
from stepdual.errors import InconsistentPresentation
from stepdual.order import chain_lattice, is_isomorphic
from stepdual.presented import Presentation, free_dl, gen, leq, meet, quotient, realize

# free distributive lattices on 0..3 generators
print("free sizes:", [len(free_dl([f"g{i}" for i in range(n)])) for n in range(4)])

# g1 <= g2, written as g1 & g2 = g1
L = quotient(Presentation(["g1", "g2"], [(meet(gen("g1"), gen("g2")), gen("g1"))], "DL"))
print("points:", [sorted(p) for p in L.points])
print("g1 <= g2 holds:", leq(L.gen("g1"), L.gen("g2")))

# the meet-preserving box construction on a 3-chain gives a 4-chain
lattice, points = realize(f_box(chain_lattice(3)))
print("box of 3-chain is a 4-chain:", is_isomorphic(lattice, chain_lattice(4)))

# arrow generators between two chains, and whether joins are preserved at primes
C2, C3 = chain_lattice(2), chain_lattice(3)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", InconsistentPresentation)
    theta = f_arrow(C3, C2)
print("arrow points:", len(theta.points), "joins at primes:", bool(joins_at_primes(theta, C3, C2)))
