"""
Finite distributive lattices and their posets of join-irreducibles
==================================================================

"""

from stepdual.duality import dual_dl
from stepdual.order import FinDistLattice, FinPoset, downset_lattice, filters, join_irreducibles

# the four-element diamond, given by its Hasse diagram
diamond = FinDistLattice.from_poset(FinPoset.generated("0ab1", [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]))
print("join-irreducibles:", join_irreducibles(diamond).elements)

# going back: down-sets of those points rebuild a lattice of the same shape
back = downset_lattice(dual_dl(diamond).poset)
print("sizes:", len(diamond), len(back))

# filters are principal in a finite lattice, so there are as many as elements
print("filters:", [sorted(F) for F in filters(diamond).elements])

# Graphviz source for the Hasse diagram
print(diamond.to_dot())
