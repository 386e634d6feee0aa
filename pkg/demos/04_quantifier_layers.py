"""
Adding a layer of quantifiers to a Boolean algebra of definable sets
====================================================================

"""

from stepdual.fo import Signature, enumerate_structures, generated_subalgebra, model_space, parse_fo, semantics_set
from stepdual.layers import cyclic_ring, exists_layer, measures_space, semiring_layer, verify_exists_duality, verify_semiring_duality

sig = Signature({"P": 1})
structures = enumerate_structures(sig, 3)
print(len(structures), "structures up to isomorphism")

# points: a structure together with a value for v1
space = model_space(structures, 1)
B = generated_subalgebra([semantics_set(parse_fo("P(v1)", sig), space)], space)
print("algebra:", B)

layer = exists_layer(B, space, 1)
print("existential layer atoms:", len(layer.algebra.atoms))
print("duality check:", verify_exists_duality(B, space, 1).checks)

# counting witnesses modulo 3 separates more structures than existence does
Z3 = cyclic_ring(3)
print("mod-3 layer atoms:", len(semiring_layer(B, space, Z3, 1).algebra.atoms))
print("duality check:", verify_semiring_duality(B, space, Z3, 1).checks)

# finitely additive Z/2-valued measures on a 2-point space
print("measures:", measures_space(["x", "y"], cyclic_ring(2)))
