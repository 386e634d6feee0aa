"""
The step-by-step free modal algebra
===================================

Level n+1 pairs a valuation with a subset of level n.
"""

from stepdual.modal import build_tower, equivalent_at_rank, interpret_at, parse_modal, separating_point

print("no variables:", build_tower([], 3).sizes)
print("one variable:", build_tower(["p"], 2).sizes)

T = build_tower(["p"], 2)
for text in ("dia p", "dia dia p", "~dia ~p"):
    phi = parse_modal(text)
    print(f"{text:12s} holds at {len(interpret_at(phi, T, 2))} of {T.sizes[2]} points")

# no transitivity: dia dia p and dia p differ, and a point shows it
phi, psi = parse_modal("dia dia p"), parse_modal("dia p")
print("equivalent:", equivalent_at_rank(phi, psi, T))
print("witness:", separating_point(phi, psi, T))
