"""
Characteristic and transfer polynomials of a chain
===================================================

Build a three-mass chain with exact rational parameters, grow its
characteristic polynomial one mass at a time, and compare with the
determinant computed directly from the state matrix.
"""

from fractions import Fraction

from dashchain import ChainSpec, assemble_state_space
from dashchain.poly_engine import (
    adjoint_poly_closed_form,
    char_poly_det_oracle,
    recursion_states,
)

spec = ChainSpec(masses=(1, 2, 3), stiffness=(1, 1), damping=(1, Fraction(1, 2)))

# Each level adds one mass; P_n always carries the z^2 of the rigid mode
for state in recursion_states(spec):
    print(f"P_{state.level}(z) = {state.p_current}")

# The same polynomial straight from det(zI - F), fraction-free elimination
model = assemble_state_space(spec)
print("det(zI - F)  =", char_poly_det_oracle(model))

# The numerator of the transfer function factors into one term per link
fact = adjoint_poly_closed_form(spec)
print("h adj(zI-F) g =", fact.expand())
print("   factored   =", fact)
print("   roots      =", [str(r) for r in fact.roots])
