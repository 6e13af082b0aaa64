"""
A chain that loses controllability
===================================

Two-mass chains are always controllable from the first mass and observable
at the last. With three masses a suitable stiffness makes one root of the
transfer numerator a root of the characteristic polynomial too. The input
then cannot excite that mode.
"""

import numpy as np

from dashchain import assemble_state_space, decide
from dashchain.analysis import make_controllable_nonproportional_n3, make_counterexample_n3
from dashchain.dynamics import reachability_gramian

ce = make_counterexample_n3(m=(1, 1, 1), k1=1, c1=1, c2=1)
print("derived k2      :", ce.k2)
print("shared root z1  :", ce.common_root)

verdict = decide(ce.spec)
print("gcd             :", verdict.gcd)
print("Kalman ranks    :", verdict.kalman_control_rank, verdict.kalman_observe_rank)

# The reachability Gramian is numerically singular: one direction is
# unreachable however long we push
ev = np.linalg.eigvalsh(reachability_gramian(assemble_state_space(ce.spec), 1.0))
print("Gramian min/max : %.1e" % (ev[0] / ev[-1]))

# Non-proportional damping does not doom a chain: k = [1, 2] is fine
spec = make_controllable_nonproportional_n3((1, 1, 1), 1, 1)
v = decide(spec)
print("\nk =", [str(k) for k in spec.stiffness], "controllable/observable:",
      v.controllable_observable, "proportional:", v.proportionality_holds)
