"""
Quarter car over a bump
========================

Wheel (m1) and quarter body (m2) form a two-mass chain; the tyre couples
the wheel to the road. Drive it over a 5 cm step, then recover the initial
state from body-position samples alone, with and without a suspension
damper.
"""

import numpy as np

from dashchain.dynamics import QuarterCarSpec, quarter_car_demo, road_profile

bump = road_profile("step:0.05:0.5")
x0 = [0.01, -0.02, 0.1, 0.0]  # wheel, body positions (m) and velocities (m/s)

for label, car in [("damped", QuarterCarSpec(road=bump)),
                   ("no damper", QuarterCarSpec(c1=0.0, road=bump))]:
    run = quarter_car_demo(car, horizon=3.0, initial_state=x0)
    body = run.trajectory.states[:, 1]
    print(f"{label:>9}: body peak {body.max():.4f} m, "
          f"final {body[-1]:.4f} m, reconstruction error {run.reconstruction_error:.1e}")

# Trajectory as CSV for external plotting: z1, z2 are wheel and body positions,
# z3, z4 their velocities, y the body position and u the tyre force
run = quarter_car_demo(QuarterCarSpec(road=road_profile("sine:0.02:1.5")), horizon=1.0, step=1e-3)
print(run.trajectory.to_csv().splitlines()[0])
print("max |state| on a sine road: %.4f" % np.max(np.abs(run.trajectory.states)))
