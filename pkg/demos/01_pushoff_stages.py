"""Walk a loop off the to-and-fro set, one stage at a time.

A to-and-fro loop retraces its own path; the push-off grafts a short
out-and-back spur onto both ends while squeezing the original loop into
the middle, and the distance to the to-and-fro set grows from zero to a
definite gap.  This script prints that growth for a loop that starts
exactly to-and-fro.
"""

import numpy as np

from loopbu import default_pushoff_arcs, default_tf_params, pushoff_homotopy, tf_sphere_embed

m = 256
params = default_tf_params(1)
omega = tf_sphere_embed(np.array([0.6, 0.8]), params, m)
arcs = default_pushoff_arcs(2)

print(f"starting loop: m = {m}, tf distance = {omega.tf_distance():.3e}")
print()
print("  s      tf distance")
for s in np.linspace(0.0, 1.0, 11):
    pushed = pushoff_homotopy(omega, s, arcs)
    print(f"  {s:4.2f}   {pushed.tf_distance():.6f}")

print()
final = pushoff_homotopy(omega, 1.0, arcs)
print(f"final tf distance {final.tf_distance():.6f} (guaranteed >= sqrt(2) = {np.sqrt(2):.6f})")
print("the s = 0 stage reproduces the input, sample for sample:")
frozen = pushoff_homotopy(omega, 0.0, arcs)
print(f"  max |difference| = {np.max(np.abs(frozen.samples - omega.samples)):.1e}")
