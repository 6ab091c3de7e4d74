"""The three sphere-to-loop-space embeddings, checked for equivariance.

Each embedding e sends an equatorial point x to a loop, and sending x
to -x gives the reversed loop: e(-x) = star(e(x)).  That symmetry is
what turns coincidence finding into odd-map zero finding, so this tour
measures it directly for every embedding.
"""

import numpy as np

from loopbu import (
    default_tf_params,
    embed_alpha,
    embed_beta,
    embed_gamma,
    h_lambda,
    normalize,
    tf_sphere_embed,
)

rng = np.random.default_rng(42)
m = 128

v = rng.standard_normal(3)
v[-1] = 0.0
x = normalize(v)
print(f"equatorial point x = {np.round(x, 4)}")
print()

# great circle through both poles and x
alpha = embed_alpha(x, m)
err = np.max(np.abs(embed_alpha(-x, m).samples - alpha.star().samples))
print(f"alpha: tf distance {alpha.tf_distance():.4f}, equivariance error {err:.1e}")

# planar circle through the equatorial base point and x
beta = embed_beta(x, m)
print(f"beta:  starts at {np.round(beta.base, 4)}, passes x at t = 1/2: "
      f"{np.allclose(beta.samples[m // 2], x, atol=1e-12)}")

# the slide between them
print()
print("h_lambda interpolates alpha (lam = 0) to beta (lam = 1):")
for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
    loop = h_lambda(x, lam, m)
    print(f"  lam = {lam:4.2f}: base = {np.round(loop.base, 3)}")

# push-off composite: a to-and-fro loop deformed along meridians toward
# x and -x; this is the embedding the family sweeps use
print()
params = default_tf_params(1)
omega = tf_sphere_embed(normalize(rng.standard_normal(2)), params, m)
gamma = embed_gamma(omega, x)
err = np.max(np.abs(embed_gamma(omega, -x).samples - gamma.star().samples))
print(f"gamma: input tf {omega.tf_distance():.1e} -> output tf {gamma.tf_distance():.4f}, "
      f"equivariance error {err:.1e}")
