"""Greedy approximation and metric entropy on small classes.

Orthogonal greedy pursuit approximates any member of the octahedron A_1 of an
orthonormal system at rate m^(-1/2).  The same rate drives the entropy
bound of sparse classes, which we then bracket numerically.
"""
import numpy as np

from udisc import make_trig_real
from udisc.entropy import ClassSpec, covering_upper, packing_lower
from udisc.greedy import ogp, random_a1_member, wcga

d = make_trig_real(32).restrict(range(64))
rng = np.random.default_rng(0)
target = random_a1_member(d, rng)
trace = ogp(target, d, 16)
for m in (1, 4, 16):
    print(f"ogp  m={m:2d}: residual {trace.residual_norms[m]:.4f}   m^-1/2 = {m ** -0.5:.4f}")

# In L_4 the Chebyshev variant chooses with the norming functional.
small = make_trig_real(6)
t4 = wcga(random_a1_member(small, rng), small, 6, p=4.0)
print("wcga p=4 residuals:", np.round(t4.residual_norms, 4))

# Entropy of 1-sparse functions over five trig elements, in the sup metric.
cls = ClassSpec(make_trig_real(2), v=1, p=2.0)
for t in (0.3, 0.6, 1.0):
    up = covering_upper(cls, t)
    lo = packing_lower(cls, 2 * t)
    print(f"t={t}: packing(2t) = {lo.count_lower} <= covering(t) = {up.count_upper}")
