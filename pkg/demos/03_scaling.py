"""How many random points does a v-sparse class need?

For each sparsity v we search for the smallest prefix of one iid sequence
that passes exhaustive verification, take the median over seeds and fit a
power law m ~ c v^alpha.  Small N keeps this quick; see the acceptance run
for the N = 33 numbers.
"""
from udisc import make_trig_real
from udisc.studies import fit_power_law, scaling_study

d = make_trig_real(8)
vs = [1, 2, 3]
points = scaling_study(d, vs, 2.0, seeds=range(6), m_max=400)
for pt in points:
    print(f"v={pt.v}: minimal m per seed {pt.minimal_m}, median {pt.median}")

c, alpha = fit_power_law(vs, [pt.median for pt in points])
print(f"fit: m ~ {c:.1f} * v^{alpha:.2f}")
