"""Why a point set can fail: aliasing on equispaced nodes.

Four equispaced nodes cannot tell cos(4 pi x) from the constant 1, so the
discrete mean square of that element is twice its true value.  The verifier
finds exactly this witness, and eight nodes remove the problem.
"""
from udisc import make_trig_real, verify_universal
from udisc.sampling import equispaced

d = make_trig_real(2)  # 1, cos 2pi x, sin 2pi x, cos 4pi x, sin 4pi x
print("dictionary:", d.labels)

rep = verify_universal(equispaced(4), d, v=1, p=2.0, epsilon=0.5)
support = rep.witness_max[0]
print(f"m=4 : ratio range [{rep.r_min:.3f}, {rep.r_max:.3f}], worst element {d.labels[support[0]]}")
print("      passes?", rep.passed)

# Eight nodes integrate every product of two elements exactly, so the
# ratio is 1 on every 2-sparse support.
rep = verify_universal(equispaced(8), d, v=2, p=2.0, epsilon=0.5)
print(f"m=8 : {rep.supports_checked} supports, ratio range [{rep.r_min:.12f}, {rep.r_max:.12f}]")
