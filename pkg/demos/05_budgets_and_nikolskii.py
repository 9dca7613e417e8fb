"""Comparing point budgets, and why p > 2 is different.

The entropy-based budget grows like v log^2 while the older bounds grow like
v^2.  For p > 2 the Nikolskii inequality fails on lacunary sums, so the sup
norm of a sparse function is not controlled by v^(1/p) times its L_p norm.
"""
from udisc.budget import compare_budgets, required_m_integral, budget_shape
from udisc.verifier import nikolskii_counterexample

print("    v       old (p=2)          new   new/old")
for v in (16, 256, 4096, 65536):
    rec = compare_budgets(v, N=1024, p=2, n_hc=10)
    print(f"{v:5d} {rec['old_p2']:15.0f} {rec['new']:12.0f} {rec['new'] / rec['old_p2']:9.3f}")

# The integral budget against the closed-form shape for H(t) = v / t.
for eps in (0.5, 0.25):
    m = required_m_integral(1.0, eps, 3 * 16, lambda t: 16 / t)
    print(f"eps={eps}: integral budget {m:.3e}, shape {budget_shape(eps, 16, 1, 1, 3):.3e}")

for v in (2, 3, 4):
    ratio, scale = nikolskii_counterexample(v, 4.0)
    print(f"v={v}: ||f||_inf / ||f||_4 >= {ratio:.3f}, v^(1/4) = {scale:.3f}")
