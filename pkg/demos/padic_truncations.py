"""
Truncated p-adic integers
=========================

``Z / p^k`` with the p-adic metric is an ultrametric homogeneous space. Its
average distance approaches ``p / (p + 1)`` from below.
"""

from fractions import Fraction

from antipode import check_bounds, classify_antipodality, is_ultrametric, padic_average, padic_space

###########################################################################
# Small cases as explicit distance matrices.

for p, k in [(2, 3), (3, 2), (5, 2)]:
    t = padic_space(p, k)
    X = t.space
    b = check_bounds(X)
    rep = classify_antipodality(X, t.automorphisms)
    print(f"p={p} k={k}: n={X.n} ultrametric={is_ultrametric(X)} A={b.A} D={b.D} {rep.tier.name}")

###########################################################################
# Larger depths come from counting valuation shells, never from pairs.

for p in (2, 3, 5):
    for k in (1, 2, 4, 8, 16):
        a = padic_average(p, k)
        print(f"p={p} k={k:2}: A={float(a.value):.12f} limit={a.limit} gap={float(a.gap):.3e}")

assert padic_average(2, 10).gap < Fraction(1, 10**6)
