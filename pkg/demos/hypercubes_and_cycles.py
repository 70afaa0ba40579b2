"""
Hypercubes and even cycles sit on the lower bound
=================================================

Average distance ``A`` and diameter ``D`` for two families of Cayley graphs,
computed exactly from all-pairs shortest paths.
"""

from fractions import Fraction

from antipode import apsp_metric, check_bounds, classify_antipodality, cycle, distance_distribution, hypercube

###########################################################################
# Hypercubes. Every vertex has a single antipode (its bit complement) and
# ``A`` lands exactly on ``D/2``.

for d in range(1, 9):
    g = hypercube(d)
    X = apsp_metric(g)
    b = check_bounds(X)
    rep = classify_antipodality(X, g.automorphisms)
    print(f"Q_{d}: D={b.D}  A={b.A}  D/2 tight={b.lower_tight}  {rep.tier.name}")

###########################################################################
# The distance law of ``Q_6`` is binomial, hence symmetric about ``D/2``.

for v, m in distance_distribution(apsp_metric(hypercube(6))).entries:
    print(f"  d={v}: {m}")

###########################################################################
# Even cycles behave the same way, odd cycles do not: ``C_(2n+1)`` has two
# antipodes per vertex and ``A`` is strictly above ``D/2``.

for n in (8, 9, 12, 13):
    g = cycle(n)
    X = apsp_metric(g)
    b = check_bounds(X)
    rep = classify_antipodality(X, g.automorphisms)
    print(f"C_{n}: D={b.D}  A={b.A}  A-D/2={b.A - Fraction(b.D, 2)}  {rep.tier.name}")
