"""
Sweeping random abelian Cayley graphs
=====================================

Random symmetric connection sets in products of cyclic groups. The bounds
hold in every case, and the strictly antipodal ones are exactly those with
``A = D/2``.
"""

import math
import random
import warnings

import numpy as np

from antipode import AbelianCayley, apsp_metric, cayley, check_bounds, classify_antipodality

rng = random.Random(7)
rows = []
while len(rows) < 25:
    moduli = [rng.randint(2, 10) for _ in range(rng.randint(1, 3))]
    n = math.prod(moduli)
    elems = [tuple(int(c) for c in np.unravel_index(rng.randrange(1, n), moduli)) for _ in range(rng.randint(1, 4))]
    conn = set(elems) | {tuple((-c) % m for c, m in zip(e, moduli)) for e in elems}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = cayley(AbelianCayley(moduli, sorted(conn)))
    if not g.connected:
        continue
    X = apsp_metric(g)
    b = check_bounds(X)
    tier = classify_antipodality(X, g.automorphisms).tier
    rows.append((str(moduli), len(conn), n, b, tier))

###########################################################################
# ``lower`` and ``upper`` are the slacks ``A - D/2`` and ``mu D - A``.

for moduli, k, n, b, tier in rows:
    print(f"{moduli:12} |S|={k:2} n={n:4} D={str(b.D):3} A={str(b.A):9} "
          f"lower={float(b.lower_slack):.4f} upper={float(b.upper_slack):.4f} {tier.name}")

assert all(b.lower_ok and b.upper_ok for *_, b, _ in rows)
assert all((t.name == "STRICTLY_ANTIPODAL") == b.lower_tight for *_, b, t in rows)
