"""
Which products do countries move into?
======================================

Compare two snapshots of the same world and ask whether new specializations
appear close to what a country already does.
"""

import tempfile
from pathlib import Path

import numpy as np

import productspace as ps
from productspace.dynamics import INCONCLUSIVE, TRANSITION, UNDEVELOPED, nearest_developed_proximity
from productspace.proximity import proximity
from productspace.specialization import reindex
from productspace.synthetic import write_trade_world

workdir = Path(tempfile.mkdtemp())
write_trade_world(workdir, seed=1)
trade = workdir / "trade.csv"

# the network comes from the late window, the dynamics from two single years
p = proximity(ps.binarize(ps.rca(ps.load_trade(trade, "1998:2000"))))
r0 = reindex(ps.rca(ps.load_trade(trade, 1990)), p.products)
r1 = reindex(ps.rca(ps.load_trade(trade, 1995)), p.products)
s0 = ps.binarize(r0)

# RCA < 0.5 at the start; transition if RCA > 1 later, undeveloped if still < 0.5
t = ps.classify_transitions(r0, r1, years=(1990, 1995))
print("transitions:", t.count(TRANSITION), " undeveloped:", t.count(UNDEVELOPED), " inconclusive:", t.count(INCONCLUSIVE))

# density: how much of a product's neighbourhood the country already covers
omega = ps.density_matrix(s0, p)
stats = ps.discovery_ratio(t, omega)
print(f"products with higher density among movers (H > 1): {stats.frac_above_one:.2f}")

# the chance of moving into a product rises with its nearest developed neighbour
for row in ps.transition_prob_by_proximity(t, s0, p):
    if row.opportunities:
        print(f"  phi* in [{row.low:.1f}, {row.high:.1f}): {row.probability:.3f} of {row.opportunities}")

star = nearest_developed_proximity(t, s0, p)
movers = star[t.labels == TRANSITION]
stayers = star[t.labels == UNDEVELOPED]
print(f"mean phi*: movers {np.mean(movers):.3f}, stayers {np.mean(stayers):.3f}")
