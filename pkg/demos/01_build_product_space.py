"""
Building a product space from trade flows
=========================================

Pool a synthetic trade file over a window of years, mark where each country
has a revealed comparative advantage, and turn co-specialization into a
weighted network over products.
"""

import tempfile
from pathlib import Path

import numpy as np

import productspace as ps
from productspace.proximity import proximity
from productspace.synthetic import write_trade_world

# a seeded toy world: 24 countries, 36 products in 6 clusters, 1988-2000
workdir = Path(tempfile.mkdtemp())
write_trade_world(workdir, seed=0)

exports = ps.load_trade(workdir / "trade.csv", "1998:2000")
print("pooled exports:", exports.shape)

# Balassa RCA, then the RCA > 1 specialization bits
r = ps.rca(exports)
s = ps.binarize(r)
print("specialized products per country:", s.bits.sum(axis=1))

# proximity: the smaller of the two conditional co-specialization probabilities
p = proximity(s)
stats = ps.phi_stats(p, thresholds=(0.1, 0.2, 0.5))
print("pairs:", stats.n_pairs, " zero:", round(stats.frac_zero, 3))
for t, frac in stats.frac_below.items():
    print(f"  share of pairs below {t}: {frac:.3f}")

# backbone (maximum spanning forest) plus every strong link above 0.55
g = ps.product_space(p, threshold=0.55, meta=ps.load_meta(workdir / "meta.csv"))
print("edges:", len(g.edges), {tag: len(g.edges_tagged(tag)) for tag in ("mst", "overlay")})

# how quickly the network falls apart as weak links are dropped
for sample in ps.component_curve(p, np.linspace(0, 1, 11)):
    print(f"  phi >= {sample.threshold:.1f}: giant component {sample.ratio:.2f}")

# products reordered so similar ones sit together
order = ps.hierarchical_order(p)
print("first products in clustered order:", order[:8])

ps.export_graph(g, workdir / "space.graphml", "graphml")
print("graph written to", workdir / "space.graphml")
