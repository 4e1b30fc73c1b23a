"""Seeded generators for synthetic worlds with known (planted) structure."""

import numpy as np

from .ingest import CountryIncome, ProductMeta, TradeRecord
from .proximity import ProximityMatrix
from .specialization import RcaMatrix, SpecializationMatrix, binarize


def product_codes(n, start=1000):
    return tuple(f"{start + k:04d}" for k in range(n))


def country_codes(n):
    out = []
    for k in range(n):
        a, rem = divmod(k, 26 * 26)
        b, c = divmod(rem, 26)
        out.append("".join(chr(65 + v) for v in (a, b, c)))
    return tuple(out)


def random_specialization(rng, n_countries, n_products, p=0.3):
    bits = rng.random((n_countries, n_products)) < p
    return SpecializationMatrix(country_codes(n_countries), product_codes(n_products), bits)


def random_proximity(rng, n, zero_frac=0.2, levels=None):
    """Symmetric random proximity matrix.

    With ``levels`` the values are drawn from ``k / levels`` so that ties occur.
    """
    vals = rng.random((n, n))
    if levels:
        vals = np.round(vals * levels) / levels
    vals[rng.random((n, n)) < zero_frac] = 0.0
    phi = np.triu(vals, k=1)
    phi = phi + phi.T
    return ProximityMatrix(product_codes(n), phi)


def planted_transitions(seed=0, n_trials=1000, cut=0.6, n_products=40, max_basket=5):
    """A world where a candidate product is acquired iff ``phi* > cut``.

    Every country holds a small random basket (RCA 2) and every other
    product sits at RCA 0.1, so all of them are candidates.  Candidates
    become transitions (RCA 1.5) exactly when their nearest developed
    neighbour is closer than ``cut``, otherwise they stay undeveloped
    (RCA 0.2).  Countries are added until ``n_trials`` candidates exist;
    surplus candidates of the last country are moved out of the table by
    giving them a start RCA of 0.7.

    Returns ``(s0, p, r0, r1)``.
    """
    rng = np.random.default_rng(seed)
    u = rng.random((n_products, n_products)) ** 2
    phi = np.triu(u, k=1)
    phi = phi + phi.T
    # keep proximities off the cut so the plant is unambiguous
    phi[np.abs(phi - cut) < 1e-9] += 1e-6
    np.fill_diagonal(phi, 0.0)

    r0_rows, r1_rows = [], []
    remaining = n_trials
    while remaining > 0:
        size = int(rng.integers(1, max_basket + 1))
        basket = rng.choice(n_products, size=size, replace=False)
        held = np.zeros(n_products, dtype=bool)
        held[basket] = True
        star = phi[held].max(axis=0)
        r0 = np.where(held, 2.0, 0.1)
        r1 = np.where(held, 2.0, np.where(star > cut, 1.5, 0.2))
        cand = np.flatnonzero(~held)
        if cand.size > remaining:
            r0[cand[remaining:]] = 0.7
        remaining -= min(cand.size, remaining)
        r0_rows.append(r0)
        r1_rows.append(r1)
    countries = country_codes(len(r0_rows))
    products = product_codes(n_products)
    r0 = RcaMatrix(countries, products, np.array(r0_rows))
    r1 = RcaMatrix(countries, products, np.array(r1_rows))
    return binarize(r0, 1.0), ProximityMatrix(products, phi), r0, r1


def two_cluster_world(
    seed=0,
    n_core=30,
    n_periphery=30,
    n_rich=20,
    n_poor=20,
    within=0.8,
    bridge=0.6,
    background=0.1,
    n_bridges=3,
    basket=6,
):
    """A rich core and a poor periphery joined only by ``bridge``-strength links.

    Within each cluster products form a sparse ring-plus-chords graph at
    ``within``; ``n_bridges`` core/periphery pairs sit at exactly ``bridge``;
    everything else is at ``background``.  Rich countries start with core
    products, poor ones with periphery products (every product has at least
    one exporter), and incomes differ by an order of magnitude.

    Returns ``(r, s, p, incomes)``.
    """
    rng = np.random.default_rng(seed)
    n = n_core + n_periphery
    phi = np.full((n, n), background)
    for lo, size in ((0, n_core), (n_core, n_periphery)):
        idx = np.arange(lo, lo + size)
        for k in range(size):
            a, b = idx[k], idx[(k + 1) % size]
            phi[a, b] = phi[b, a] = within
        for _ in range(size):
            a, b = rng.choice(idx, size=2, replace=False)
            phi[a, b] = phi[b, a] = within
    for a, b in zip(
        rng.choice(n_core, size=n_bridges, replace=False),
        n_core + rng.choice(n_periphery, size=n_bridges, replace=False),
    ):
        phi[a, b] = phi[b, a] = bridge
    np.fill_diagonal(phi, 0.0)

    n_c = n_rich + n_poor
    values = np.zeros((n_c, n))
    for members, lo, size in ((range(n_rich), 0, n_core), (range(n_rich, n_c), n_core, n_periphery)):
        # deal the cluster round-robin so every product has an exporter, then top up
        dealt = lo + rng.permutation(size)
        for k, q in enumerate(dealt):
            values[members[k % len(members)], q] = rng.uniform(1.5, 4.0)
        for i in members:
            extra = basket - np.count_nonzero(values[i])
            if extra > 0:
                free = lo + np.flatnonzero(values[i, lo : lo + size] == 0)
                held = rng.choice(free, size=min(extra, free.size), replace=False)
                values[i, held] = rng.uniform(1.5, 4.0, size=held.size)
    countries = country_codes(n_c)
    products = product_codes(n)
    incomes = [
        CountryIncome(
            c,
            float(rng.uniform(29000, 31000) if i < n_rich else rng.uniform(2900, 3100)),
            2000,
        )
        for i, c in enumerate(countries)
    ]
    r = RcaMatrix(countries, products, values)
    return r, binarize(r, 1.0), ProximityMatrix(products, phi), incomes


LEAMER = ("machinery", "chemicals", "capital intensive", "labor intensive", "cereals", "tropical")


def trade_world(seed=0, n_countries=24, n_products=36, n_clusters=6, years=range(1988, 2001)):
    """A small multi-year trade dataset with clustered products.

    Countries carry affinities for a couple of product clusters and slowly
    pick up affinity for the next cluster over the years, so specialization
    spreads between related products.  Returns ``(records, incomes, meta)``.
    """
    rng = np.random.default_rng(seed)
    years = list(years)
    products = product_codes(n_products)
    countries = country_codes(n_countries)
    cluster = np.arange(n_products) % n_clusters
    wealth = np.sort(rng.uniform(0, 1, n_countries))
    affinity = np.zeros((n_countries, n_clusters))
    for i in range(n_countries):
        home = int(min(n_clusters - 1, wealth[i] * n_clusters))
        affinity[i, home] = 1.0
        affinity[i, rng.integers(n_clusters)] += 0.5
    growth = rng.uniform(0.0, 0.06, n_countries)
    base = rng.lognormal(0.0, 0.5, n_products)

    records = []
    for t, year in enumerate(years):
        level = affinity.copy()
        nxt = (np.argmax(affinity, axis=1) + 1) % n_clusters
        level[np.arange(n_countries), nxt] += growth * t
        lam = 1.0 + 6.0 * level[:, cluster]
        noise = rng.lognormal(0.0, 0.35, (n_countries, n_products))
        values = np.round(base * lam * noise * 100.0 * (1 + wealth[:, None]), 3)
        for i, c in enumerate(countries):
            if i == n_countries - 1 and t % 4 == 1:
                continue  # one country misses some years
            for j, p in enumerate(products):
                if values[i, j] >= 20.0:
                    records.append(TradeRecord(year, c, p, float(values[i, j])))
    incomes = [
        CountryIncome(c, float(round(800 + 40000 * wealth[i] ** 2, 2)), y)
        for y in years
        for i, c in enumerate(countries)
    ]
    meta = {
        p: ProductMeta(p, f"product {p}", LEAMER[cluster[j] % len(LEAMER)])
        for j, p in enumerate(products)
    }
    return records, incomes, meta


def write_trade_world(directory, seed=0, **kwargs):
    """Write ``trade.csv``, ``income.csv`` and ``meta.csv`` for :func:`trade_world`."""
    from pathlib import Path

    from ._io import fmt, write_csv

    directory = Path(directory)
    records, incomes, meta = trade_world(seed, **kwargs)
    write_csv(
        directory / "trade.csv",
        ("year", "exporter", "sitc4", "value"),
        ((str(r.year), r.exporter, r.product, fmt(r.value)) for r in records),
    )
    write_csv(
        directory / "income.csv",
        ("country", "year", "gdp_pc"),
        ((r.country, str(r.year), fmt(r.gdp_per_capita)) for r in incomes),
    )
    write_csv(
        directory / "meta.csv",
        ("sitc4", "name", "leamer_class"),
        ((m.product, m.name, m.leamer_class or "") for m in meta.values()),
    )
    return directory
