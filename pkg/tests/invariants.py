"""Invariant checks over one random instance each.

Every checker takes a numpy Generator, builds an instance from it and asserts.
The property tests drive them from hypothesis seeds; the acceptance gate
drives them from a fixed range of seeds.
"""

import numpy as np

from oracles import bfs_steps
from productspace.diffusion import DiffusionConfig, DiffusionTrace, diffuse_all, reach_prody
from productspace.dynamics import EXCLUDED, INCONCLUSIVE, TRANSITION, UNDEVELOPED
from productspace.dynamics import classify_transitions, density_matrix
from productspace.graph import component_curve, hierarchical_order
from productspace.ingest import ExportMatrix, aggregate_region
from productspace.proximity import proximity
from productspace.specialization import RcaMatrix, SpecializationMatrix, binarize, rca
from productspace.synthetic import country_codes, product_codes, random_proximity


def _exports(rng, max_c=12, max_p=15):
    nc = int(rng.integers(1, max_c + 1))
    np_ = int(rng.integers(1, max_p + 1))
    x = rng.random((nc, np_)) * 1000
    x[rng.random(x.shape) < 0.3] = 0.0
    x[0, 0] += 1.0
    return ExportMatrix(country_codes(nc), product_codes(np_), x)


def _bits(rng, max_c=12, max_p=15):
    nc = int(rng.integers(1, max_c + 1))
    np_ = int(rng.integers(1, max_p + 1))
    bits = rng.random((nc, np_)) < rng.uniform(0.05, 0.7)
    return SpecializationMatrix(country_codes(nc), product_codes(np_), bits)


def rca_scale_invariant(rng):
    m = _exports(rng)
    k = float(rng.uniform(1e-3, 1e3))
    scaled = ExportMatrix(m.countries, m.products, m.values * k)
    np.testing.assert_allclose(rca(scaled).values, rca(m).values, rtol=1e-9, atol=1e-12)


def rca_share_identity(rng):
    m = _exports(rng)
    r = rca(m).values
    x = m.values
    # sum_p RCA[c,p] * world_share[p] == 1 for every exporting country
    share = x.sum(axis=0) / x.sum()
    exporting = x.sum(axis=1) > 0
    np.testing.assert_allclose((r * share).sum(axis=1)[exporting], 1.0, rtol=1e-9)


def binarize_monotone(rng):
    r = rca(_exports(rng))
    a, b = sorted(rng.uniform(0.1, 3.0, 2))
    assert np.all(binarize(r, b).bits <= binarize(r, a).bits)


def phi_symmetric_bounded(rng):
    s = _bits(rng)
    phi = proximity(s).phi
    assert np.array_equal(phi, phi.T)
    assert np.all((phi >= 0) & (phi <= 1))
    assert np.all(np.diag(phi) == 0)


def phi_closed_form(rng):
    s = _bits(rng)
    m = s.bits.astype(float)
    ubi = m.sum(axis=0)
    co = m.T @ m
    phi = proximity(s).phi
    for i in range(len(ubi)):
        for j in range(len(ubi)):
            if i == j or not ubi[i] or not ubi[j]:
                assert phi[i, j] == 0
            else:
                assert phi[i, j] == co[i, j] / max(ubi[i], ubi[j])


def phi_ignores_empty_countries(rng):
    s = _bits(rng)
    extra = np.vstack([s.bits, np.zeros((3, len(s.products)), dtype=bool)])
    bigger = SpecializationMatrix(country_codes(len(extra)), s.products, extra)
    assert np.array_equal(proximity(bigger).phi, proximity(s).phi)


def phi_permutation_equivariant(rng):
    s = _bits(rng)
    perm_c = rng.permutation(len(s.countries))
    perm_p = rng.permutation(len(s.products))
    shuffled = SpecializationMatrix(s.countries, s.products, s.bits[perm_c][:, perm_p])
    phi = proximity(s).phi
    assert np.array_equal(proximity(shuffled).phi, phi[np.ix_(perm_p, perm_p)])


def density_bounded(rng):
    s = _bits(rng)
    omega = density_matrix(s, proximity(s)).values
    assert np.all((omega >= 0) & (omega <= 1 + 1e-12))


def density_monotone_in_basket(rng):
    s = _bits(rng)
    p = random_proximity(rng, len(s.products))
    more = s.bits | (rng.random(s.bits.shape) < 0.2)
    bigger = SpecializationMatrix(s.countries, s.products, more)
    assert np.all(density_matrix(bigger, p).values >= density_matrix(s, p).values - 1e-12)


def density_scale_invariant(rng):
    s = _bits(rng)
    p = random_proximity(rng, len(s.products))
    k = float(rng.uniform(0.05, 1.0))
    scaled = type(p)(p.products, p.phi * k)
    np.testing.assert_allclose(
        density_matrix(s, scaled).values,
        density_matrix(s, p).values,
        rtol=1e-9,
        atol=1e-12,
    )


def transitions_partition(rng):
    shape = (int(rng.integers(1, 10)), int(rng.integers(1, 10)))
    v0 = rng.choice([0.0, 0.2, 0.5, 0.7, 1.0, 1.5], size=shape)
    v1 = rng.choice([0.0, 0.2, 0.5, 0.7, 1.0, 1.5], size=shape)
    codes = country_codes(shape[0]), product_codes(shape[1])
    t = classify_transitions(RcaMatrix(*codes, v0), RcaMatrix(*codes, v1))
    lab = t.labels
    assert np.array_equal(lab == EXCLUDED, v0 >= 0.5)
    cand = v0 < 0.5
    assert np.array_equal(lab[cand] == TRANSITION, v1[cand] > 1.0)
    assert np.array_equal(lab[cand] == UNDEVELOPED, v1[cand] < 0.5)
    assert np.array_equal(lab[cand] == INCONCLUSIVE, (v1[cand] >= 0.5) & (v1[cand] <= 1.0))


def _diffusion_instance(rng):
    n = int(rng.integers(2, 25))
    p = random_proximity(rng, n, levels=int(rng.integers(0, 2)) * 10)
    nc = int(rng.integers(1, 5))
    bits = rng.random((nc, n)) < 0.15
    return SpecializationMatrix(country_codes(nc), p.products, bits), p


def diffusion_monotone(rng):
    s, p = _diffusion_instance(rng)
    lo, hi = sorted(rng.uniform(0.2, 1.0, 2))
    m1, m2 = sorted(int(v) for v in rng.integers(1, 8, 2))
    base = diffuse_all(s, p, DiffusionConfig(phi0=hi, iterations=m1))
    looser = diffuse_all(s, p, DiffusionConfig(phi0=lo, iterations=m1))
    longer = diffuse_all(s, p, DiffusionConfig(phi0=hi, iterations=m2))
    for a, b, c in zip(base, looser, longer):
        assert set(a.acquired) <= set(b.acquired)
        assert set(a.acquired) <= set(c.acquired)
        assert {q for q, k in a.acquired.items() if k == 0} == set(s.basket(a.country))


def diffusion_is_bfs(rng):
    s, p = _diffusion_instance(rng)
    cfg = DiffusionConfig(
        phi0=float(rng.uniform(0.2, 1.0)),
        iterations=int(rng.integers(1, 8)),
        inclusive=bool(rng.integers(0, 2)),
    )
    for c, trace in zip(s.countries, diffuse_all(s, p, cfg)):
        start = list(np.flatnonzero(s.bits[s.countries.index(c)]))
        want = bfs_steps(p.phi.tolist(), start, cfg.phi0, cfg.iterations, cfg.inclusive)
        assert trace.acquired == {p.products[k]: v for k, v in want.items()}


def reach_ignores_steps(rng):
    n = int(rng.integers(1, 80))
    codes = product_codes(n)
    table = {q: float(v) for q, v in zip(codes, rng.uniform(100, 5e4, n))}
    steps = {q: int(k) for q, k in zip(codes, rng.integers(0, 20, n))}
    top = int(rng.integers(1, 60))
    flat = DiffusionTrace("X", {q: 0 for q in codes})
    assert reach_prody(DiffusionTrace("X", steps), table, top) == reach_prody(flat, table, top)


def component_curve_monotone(rng):
    p = random_proximity(rng, int(rng.integers(1, 30)), levels=int(rng.integers(0, 2)) * 20)
    grid = np.linspace(0, 1, 21)
    sizes = [c.giant_size for c in component_curve(p, grid)]
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))
    assert sizes[0] == len(p.products)
    assert all(1 <= k <= len(p.products) for k in sizes)


def order_is_permutation(rng):
    p = random_proximity(rng, int(rng.integers(1, 25)), levels=int(rng.integers(0, 2)) * 5)
    order = hierarchical_order(p)
    assert sorted(order) == list(p.products)


def aggregate_preserves_sums(rng):
    m = _exports(rng)
    labels = rng.integers(0, 3, len(m.countries))
    groups = {f"R{k}": [c for c, l in zip(m.countries, labels) if l == k] for k in range(3)}
    agg = aggregate_region(m, groups)
    np.testing.assert_allclose(agg.values.sum(axis=0), m.values.sum(axis=0), rtol=1e-12)


CHECKS = [
    rca_scale_invariant,
    rca_share_identity,
    binarize_monotone,
    phi_symmetric_bounded,
    phi_closed_form,
    phi_ignores_empty_countries,
    phi_permutation_equivariant,
    density_bounded,
    density_monotone_in_basket,
    density_scale_invariant,
    transitions_partition,
    diffusion_monotone,
    diffusion_is_bfs,
    reach_ignores_steps,
    component_curve_monotone,
    order_is_permutation,
    aggregate_preserves_sums,
]
