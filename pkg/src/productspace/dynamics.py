"""How specialization moves across a fixed product space.

Density measures how much of a product's neighbourhood a country already
exports competitively.  Between two snapshots, products a country barely
exported at the start are labelled as transitions or undeveloped, and the
densities around both groups are compared.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import EmptyInputError, UnknownCodeError
from .specialization import RcaMatrix

EXCLUDED = -1
UNDEVELOPED = 0
TRANSITION = 1
INCONCLUSIVE = 2

LABEL_NAMES = {UNDEVELOPED: "undeveloped", TRANSITION: "transition", INCONCLUSIVE: "inconclusive"}


def _check_products(a, b):
    if tuple(a) != tuple(b):
        raise ValueError("product universes of the two inputs differ")


@dataclass(frozen=True)
class DensityRow:
    country: str
    values: dict


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    countries: tuple
    products: tuple
    values: np.ndarray

    def row(self, country):
        try:
            i = self.countries.index(country)
        except ValueError:
            raise UnknownCodeError(f"unknown country code {country!r}") from None
        return DensityRow(country, dict(zip(self.products, self.values[i].tolist())))


def density_matrix(s, p):
    """Density of every product for every country.

    ``omega[c, j] = sum_i x[c, i] phi[i, j] / sum_i phi[i, j]`` with the
    diagonal excluded; products with no positive proximity get 0.
    """
    _check_products(s.products, p.products)
    phi = np.array(p.phi)
    np.fill_diagonal(phi, 0.0)
    x = np.asarray(s.bits, dtype=float)
    denom = phi.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        omega = np.where(denom > 0, (x @ phi) / denom, 0.0)
    return DensityMatrix(tuple(s.countries), tuple(s.products), np.clip(omega, 0.0, 1.0))


def density(s, p, country):
    """:class:`DensityRow` of ``country``: product -> density in [0, 1]."""
    i = s.country_index(country)
    _check_products(s.products, p.products)
    sub = type(s)((country,), s.products, s.bits[i : i + 1], s.threshold)
    return density_matrix(sub, p).row(country)


@dataclass(frozen=True, eq=False)
class TransitionTable:
    """Labels for (country, product) pairs between two snapshots.

    ``labels`` holds :data:`TRANSITION`, :data:`UNDEVELOPED`,
    :data:`INCONCLUSIVE`, or :data:`EXCLUDED` for pairs that were not below
    the low threshold at the start.
    """

    countries: tuple
    products: tuple
    labels: np.ndarray
    low: float = 0.5
    high: float = 1.0
    years: tuple = (None, None)

    def count(self, label):
        return int(np.count_nonzero(self.labels == label))

    def pairs(self):
        """Yield ``(country, product, label_name)`` for every classified pair."""
        for i, j in zip(*np.nonzero(self.labels != EXCLUDED)):
            yield self.countries[i], self.products[j], LABEL_NAMES[int(self.labels[i, j])]


def _align_rca(r0, r1):
    if r0.countries == r1.countries and r0.products == r1.products:
        return r0, r1
    countries = sorted(set(r0.countries) & set(r1.countries))
    products = sorted(set(r0.products) & set(r1.products))
    if not countries or not products:
        raise EmptyInputError("the two RCA snapshots share no countries or no products")
    warnings.warn(
        f"snapshots differ; using the {len(countries)} x {len(products)} intersection",
        stacklevel=3,
    )

    def take(r):
        ci = [r.countries.index(c) for c in countries]
        pj = [r.products.index(q) for q in products]
        return RcaMatrix(countries, products, r.values[np.ix_(ci, pj)])

    return take(r0), take(r1)


def classify_transitions(r0, r1, low=0.5, high=1.0, years=(None, None)):
    """Label pairs with ``RCA0 < low``: transition if ``RCA1 > high``,
    undeveloped if ``RCA1 < low``, inconclusive otherwise."""
    if not low < high:
        raise ValueError(f"low threshold {low} must be below high threshold {high}")
    r0, r1 = _align_rca(r0, r1)
    v0, v1 = r0.values, r1.values
    labels = np.full(v0.shape, EXCLUDED, dtype=np.int8)
    candidate = v0 < low
    labels[candidate] = INCONCLUSIVE
    labels[candidate & (v1 > high)] = TRANSITION
    labels[candidate & (v1 < low)] = UNDEVELOPED
    return TransitionTable(r0.countries, r0.products, labels, low, high, tuple(years))


def _aligned_density(t, densities):
    if densities.countries == t.countries and densities.products == t.products:
        return np.asarray(densities.values)
    ci = [densities.countries.index(c) for c in t.countries]
    pj = [densities.products.index(q) for q in t.products]
    return np.asarray(densities.values)[np.ix_(ci, pj)]


def density_distributions(t, densities, width=0.02):
    """Histograms of density around transition and undeveloped pairs.

    Returns ``(bin_edges, transition_counts, undeveloped_counts)`` on shared
    bins of the given width over [0, 1].
    """
    omega = _aligned_density(t, densities)
    edges = np.linspace(0.0, 1.0, int(round(1.0 / width)) + 1)
    trans, _ = np.histogram(omega[t.labels == TRANSITION], bins=edges)
    undev, _ = np.histogram(omega[t.labels == UNDEVELOPED], bins=edges)
    return edges, trans, undev


@dataclass(frozen=True, eq=False)
class TransitionStats:
    """Per product: number of transitioning countries ``T``, of undeveloped
    countries ``non_t``, and the density ratio ``H`` (NaN when undefined)."""

    products: tuple
    T: np.ndarray
    non_t: np.ndarray
    H: np.ndarray

    @property
    def defined(self):
        return ~np.isnan(self.H)

    @property
    def frac_above_one(self):
        """Share of products with a defined ratio whose ratio exceeds 1."""
        h = self.H[self.defined]
        if h.size == 0:
            return math.nan
        return float(np.count_nonzero(h > 1) / h.size)


def discovery_ratio(t, densities):
    """Mean density over transitioning countries divided by the mean over
    countries that stayed undeveloped, product by product."""
    omega = _aligned_density(t, densities)
    is_t = t.labels == TRANSITION
    is_u = t.labels == UNDEVELOPED
    n_t = is_t.sum(axis=0)
    n_u = is_u.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        mean_t = np.where(is_t, omega, 0.0).sum(axis=0) / n_t
        mean_u = np.where(is_u, omega, 0.0).sum(axis=0) / n_u
        ok = (n_t > 0) & (n_u > 0) & (mean_u > 0)
        h = np.where(ok, mean_t / mean_u, np.nan)
    return TransitionStats(t.products, n_t, n_u, h)


@dataclass(frozen=True)
class CurveRow:
    low: float
    high: float
    transitions: int
    opportunities: int

    @property
    def probability(self):
        return self.transitions / self.opportunities if self.opportunities else math.nan


def _aligned_inputs(t, s0, p):
    _check_products(s0.products, p.products)
    ci = [s0.country_index(c) for c in t.countries]
    pj = [s0.products.index(q) for q in t.products]
    bits = np.asarray(s0.bits, dtype=bool)[ci]
    phi = np.array(p.phi)
    np.fill_diagonal(phi, 0.0)
    return bits, phi, pj


def nearest_developed_proximity(t, s0, p):
    """``phi*`` for every pair of ``t``: the largest proximity between the
    product and any product the country was specialized in at ``t0``.

    Countries with an empty basket get 0.
    """
    bits, phi, pj = _aligned_inputs(t, s0, p)
    out = np.zeros(t.labels.shape)
    for k, row in enumerate(bits):
        if row.any():
            out[k] = phi[row][:, pj].max(axis=0)
    return out


def transition_prob_by_proximity(t, s0, p, width=0.1, exclude_empty_basket=False):
    """Probability of a transition as a function of ``phi*``.

    Pairs are binned by ``phi*`` into bins ``[k*width, (k+1)*width)`` (the
    last bin is closed).  Inconclusive pairs are dropped; each bin's
    probability is ``transitions / (transitions + undeveloped)``.
    """
    star = nearest_developed_proximity(t, s0, p)
    mask = (t.labels == TRANSITION) | (t.labels == UNDEVELOPED)
    if exclude_empty_basket:
        bits, _, _ = _aligned_inputs(t, s0, p)
        mask &= bits.any(axis=1)[:, None]
    nbins = int(round(1.0 / width))
    k = np.minimum(np.floor(star[mask] / width + 1e-12).astype(int), nbins - 1)
    success = (t.labels[mask] == TRANSITION).astype(int)
    opp = np.bincount(k, minlength=nbins)
    hit = np.bincount(k, weights=success, minlength=nbins).astype(int)
    return [
        CurveRow(round(b * width, 12), round((b + 1) * width, 12), int(hit[b]), int(opp[b]))
        for b in range(nbins)
    ]


def nearest_developed_rank(t, s0, p):
    """Rank of the closest developed neighbour in each product's proximity
    ordering (1 = the product's top neighbour; ties share the lowest rank).

    Returns 0 where the country has no developed product.
    """
    bits, phi, pj = _aligned_inputs(t, s0, p)
    n = phi.shape[0]
    never = np.iinfo(np.int64).max
    # ranks[i, j]: rank of i among j's neighbours by descending proximity
    ranks = np.full((n, n), never, dtype=np.int64)
    for j in range(n):
        others = np.arange(n) != j
        ranks[others, j] = rankdata(-phi[others, j], method="min").astype(np.int64)
    out = np.zeros(t.labels.shape, dtype=np.int64)
    for k, row in enumerate(bits):
        if row.any():
            best = ranks[row].min(axis=0)[pj]
            out[k] = np.where(best == never, 0, best)
    return out


def transition_prob_by_rank(t, s0, p):
    """Transition probability as a function of the nearest developed neighbour's rank.

    Returns a list of ``(rank, transitions, opportunities)`` tuples for each
    observed rank; pairs without a developed neighbour are left out.
    """
    rank = nearest_developed_rank(t, s0, p)
    mask = ((t.labels == TRANSITION) | (t.labels == UNDEVELOPED)) & (rank > 0)
    r = rank[mask]
    success = t.labels[mask] == TRANSITION
    rows = []
    for value in np.unique(r):
        sel = r == value
        rows.append((int(value), int(success[sel].sum()), int(sel.sum())))
    return rows
