"""Balassa revealed comparative advantage and its binarization."""

from dataclasses import dataclass

import numpy as np

from ._io import read_rows, write_csv
from .errors import EmptyInputError, ParseError, UnknownCodeError


@dataclass(frozen=True, eq=False)
class _CodeMatrix:
    countries: tuple
    products: tuple

    def __post_init__(self):
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "products", tuple(self.products))

    def country_index(self, country):
        try:
            return self.countries.index(country)
        except ValueError:
            raise UnknownCodeError(f"unknown country code {country!r}") from None

    @property
    def shape(self):
        return (len(self.countries), len(self.products))


@dataclass(frozen=True, eq=False)
class RcaMatrix(_CodeMatrix):
    values: np.ndarray = None

    def __post_init__(self):
        super().__post_init__()
        values = np.array(self.values, dtype=float)
        if values.shape != self.shape:
            raise ValueError(f"values shape {values.shape} != {self.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class SpecializationMatrix(_CodeMatrix):
    """Boolean country x product matrix: ``bits[c, p]`` is ``RCA[c, p] > threshold``."""

    bits: np.ndarray = None
    threshold: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        bits = np.array(self.bits, dtype=bool)
        if bits.shape != self.shape:
            raise ValueError(f"bits shape {bits.shape} != {self.shape}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def basket(self, country):
        """Products in which ``country`` is specialized."""
        row = self.bits[self.country_index(country)]
        return [p for p, b in zip(self.products, row) if b]


def rca(m):
    """Balassa RCA of an :class:`~productspace.ingest.ExportMatrix`.

    ``RCA[c, p] = (x[c, p] / x[c, :].sum()) / (x[:, p].sum() / x.sum())``.
    Countries with no exports and products nobody exports get RCA 0.
    """
    x = np.asarray(m.values, dtype=float)
    if x.size == 0:
        raise EmptyInputError("export matrix has no countries or products")
    total = x.sum()
    if total <= 0:
        raise EmptyInputError("export matrix is all zero")
    country_tot = x.sum(axis=1, keepdims=True)
    product_tot = x.sum(axis=0, keepdims=True)
    denom = country_tot * product_tot
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(denom > 0, x * total / denom, 0.0)
    return RcaMatrix(m.countries, m.products, values)


def binarize(r, threshold=1.0):
    """Specialization bits ``RCA > threshold`` (strict; equality is False)."""
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    return SpecializationMatrix(r.countries, r.products, r.values > threshold, threshold)


def write_rca(r, path, threshold=None):
    """Long-form ``country,sitc4,rca`` CSV; a ``bit`` column is added when ``threshold`` is set."""
    if threshold is None:
        header = ("country", "sitc4", "rca")
        rows = (
            (c, p, r.values[i, j])
            for i, c in enumerate(r.countries)
            for j, p in enumerate(r.products)
        )
    else:
        header = ("country", "sitc4", "rca", "bit")
        rows = (
            (c, p, r.values[i, j], int(r.values[i, j] > threshold))
            for i, c in enumerate(r.countries)
            for j, p in enumerate(r.products)
        )
    return write_csv(path, header, rows)


def read_rca(path):
    """Read a long-form RCA CSV written by :func:`write_rca`; absent cells are 0."""
    cells = {}
    for lineno, row in read_rows(path, ("country", "sitc4", "rca")):
        try:
            cells[row["country"], row["sitc4"]] = float(row["rca"])
        except ValueError:
            raise ParseError(path, lineno, f"bad rca value {row['rca']!r}") from None
    if not cells:
        raise EmptyInputError(f"{path}: no RCA rows")
    countries = sorted({c for c, _ in cells})
    products = sorted({p for _, p in cells})
    ci = {c: i for i, c in enumerate(countries)}
    pi = {p: j for j, p in enumerate(products)}
    values = np.zeros((len(countries), len(products)))
    for (c, p), v in cells.items():
        values[ci[c], pi[p]] = v
    return RcaMatrix(countries, products, values)


def region_rca(m, groups):
    """RCA of region aggregates measured against the full world in ``m``.

    Region rows are sums of member countries
    (:func:`~productspace.ingest.aggregate_region`); the product and world
    totals still come from every country, so a region's RCA compares its
    export mix to the world's.
    """
    from .ingest import aggregate_region

    agg = aggregate_region(m, groups)
    x = np.asarray(m.values, dtype=float)
    total = x.sum()
    if total <= 0:
        raise EmptyInputError("export matrix is all zero")
    world_share = x.sum(axis=0) / total
    region_tot = agg.values.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        share = np.where(region_tot > 0, agg.values / region_tot, 0.0)
        values = np.where(world_share > 0, share / world_share, 0.0)
    return RcaMatrix(agg.countries, agg.products, values)


def reindex(r, products):
    """Reorder ``r`` onto ``products``; products it lacks get RCA 0."""
    idx = {p: j for j, p in enumerate(r.products)}
    values = np.zeros((len(r.countries), len(products)))
    for k, p in enumerate(products):
        if p in idx:
            values[:, k] = r.values[:, idx[p]]
    return RcaMatrix(r.countries, products, values)
