"""Reading and validating trade, income and product-metadata files.

Trade files are long-form CSV with header ``year,exporter,sitc4,value``.  A
window of years is pooled into a dense country x product
:class:`ExportMatrix` by averaging each country's yearly totals over the years
in which that country reports anything at all.
"""

import math
import re
import warnings
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from ._io import fmt, read_rows, write_csv
from .errors import DuplicateKeyError, EmptyInputError, ParseError, UnknownCodeError


SITC4 = re.compile(r"[0-9]{4}")

TRADE_COLUMNS = ("year", "exporter", "sitc4", "value")
INCOME_COLUMNS = ("country", "year", "gdp_pc")
META_COLUMNS = ("sitc4", "name")


@dataclass(frozen=True)
class TradeRecord:
    year: int
    exporter: str
    product: str
    value: float


@dataclass(frozen=True)
class CountryIncome:
    country: str
    gdp_per_capita: float
    year: int


@dataclass(frozen=True)
class ProductMeta:
    product: str
    name: str
    leamer_class: str | None = None


@dataclass(frozen=True, eq=False)
class ExportMatrix:
    """Pooled export values, one row per country and one column per product.

    ``values`` is read-only; ``window`` is the inclusive ``(first, last)`` year
    range the matrix was pooled from.
    """

    countries: tuple
    products: tuple
    values: np.ndarray
    window: tuple = (None, None)
    _country_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        countries = tuple(self.countries)
        products = tuple(self.products)
        values = np.array(self.values, dtype=float)
        if values.shape != (len(countries), len(products)):
            raise ValueError(
                f"values shape {values.shape} does not match "
                f"{len(countries)} countries x {len(products)} products"
            )
        if list(countries) != sorted(set(countries)):
            raise ValueError("country codes must be sorted and unique")
        if list(products) != sorted(set(products)):
            raise ValueError("product codes must be sorted and unique")
        if np.any(~np.isfinite(values)) or np.any(values < 0):
            raise ValueError("export values must be finite and non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "countries", countries)
        object.__setattr__(self, "products", products)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "window", tuple(self.window))
        object.__setattr__(
            self, "_country_index", {c: i for i, c in enumerate(countries)}
        )

    @property
    def shape(self):
        return self.values.shape

    def row(self, country):
        try:
            return self.values[self._country_index[country]]
        except KeyError:
            raise UnknownCodeError(f"unknown country code {country!r}") from None

    def __eq__(self, other):
        if not isinstance(other, ExportMatrix):
            return NotImplemented
        return (
            self.countries == other.countries
            and self.products == other.products
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def parse_window(text):
    """Parse ``"1998:2000"`` (or a single year ``"2000"``) into ``(1998, 2000)``."""
    if isinstance(text, (tuple, list)):
        first, last = (int(v) for v in text)
    else:
        parts = str(text).split(":")
        if len(parts) == 1:
            first = last = int(parts[0])
        elif len(parts) == 2:
            first, last = int(parts[0]), int(parts[1])
        else:
            raise ValueError(f"bad year range {text!r}; expected FIRST:LAST")
    if last < first:
        raise ValueError(f"empty year range {first}:{last}")
    return first, last


def _parse_year(path, lineno, text):
    try:
        return int(text)
    except ValueError:
        raise ParseError(path, lineno, f"year {text!r} is not an integer") from None


def _parse_value(path, lineno, text, what):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(path, lineno, f"{what} {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ParseError(path, lineno, f"{what} {text!r} is not finite")
    return value


def _parse_sitc4(path, lineno, text):
    if not SITC4.fullmatch(text):
        raise ParseError(
            path, lineno, f"product code {text!r} is not a 4-digit SITC code"
        )
    return text


def read_trade_records(path):
    """Parse and validate every row of a trade CSV, yielding :class:`TradeRecord`."""
    for lineno, row in read_rows(path, TRADE_COLUMNS):
        year = _parse_year(path, lineno, row["year"])
        exporter = row["exporter"].upper()
        if not exporter:
            raise ParseError(path, lineno, "empty exporter code")
        product = _parse_sitc4(path, lineno, row["sitc4"])
        value = _parse_value(path, lineno, row["value"], "value")
        if value < 0:
            raise ParseError(path, lineno, f"negative export value {value}")
        yield TradeRecord(year, exporter, product, value)


def pool_records(records, window):
    """Pool trade records over an inclusive year window into an ExportMatrix.

    Rows sharing a ``(year, exporter, product)`` key are summed with a
    warning.  Each cell is the mean of the country's yearly values over the
    years in which that country has at least one row; missing cells are 0.
    """
    first, last = parse_window(window)
    parts = defaultdict(list)
    years_seen = defaultdict(set)
    seen_keys = set()
    duplicates = 0
    for rec in records:
        if not first <= rec.year <= last:
            continue
        key = (rec.year, rec.exporter, rec.product)
        if key in seen_keys:
            duplicates += 1
        seen_keys.add(key)
        parts[rec.exporter, rec.product].append(rec.value)
        years_seen[rec.exporter].add(rec.year)
    # fsum is exactly rounded, so the result cannot depend on row order
    totals = {key: math.fsum(vals) for key, vals in parts.items()}
    if duplicates:
        warnings.warn(
            f"{duplicates} duplicate (year, exporter, sitc4) row(s) were summed",
            stacklevel=2,
        )
    if not totals:
        raise EmptyInputError(f"no trade rows fall inside the window {first}:{last}")

    countries = sorted(years_seen)
    products = sorted({p for _, p in totals})
    ci = {c: i for i, c in enumerate(countries)}
    pi = {p: j for j, p in enumerate(products)}
    values = np.zeros((len(countries), len(products)))
    for (c, p), v in totals.items():
        values[ci[c], pi[p]] = v
    n_years = np.array([len(years_seen[c]) for c in countries], dtype=float)
    values /= n_years[:, None]
    return ExportMatrix(countries, products, values, (first, last))


def load_trade(path, window):
    """Load a trade CSV and pool it over ``window`` (see :func:`pool_records`).

    Every row of the file is validated, including rows outside the window.
    """
    records = list(read_trade_records(path))
    try:
        return pool_records(records, window)
    except EmptyInputError as exc:
        raise EmptyInputError(f"{path}: {exc}") from None


def load_trade_by_year(path, window):
    """Per-year ExportMatrix objects for every year of ``window`` present in the file."""
    first, last = parse_window(window)
    records = list(read_trade_records(path))
    years = sorted({r.year for r in records if first <= r.year <= last})
    return {y: pool_records(records, (y, y)) for y in years}


def write_trade(m, path, year=None):
    """Serialize an ExportMatrix as a single-year trade CSV, zero cells included.

    Re-loading the file with a window covering ``year`` (default: the first
    year of ``m.window``) reproduces the matrix up to 12-digit rounding.
    """
    if year is None:
        year = m.window[0] if m.window[0] is not None else 0
    rows = (
        (str(year), c, p, fmt(m.values[i, j]))
        for i, c in enumerate(m.countries)
        for j, p in enumerate(m.products)
    )
    return write_csv(path, TRADE_COLUMNS, rows)


def filter_countries(m, min_total=0.0):
    """Drop countries whose total pooled exports are below ``min_total``."""
    keep = m.values.sum(axis=1) >= min_total
    if not keep.any():
        raise EmptyInputError(f"no country exports at least {min_total}")
    countries = [c for c, k in zip(m.countries, keep) if k]
    return ExportMatrix(countries, m.products, m.values[keep], m.window)


def load_income(path, year=None):
    """Read GDP per capita records for ``year`` (all years when ``year`` is None).

    Countries without a row for the requested year are omitted.
    """
    out = []
    seen = set()
    for lineno, row in read_rows(path, INCOME_COLUMNS):
        country = row["country"].upper()
        if not country:
            raise ParseError(path, lineno, "empty country code")
        y = _parse_year(path, lineno, row["year"])
        gdp = _parse_value(path, lineno, row["gdp_pc"], "gdp_pc")
        if gdp <= 0:
            raise ParseError(path, lineno, f"GDP per capita must be positive, got {gdp}")
        if (country, y) in seen:
            raise DuplicateKeyError(path, lineno, f"duplicate row for ({country}, {y})")
        seen.add((country, y))
        if year is None or y == year:
            out.append(CountryIncome(country, gdp, y))
    if year is not None and not out:
        warnings.warn(f"{path}: no income rows for year {year}", stacklevel=2)
    out.sort(key=lambda r: (r.country, r.year))
    return out


def load_meta(path):
    """Read the product metadata table keyed by SITC-4 code."""
    out = {}
    for lineno, row in read_rows(path, META_COLUMNS):
        product = _parse_sitc4(path, lineno, row["sitc4"])
        if product in out:
            raise DuplicateKeyError(path, lineno, f"duplicate product {product}")
        leamer = row.get("leamer_class") or None
        out[product] = ProductMeta(product, row["name"], leamer)
    return out


def aggregate_region(m, groups):
    """Sum member-country rows into one row per region.

    ``groups`` maps a region label to a collection of country codes.  Groups
    must be disjoint and reference only countries present in ``m``.
    """
    owner = {}
    for region, members in groups.items():
        for c in members:
            if c not in m._country_index:
                raise UnknownCodeError(
                    f"region {region!r} references unknown country {c!r}"
                )
            if c in owner:
                raise ValueError(
                    f"country {c!r} belongs to both {owner[c]!r} and {region!r}"
                )
            owner[c] = region
    regions = sorted(groups)
    values = np.zeros((len(regions), len(m.products)))
    for k, region in enumerate(regions):
        idx = [m._country_index[c] for c in groups[region]]
        if idx:
            values[k] = m.values[idx].sum(axis=0)
    return ExportMatrix(regions, m.products, values, m.window)
