"""Threshold diffusion of comparative advantage and income convergence.

Starting from its current basket, a country repeatedly acquires every
product whose proximity to something it already has is at least ``phi0``.
Countries are then placed by the average income level (PRODY) of the best
``top_n`` products they can reach, and the spread of that distribution
across countries measures how far the world could converge.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError, UndefinedStatisticError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiffusionConfig:
    phi0: float = 0.55
    iterations: int = 20
    top_n: int = 50
    inclusive: bool = True

    def __post_init__(self):
        if not 0 < self.phi0 <= 1:
            raise ValueError(f"phi0 must be in (0, 1], got {self.phi0}")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.top_n < 1:
            raise ValueError("top_n must be positive")


@dataclass(frozen=True)
class DiffusionTrace:
    """Acquisition step of every product a country reaches (0 = initial basket)."""

    country: str
    acquired: dict

    def reached(self, step=None):
        if step is None:
            return set(self.acquired)
        return {p for p, k in self.acquired.items() if k <= step}

    @property
    def rounds(self):
        return max(self.acquired.values(), default=0)


@dataclass(frozen=True)
class ProductIncome:
    product: str
    prody: float


def prody(r, incomes):
    """RCA-weighted mean GDP per capita of each product's exporters.

    ``PRODY[p] = sum_c RCA[c, p] * gdp[c] / sum_c RCA[c, p]`` over countries
    with an income record.  Products no such country exports are omitted with
    a warning.
    """
    gdp = {inc.country: inc.gdp_per_capita for inc in incomes}
    rows = [i for i, c in enumerate(r.countries) if c in gdp]
    if not rows:
        raise EmptyInputError("no country of the RCA matrix has income data")
    g = np.array([gdp[r.countries[i]] for i in rows])
    w = np.asarray(r.values)[rows]
    weight = w.sum(axis=0)
    out = []
    missing = []
    for j, product in enumerate(r.products):
        if weight[j] > 0:
            out.append(ProductIncome(product, float(w[:, j] @ g / weight[j])))
        else:
            missing.append(product)
    if missing:
        warnings.warn(
            f"PRODY undefined for {len(missing)} product(s) without income-weighted exporters",
            stacklevel=2,
        )
    return out


def _adjacency(p, phi0, inclusive):
    phi = np.asarray(p.phi)
    adj = phi >= phi0 if inclusive else phi > phi0
    adj = adj.copy()
    np.fill_diagonal(adj, False)
    return adj


def diffusion_steps(bits, adjacency, iterations):
    """Acquisition step per (country, product); -1 where never reached.

    ``bits`` is the country x product seed matrix and ``adjacency`` the
    boolean product graph.  All countries advance one round at a time.
    """
    bits = np.asarray(bits, dtype=bool)
    adj = np.asarray(adjacency, dtype=np.float64)
    steps = np.where(bits, 0, -1).astype(np.int64)
    acquired = bits.copy()
    frontier = bits.copy()
    for k in range(1, iterations + 1):
        if not frontier.any():
            break
        new = ((frontier.astype(np.float64) @ adj) > 0) & ~acquired
        steps[new] = k
        acquired |= new
        frontier = new
    return steps


def _trace(country, products, steps_row):
    return DiffusionTrace(
        country, {products[j]: int(k) for j, k in enumerate(steps_row) if k >= 0}
    )


def diffuse(s, p, cfg, country):
    """Simulate diffusion for one country and return its :class:`DiffusionTrace`.

    Round ``k`` adds every product within ``cfg.phi0`` of a product held at the
    end of round ``k - 1``; products are never lost.
    """
    if tuple(s.products) != tuple(p.products):
        raise ValueError("product universes of the two inputs differ")
    i = s.country_index(country)
    adj = _adjacency(p, cfg.phi0, cfg.inclusive)
    steps = diffusion_steps(s.bits[i : i + 1], adj, cfg.iterations)
    return _trace(country, s.products, steps[0])


def diffuse_all(s, p, cfg):
    if tuple(s.products) != tuple(p.products):
        raise ValueError("product universes of the two inputs differ")
    adj = _adjacency(p, cfg.phi0, cfg.inclusive)
    steps = diffusion_steps(s.bits, adj, cfg.iterations)
    return [_trace(c, s.products, steps[i]) for i, c in enumerate(s.countries)]


def reach_prody(trace, prodys, top_n=50):
    """Mean PRODY of the ``top_n`` richest products in the trace.

    Products without a PRODY are skipped; NaN when none has one.
    """
    table = prodys if isinstance(prodys, dict) else {q.product: q.prody for q in prodys}
    values = sorted((table[q] for q in trace.acquired if q in table), reverse=True)
    if not values:
        return math.nan
    top = values[:top_n]
    return math.fsum(top) / len(top)


def iqr(values):
    """Interquartile range with linear interpolation between order statistics."""
    x = np.asarray([v for v in values if not math.isnan(v)], dtype=float)
    if x.size < 4:
        raise UndefinedStatisticError(f"IQR needs at least 4 values, got {x.size}")
    q1, q3 = np.percentile(x, [25, 75], method="linear")
    return float(q3 - q1)


@dataclass
class ConvergenceRow:
    phi0: float
    iqr: float
    ratio: float
    reach: dict = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    original_iqr: float
    original: dict
    rows: list

    def as_dict(self):
        return {
            "original_iqr": self.original_iqr,
            "rows": [{"phi0": r.phi0, "iqr": r.iqr, "ratio": r.ratio} for r in self.rows],
        }


def _reach_all(s, steps, table, top_n):
    return {
        c: reach_prody(_trace(c, s.products, steps[i]), table, top_n)
        for i, c in enumerate(s.countries)
    }


def convergence_sweep(s, p, prodys, phi_grid, cfg=None):
    """IQR of the reach-PRODY distribution after diffusing at each ``phi0``,
    normalized by the IQR with no diffusion at all."""
    cfg = cfg or DiffusionConfig()
    if tuple(s.products) != tuple(p.products):
        raise ValueError("product universes of the two inputs differ")
    table = {q.product: q.prody for q in prodys}
    bits = np.asarray(s.bits, dtype=bool)
    original = _reach_all(s, np.where(bits, 0, -1), table, cfg.top_n)
    base = iqr(original.values())
    rows = []
    for phi0 in phi_grid:
        if not 0 < phi0 <= 1:
            raise ValueError(f"phi0 {phi0} outside (0, 1]")
        adj = _adjacency(p, phi0, cfg.inclusive)
        steps = diffusion_steps(bits, adj, cfg.iterations)
        reach = _reach_all(s, steps, table, cfg.top_n)
        spread = iqr(reach.values())
        ratio = spread / base if base > 0 else math.nan
        rows.append(ConvergenceRow(float(phi0), spread, ratio, reach))
        log.debug("phi0=%.3f iqr=%.1f ratio=%.3f", phi0, spread, ratio)
    return ConvergenceReport(base, original, rows)


def parse_grid(text):
    """Parse ``"0.4:0.05:0.8"`` (start:step:stop, inclusive) or a comma list."""
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text)
    if ":" in text:
        start, step, stop = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 10) for k in range(n)]
    return [float(v) for v in text.split(",") if v.strip()]
