"""Product proximity from co-specialization, plus summary statistics.

The proximity between products ``i`` and ``j`` is the smaller of the two
conditional probabilities ``P(i | j)`` and ``P(j | i)`` that a country
specialized in one is also specialized in the other.  With ``S_i`` the set of
countries specialized in ``i`` this reduces to
``|S_i & S_j| / max(|S_i|, |S_j|)``.
"""

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import read_rows, write_csv
from .errors import EmptyInputError, ParseError, UndefinedStatisticError


@dataclass(frozen=True, eq=False)
class ProximityMatrix:
    """Symmetric product x product matrix with entries in [0, 1] and a zero diagonal."""

    products: tuple
    phi: np.ndarray
    window: tuple = (None, None)

    def __post_init__(self):
        products = tuple(self.products)
        phi = np.array(self.phi, dtype=float)
        n = len(products)
        if phi.shape != (n, n):
            raise ValueError(f"phi shape {phi.shape} does not match {n} products")
        if not np.array_equal(phi, phi.T):
            raise ValueError("proximity matrix must be symmetric")
        if n and (phi.min() < 0 or phi.max() > 1):
            raise ValueError("proximity values must lie in [0, 1]")
        np.fill_diagonal(phi, 0.0)
        phi.setflags(write=False)
        object.__setattr__(self, "products", products)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "window", tuple(self.window))

    def __len__(self):
        return len(self.products)

    def index(self, product):
        return self.products.index(product)

    def pairs(self):
        """Off-diagonal values for every unordered pair ``i < j`` in row-major order."""
        iu = np.triu_indices(len(self.products), k=1)
        return self.phi[iu]

    def subset(self, products):
        idx = [self.index(p) for p in products]
        return ProximityMatrix(products, self.phi[np.ix_(idx, idx)], self.window)


def proximity(s):
    """Proximity matrix of a :class:`~productspace.specialization.SpecializationMatrix`.

    Products nobody is specialized in get proximity 0 to everything.
    """
    bits = np.asarray(s.bits)
    if bits.size == 0:
        raise EmptyInputError("specialization matrix is empty")
    m = bits.astype(np.int64)
    co = m.T @ m
    support = np.diag(co).copy()
    larger = np.maximum(support[:, None], support[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(larger > 0, co / larger, 0.0)
    np.fill_diagonal(phi, 0.0)
    return ProximityMatrix(s.products, phi)


def conditional_proximity(s):
    """Proximity evaluated as ``min(P(i|j), P(j|i))`` from the two conditionals.

    Slower than :func:`proximity`; kept as the literal form of the
    definition for cross-checking.
    """
    bits = np.asarray(s.bits, dtype=bool)
    n = bits.shape[1]
    phi = np.zeros((n, n))
    support = bits.sum(axis=0)
    for i in range(n):
        for j in range(i + 1, n):
            if support[i] == 0 or support[j] == 0:
                continue
            both = np.count_nonzero(bits[:, i] & bits[:, j])
            p_i_given_j = both / support[j]
            p_j_given_i = both / support[i]
            phi[i, j] = phi[j, i] = min(p_i_given_j, p_j_given_i)
    return ProximityMatrix(s.products, phi)


@dataclass(frozen=True)
class PhiStats:
    n_pairs: int
    frac_zero: float
    frac_below: dict = field(default_factory=dict)
    bin_edges: np.ndarray = None
    histogram: np.ndarray = None

    def as_dict(self):
        return {
            "n_pairs": self.n_pairs,
            "frac_zero": self.frac_zero,
            "frac_below": {format(t, "g"): v for t, v in self.frac_below.items()},
            "bin_edges": [float(e) for e in self.bin_edges],
            "histogram": [int(c) for c in self.histogram],
        }


def phi_stats(p, thresholds=(0.1, 0.2), bins=20):
    """Distribution summary over the ``n*(n-1)/2`` off-diagonal pairs.

    ``frac_zero`` counts exact zeros and ``frac_below[t]`` counts ``phi < t``.
    """
    vals = p.pairs()
    if vals.size == 0:
        raise UndefinedStatisticError("need at least two products for pair statistics")
    for t in thresholds:
        if not 0 < t <= 1:
            raise ValueError(f"threshold {t} outside (0, 1]")
    n = vals.size
    counts, edges = np.histogram(vals, bins=bins, range=(0.0, 1.0))
    return PhiStats(
        n_pairs=int(n),
        frac_zero=float(np.count_nonzero(vals == 0) / n),
        frac_below={float(t): float(np.count_nonzero(vals < t) / n) for t in thresholds},
        bin_edges=edges,
        histogram=counts,
    )


def phi_correlation(p1, p2, edge_set=None):
    """Pearson correlation between two proximity matrices over product pairs.

    Only products present in both matrices are compared (with a warning when
    the universes differ).  ``edge_set`` restricts the comparison to the
    given ``(product_i, product_j)`` pairs, e.g. the edges of a displayed
    network; by default all off-diagonal pairs are used.
    """
    if p1.products != p2.products:
        shared = sorted(set(p1.products) & set(p2.products))
        warnings.warn(
            f"product universes differ; correlating over {len(shared)} shared products",
            stacklevel=2,
        )
        p1, p2 = p1.subset(shared), p2.subset(shared)
    if edge_set is None:
        a, b = p1.pairs(), p2.pairs()
    else:
        idx = {c: k for k, c in enumerate(p1.products)}
        keep = sorted(
            {tuple(sorted((idx[i], idx[j]))) for i, j in edge_set if i in idx and j in idx and i != j}
        )
        if not keep:
            raise UndefinedStatisticError("no edge of edge_set is shared by both matrices")
        rows, cols = np.array(keep).T
        a, b = p1.phi[rows, cols], p2.phi[rows, cols]
    if a.size < 2:
        raise UndefinedStatisticError("correlation needs at least two pairs")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise UndefinedStatisticError("correlation undefined for a constant sample")
    return float(np.corrcoef(a, b)[0, 1])


def write_proximity(p, path):
    """Long-form ``sitc4_i,sitc4_j,phi`` CSV over all pairs with ``i < j``."""
    order = np.argsort(p.products, kind="stable")
    codes = [p.products[k] for k in order]
    rows = (
        (codes[a], codes[b], p.phi[order[a], order[b]])
        for a in range(len(codes))
        for b in range(a + 1, len(codes))
    )
    return write_csv(path, ("sitc4_i", "sitc4_j", "phi"), rows)


def read_proximity(path, products=None):
    """Read a long-form proximity CSV; unlisted pairs are 0.

    ``products`` fixes the universe (and order); by default it is the sorted
    set of codes mentioned in the file.
    """
    cells = []
    seen = set()
    for lineno, row in read_rows(path, ("sitc4_i", "sitc4_j", "phi")):
        try:
            value = float(row["phi"])
        except ValueError:
            raise ParseError(path, lineno, f"bad phi value {row['phi']!r}") from None
        cells.append((row["sitc4_i"], row["sitc4_j"], value))
        seen.update((row["sitc4_i"], row["sitc4_j"]))
    if products is None:
        products = sorted(seen)
    idx = {c: k for k, c in enumerate(products)}
    phi = np.zeros((len(products), len(products)))
    for i, j, v in cells:
        a, b = idx[i], idx[j]
        phi[a, b] = phi[b, a] = v
    return ProximityMatrix(products, phi)


def write_proximity_binary(p, path):
    """Dense row-major little-endian float64 dump plus a ``.json`` sidecar of product codes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.ascontiguousarray(p.phi, dtype="<f8").tofile(path)
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(
        json.dumps({"products": list(p.products), "dtype": "<f8", "order": "C"}, indent=2)
        + "\n",
        encoding="utf-8",
    )
    return path


def read_proximity_binary(path):
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text(encoding="utf-8"))
    products = meta["products"]
    n = len(products)
    phi = np.fromfile(path, dtype=meta.get("dtype", "<f8"))
    if phi.size != n * n:
        raise ParseError(path, 0, f"expected {n * n} values, found {phi.size}")
    return ProximityMatrix(products, phi.reshape(n, n))
