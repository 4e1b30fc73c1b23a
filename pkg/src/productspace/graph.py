"""The product-space network: spanning backbone, threshold overlay,
giant-component sweep, hierarchical matrix ordering and graph export."""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._io import fmt, write_csv

MST = "mst"
OVERLAY = "overlay"

EDGE_CSV_COLUMNS = ("sitc4_i", "sitc4_j", "phi", "tag")


@dataclass(frozen=True, order=True)
class Edge:
    source: str
    target: str
    phi: float
    tag: str = MST


@dataclass
class ProductGraph:
    """Undirected weighted graph over products.

    Edges are stored with ``source < target`` and carry a ``tag`` of either
    ``"mst"`` (spanning-forest backbone) or ``"overlay"``.
    """

    products: tuple
    edges: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.products = tuple(self.products)

    def edge_keys(self):
        return {(e.source, e.target) for e in self.edges}

    def edges_tagged(self, tag):
        return [e for e in self.edges if e.tag == tag]

    def total_weight(self, tag=None):
        return sum(e.phi for e in self.edges if tag is None or e.tag == tag)

    def to_networkx(self, node_flags=None):
        g = nx.Graph()
        for p in self.products:
            g.add_node(p, **_node_attrs(p, self.meta, node_flags))
        for e in self.edges:
            g.add_edge(e.source, e.target, phi=float(e.phi), tag=e.tag)
        return g


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def _sorted_codes(p):
    order = sorted(range(len(p.products)), key=lambda k: p.products[k])
    return order, [p.products[k] for k in order]


def max_spanning_forest(p, meta=None):
    """Maximum-weight spanning forest of the graph of pairs with ``phi > 0``.

    Kruskal's algorithm on edges sorted by descending weight; ties are taken
    in lexicographic ``(i, j)`` product-code order.
    """
    order, codes = _sorted_codes(p)
    phi = p.phi[np.ix_(order, order)]
    rows, cols = np.nonzero(np.triu(phi, k=1) > 0)
    weights = phi[rows, cols]
    # rows/cols are already lexicographic; a stable sort on -weight keeps that for ties
    rank = np.argsort(-weights, kind="stable")
    uf = _UnionFind(len(codes))
    edges = []
    for k in rank:
        a, b = int(rows[k]), int(cols[k])
        if uf.union(a, b):
            edges.append(Edge(codes[a], codes[b], float(weights[k]), MST))
            if len(edges) == len(codes) - 1:
                break
    return ProductGraph(p.products, edges, dict(meta or {}))


def overlay(g, p, threshold=0.55):
    """Add every pair with ``phi > threshold`` not already in ``g`` as an overlay edge."""
    if not 0 < threshold < 1:
        raise ValueError(f"overlay threshold must be in (0, 1), got {threshold}")
    order, codes = _sorted_codes(p)
    phi = p.phi[np.ix_(order, order)]
    present = g.edge_keys()
    added = []
    rows, cols = np.nonzero(np.triu(phi, k=1) > threshold)
    for a, b in zip(rows, cols):
        key = (codes[a], codes[b])
        if key not in present:
            added.append(Edge(key[0], key[1], float(phi[a, b]), OVERLAY))
    return ProductGraph(g.products, list(g.edges) + added, dict(g.meta))


def product_space(p, threshold=0.55, meta=None):
    """Spanning backbone plus the ``phi > threshold`` overlay."""
    return overlay(max_spanning_forest(p, meta), p, threshold)


@dataclass(frozen=True)
class ComponentSample:
    threshold: float
    giant_size: int
    total_products: int

    @property
    def ratio(self):
        return self.giant_size / self.total_products


def giant_component_size(p, threshold):
    n = len(p.products)
    if n == 0:
        return 0
    adj = p.phi >= threshold
    np.fill_diagonal(adj, False)
    _, labels = connected_components(csr_matrix(adj), directed=False)
    return int(np.bincount(labels).max())


def component_curve(p, thresholds):
    """Largest connected component of the ``phi >= t`` graph for each threshold ``t``.

    Isolated products count towards the total, so the ratio is relative to
    every product in the matrix.
    """
    thresholds = [float(t) for t in thresholds]
    if thresholds != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")
    n = len(p.products)
    return [ComponentSample(t, giant_component_size(p, t), n) for t in thresholds]


def average_linkage(p):
    """Average-linkage agglomerative clustering on the distance ``1 - phi``.

    At each step the closest pair of clusters is merged; ties go to the pair
    whose smallest members come first in product-code order, and the merged
    cluster lists that earlier cluster's leaves first.

    Returns ``(order, merges)``: the dendrogram's leaf order as product
    codes, and one ``(left_leaves, right_leaves, distance)`` tuple per merge.
    """
    order, codes = _sorted_codes(p)
    n = len(codes)
    if n <= 1:
        return codes, []
    dist = 1.0 - p.phi[np.ix_(order, order)]
    np.fill_diagonal(dist, np.inf)
    sizes = np.ones(n)
    leaves = [[k] for k in range(n)]
    active = np.ones(n, dtype=bool)
    merges = []
    for _ in range(n - 1):
        # first occurrence in row-major order = lexicographically smallest (a, b), a < b
        a, b = divmod(int(np.argmin(dist)), n)
        if a > b:
            a, b = b, a
        merges.append(
            ([codes[k] for k in leaves[a]], [codes[k] for k in leaves[b]], float(dist[a, b]))
        )
        na, nb = sizes[a], sizes[b]
        merged = (na * dist[a] + nb * dist[b]) / (na + nb)
        dist[a] = merged
        dist[:, a] = merged
        dist[b] = np.inf
        dist[:, b] = np.inf
        dist[a, a] = np.inf
        sizes[a] = na + nb
        active[b] = False
        leaves[a] = leaves[a] + leaves[b]
        leaves[b] = None
    root = int(np.flatnonzero(active)[0])
    return [codes[k] for k in leaves[root]], merges


def hierarchical_order(p):
    """Product codes in the leaf order of :func:`average_linkage`, for matrix display."""
    return average_linkage(p)[0]


def _node_attrs(product, meta, node_flags):
    attrs = {}
    m = meta.get(product) if meta else None
    if m is not None:
        attrs["name"] = m.name
        if m.leamer_class:
            attrs["leamer_class"] = m.leamer_class
    if node_flags is not None:
        attrs["rca_flag"] = bool(node_flags.get(product, False))
    return attrs


def _sorted_edges(g):
    return sorted(g.edges, key=lambda e: (e.source, e.target))


def export_graph(g, path, format="graphml", node_flags=None):
    """Write ``g`` as ``graphml``, ``dot``, ``json`` or ``edge-csv``.

    ``node_flags`` optionally maps products to a boolean ``rca_flag`` node
    attribute, e.g. a country's or region's ``RCA > 1`` set.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if format == "graphml":
        _write_graphml(g, path, node_flags)
    elif format == "dot":
        _write_dot(g, path, node_flags)
    elif format == "json":
        _write_json(g, path, node_flags)
    elif format in ("edge-csv", "csv"):
        write_csv(
            path,
            EDGE_CSV_COLUMNS,
            ((e.source, e.target, e.phi, e.tag) for e in _sorted_edges(g)),
        )
    else:
        raise ValueError(f"unknown graph format {format!r}")
    return path


GRAPH_SUFFIX = {"graphml": ".graphml", "dot": ".dot", "json": ".json", "edge-csv": ".csv"}


def _write_graphml(g, path, node_flags):
    # written by hand rather than via networkx so that output bytes are stable
    keys = [
        ('<key id="name" for="node" attr.name="name" attr.type="string"/>'),
        ('<key id="leamer_class" for="node" attr.name="leamer_class" attr.type="string"/>'),
        ('<key id="rca_flag" for="node" attr.name="rca_flag" attr.type="boolean"/>'),
        ('<key id="phi" for="edge" attr.name="phi" attr.type="double"/>'),
        ('<key id="tag" for="edge" attr.name="tag" attr.type="string"/>'),
    ]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        *("  " + k for k in keys),
        '  <graph id="product_space" edgedefault="undirected">',
    ]
    for p in sorted(g.products):
        attrs = _node_attrs(p, g.meta, node_flags)
        lines.append(f'    <node id="{escape(p)}">')
        for k in ("name", "leamer_class", "rca_flag"):
            if k in attrs:
                v = attrs[k]
                v = ("true" if v else "false") if isinstance(v, bool) else escape(str(v))
                lines.append(f'      <data key="{k}">{v}</data>')
        lines.append("    </node>")
    for e in _sorted_edges(g):
        lines.append(f'    <edge source="{escape(e.source)}" target="{escape(e.target)}">')
        lines.append(f'      <data key="phi">{fmt(e.phi)}</data>')
        lines.append(f'      <data key="tag">{escape(e.tag)}</data>')
        lines.append("    </edge>")
    lines += ["  </graph>", "</graphml>"]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _dot_quote(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _write_dot(g, path, node_flags):
    lines = ["graph product_space {"]
    for p in sorted(g.products):
        attrs = _node_attrs(p, g.meta, node_flags)
        body = ", ".join(
            f"{k}={_dot_quote(str(v).lower() if isinstance(v, bool) else v)}"
            for k, v in attrs.items()
        )
        lines.append(f"  {_dot_quote(p)}" + (f" [{body}];" if body else ";"))
    for e in _sorted_edges(g):
        lines.append(
            f"  {_dot_quote(e.source)} -- {_dot_quote(e.target)} "
            f"[weight={fmt(e.phi)}, tag={_dot_quote(e.tag)}];"
        )
    lines.append("}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(g, path, node_flags):
    nodes = []
    for p in sorted(g.products):
        attrs = _node_attrs(p, g.meta, node_flags)
        node = {"id": p, "name": attrs.get("name"), "class": attrs.get("leamer_class")}
        if "rca_flag" in attrs:
            node["rca_flag"] = attrs["rca_flag"]
        nodes.append(node)
    edges = [
        {"source": e.source, "target": e.target, "phi": float(fmt(e.phi)), "tag": e.tag}
        for e in _sorted_edges(g)
    ]
    path.write_text(
        json.dumps({"nodes": nodes, "edges": edges}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def read_edge_csv(path, products=None):
    """Rebuild a :class:`ProductGraph` from an edge CSV written by :func:`export_graph`."""
    edges = []
    seen = set()
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            edges.append(Edge(row["sitc4_i"], row["sitc4_j"], float(row["phi"]), row["tag"]))
            seen.update((row["sitc4_i"], row["sitc4_j"]))
    return ProductGraph(products if products is not None else sorted(seen), edges)


def read_graph_json(path):
    from .ingest import ProductMeta

    data = json.loads(Path(path).read_text(encoding="utf-8"))
    meta = {
        n["id"]: ProductMeta(n["id"], n["name"], n.get("class"))
        for n in data["nodes"]
        if n.get("name") is not None
    }
    edges = [Edge(e["source"], e["target"], float(e["phi"]), e["tag"]) for e in data["edges"]]
    return ProductGraph([n["id"] for n in data["nodes"]], edges, meta)
