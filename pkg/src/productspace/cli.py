"""Command-line pipeline: ingest -> rca -> proximity -> graph / dynamics / diffusion.

Every stage reads the artifacts of earlier stages from the output directory
and writes its own next to them, together with the resolved ``config.json``.
Flags given on the command line override values stored in ``config.json``
(or in a file passed with ``--config``), which override the defaults.
"""

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diffusion, dynamics, graph, ingest, proximity, specialization
from ._io import read_rows, write_csv, write_json
from .errors import ProductSpaceError

log = logging.getLogger("productspace")

OUT_ENV = "PRODUCTSPACE_OUT"

STAGES = ("ingest", "rca", "proximity", "graph", "density", "transitions", "diffuse", "converge", "report")


@dataclass
class RunConfig:
    trade: str = None
    income: str = None
    meta: str = None
    regions: str = None
    window: str = "1998:2000"
    compare: str = "1990:1995"
    rca_high: float = 1.0
    rca_low: float = 0.5
    overlay_phi: float = 0.55
    phi0: float = 0.55
    phi_grid: str = "0.4:0.05:0.8"
    component_grid: str = "0:0.05:1"
    iterations: int = 20
    top_n: int = 50
    inclusive_threshold: bool = True
    format: list = field(default_factory=lambda: ["graphml", "dot", "json", "edge-csv"])
    dense: bool = False
    min_export: float = 0.0
    flag: str = None
    countries: list = None
    density_bin: float = 0.02
    proximity_bin: float = 0.1
    seed: int = 0

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    def to_dict(self):
        return dataclasses.asdict(self)

    @property
    def diffusion(self):
        return diffusion.DiffusionConfig(
            phi0=self.phi0,
            iterations=self.iterations,
            top_n=self.top_n,
            inclusive=self.inclusive_threshold,
        )


class StageError(ProductSpaceError):
    pass


class Run:
    """An output directory plus the resolved configuration."""

    def __init__(self, out, config):
        self.out = Path(out)
        self.config = config

    def path(self, name):
        return self.out / name

    def require(self, name, stage, producer):
        p = self.path(name)
        if not p.exists():
            raise StageError(
                f"{stage}: missing {name} in {self.out}; run `productspace {producer}` first"
            )
        return p

    def save_config(self):
        write_json(self.path("config.json"), self.config.to_dict())


# stages ----------------------------------------------------------------------


def stage_ingest(run):
    cfg = run.config
    if not cfg.trade:
        raise StageError("ingest: --trade is required")
    base = ingest.load_trade(cfg.trade, cfg.window)
    if cfg.min_export > 0:
        base = ingest.filter_countries(base, cfg.min_export)
    ingest.write_trade(base, run.path("exports.csv"))
    log.info("ingest: %d countries x %d products", *base.shape)

    if cfg.compare:
        t0, t1 = ingest.parse_window(cfg.compare)
        records = list(ingest.read_trade_records(cfg.trade))
        for tag, year in (("t0", t0), ("t1", t1)):
            try:
                m = ingest.pool_records(records, (year, year))
            except ProductSpaceError:
                warnings.warn(f"no trade rows for comparison year {year}")
                continue
            ingest.write_trade(m, run.path(f"exports_{tag}.csv"))

    if cfg.income:
        first, last = ingest.parse_window(cfg.window)
        by_country = {}
        for rec in ingest.load_income(cfg.income):
            if first <= rec.year <= last:
                by_country.setdefault(rec.country, []).append(rec.gdp_per_capita)
        if not by_country:
            warnings.warn(f"{cfg.income}: no income rows inside {cfg.window}")
        write_csv(
            run.path("income.csv"),
            ingest.INCOME_COLUMNS,
            ((c, str(first), math.fsum(v) / len(v)) for c, v in sorted(by_country.items())),
        )
    if cfg.meta:
        meta = ingest.load_meta(cfg.meta)
        write_csv(
            run.path("meta.csv"),
            ("sitc4", "name", "leamer_class"),
            ((m.product, m.name, m.leamer_class or "") for _, m in sorted(meta.items())),
        )


def _load_exports(run, name, stage):
    path = run.require(name, stage, "ingest")
    m = ingest.load_trade(path, (-(10**9), 10**9))
    return m


def stage_rca(run):
    cfg = run.config
    base = _load_exports(run, "exports.csv", "rca")
    specialization.write_rca(specialization.rca(base), run.path("rca.csv"), cfg.rca_high)
    for tag in ("t0", "t1"):
        if run.path(f"exports_{tag}.csv").exists():
            m = _load_exports(run, f"exports_{tag}.csv", "rca")
            specialization.write_rca(specialization.rca(m), run.path(f"rca_{tag}.csv"))
    if cfg.regions:
        groups = json.loads(Path(cfg.regions).read_text(encoding="utf-8"))
        r = specialization.region_rca(base, groups)
        specialization.write_rca(r, run.path("rca_regions.csv"), cfg.rca_high)


def _base_specialization(run, stage):
    r = specialization.read_rca(run.require("rca.csv", stage, "rca"))
    return r, specialization.binarize(r, run.config.rca_high)


def stage_proximity(run):
    _, s = _base_specialization(run, "proximity")
    p = proximity.proximity(s)
    proximity.write_proximity(p, run.path("proximity.csv"))
    if run.config.dense:
        proximity.write_proximity_binary(p, run.path("proximity.bin"))
    stats = proximity.phi_stats(p, thresholds=(0.1, 0.2))
    write_json(run.path("phi_stats.json"), stats.as_dict())


def _proximity(run, stage):
    return proximity.read_proximity(run.require("proximity.csv", stage, "proximity"))


def _meta(run):
    path = run.path("meta.csv")
    return ingest.load_meta(path) if path.exists() else {}


def stage_graph(run):
    cfg = run.config
    p = _proximity(run, "graph")
    g = graph.product_space(p, cfg.overlay_phi, _meta(run))
    flags = None
    if cfg.flag:
        sources = [run.path("rca.csv"), run.path("rca_regions.csv")]
        for src in sources:
            if src.exists():
                r = specialization.read_rca(src)
                if cfg.flag in r.countries:
                    s = specialization.binarize(specialization.reindex(r, p.products), cfg.rca_high)
                    flags = dict(zip(s.products, s.bits[s.country_index(cfg.flag)].tolist()))
                    break
        if flags is None:
            raise StageError(f"graph: --flag {cfg.flag!r} is neither a country nor a region")
    for fmt_name in cfg.format:
        graph.export_graph(g, run.path("graph" + graph.GRAPH_SUFFIX[fmt_name]), fmt_name, flags)
    curve = graph.component_curve(p, diffusion.parse_grid(cfg.component_grid))
    write_csv(
        run.path("components.csv"),
        ("threshold", "giant_size", "total_products", "ratio"),
        ((c.threshold, c.giant_size, c.total_products, c.ratio) for c in curve),
    )
    order = graph.hierarchical_order(p)
    write_csv(run.path("order.csv"), ("position", "sitc4"), ((k, q) for k, q in enumerate(order)))


def _write_density(dm, path):
    write_csv(
        path,
        ("country", "sitc4", "omega"),
        (
            (c, q, dm.values[i, j])
            for i, c in enumerate(dm.countries)
            for j, q in enumerate(dm.products)
        ),
    )


def stage_density(run):
    p = _proximity(run, "density")
    r, _ = _base_specialization(run, "density")
    s = specialization.binarize(specialization.reindex(r, p.products), run.config.rca_high)
    _write_density(dynamics.density_matrix(s, p), run.path("density.csv"))


def stage_transitions(run):
    cfg = run.config
    p = _proximity(run, "transitions")
    r0 = specialization.read_rca(run.require("rca_t0.csv", "transitions", "rca"))
    r1 = specialization.read_rca(run.require("rca_t1.csv", "transitions", "rca"))
    r0 = specialization.reindex(r0, p.products)
    r1 = specialization.reindex(r1, p.products)
    s0 = specialization.binarize(r0, cfg.rca_high)
    years = ingest.parse_window(cfg.compare)
    t = dynamics.classify_transitions(r0, r1, cfg.rca_low, cfg.rca_high, years)
    write_csv(run.path("transitions.csv"), ("country", "sitc4", "label"), t.pairs())

    dm = dynamics.density_matrix(s0, p)
    _write_density(dm, run.path("density_t0.csv"))
    edges, th, uh = dynamics.density_distributions(t, dm, cfg.density_bin)
    write_csv(
        run.path("density_hist.csv"),
        ("bin_low", "bin_high", "transition", "undeveloped"),
        zip(edges[:-1], edges[1:], th, uh),
    )
    stats = dynamics.discovery_ratio(t, dm)
    write_csv(
        run.path("ratios.csv"),
        ("sitc4", "T", "nonT", "H"),
        zip(stats.products, stats.T, stats.non_t, stats.H),
    )
    curve = dynamics.transition_prob_by_proximity(t, s0, p, cfg.proximity_bin)
    write_csv(
        run.path("prob_proximity.csv"),
        ("bin_low", "bin_high", "transitions", "opportunities", "probability"),
        ((c.low, c.high, c.transitions, c.opportunities, c.probability) for c in curve),
    )
    write_csv(
        run.path("prob_rank.csv"),
        ("rank", "transitions", "opportunities", "probability"),
        ((k, n, m, n / m) for k, n, m in dynamics.transition_prob_by_rank(t, s0, p)),
    )


def _selected(s, countries):
    if not countries:
        return list(s.countries)
    for c in countries:
        s.country_index(c)
    return sorted(countries)


def stage_diffuse(run):
    cfg = run.config
    p = _proximity(run, "diffuse")
    r, _ = _base_specialization(run, "diffuse")
    s = specialization.binarize(specialization.reindex(r, p.products), cfg.rca_high)
    rows = []
    for c in _selected(s, cfg.countries):
        trace = diffusion.diffuse(s, p, cfg.diffusion, c)
        rows.extend((c, q, k) for q, k in sorted(trace.acquired.items()))
    write_csv(run.path("traces.csv"), ("country", "sitc4", "step"), rows)


def stage_converge(run):
    cfg = run.config
    p = _proximity(run, "converge")
    r, _ = _base_specialization(run, "converge")
    r = specialization.reindex(r, p.products)
    s = specialization.binarize(r, cfg.rca_high)
    incomes = ingest.load_income(run.require("income.csv", "converge", "ingest --income"))
    prodys = diffusion.prody(r, incomes)
    write_csv(run.path("prody.csv"), ("sitc4", "prody"), ((q.product, q.prody) for q in prodys))
    grid = diffusion.parse_grid(cfg.phi_grid)
    report = diffusion.convergence_sweep(s, p, prodys, grid, cfg.diffusion)
    rows = [("original", c, v) for c, v in sorted(report.original.items())]
    for row in report.rows:
        rows.extend((row.phi0, c, v) for c, v in sorted(row.reach.items()))
    write_csv(run.path("sweep.csv"), ("phi0", "country", "reach_prody"), rows)
    write_json(run.path("convergence.json"), report.as_dict())


REPORT_ARTIFACTS = {
    "phi_stats": "phi_stats.json",
    "components": "components.csv",
    "discovery": "ratios.csv",
    "transition_probability": "prob_proximity.csv",
    "convergence": "convergence.json",
}


def _csv_records(path):
    return [row for _, row in read_rows(path, ())]


def _num(text):
    return float(text) if text not in ("", None) else math.nan


def stage_report(run):
    missing = [name for name in REPORT_ARTIFACTS.values() if not run.path(name).exists()]
    if len(missing) == len(REPORT_ARTIFACTS):
        raise StageError(f"report: no stage outputs in {run.out}; missing {', '.join(missing)}")
    summary = {key: None for key in REPORT_ARTIFACTS}
    summary["missing"] = missing
    for name in missing:
        warnings.warn(f"report: {name} not found; section left empty")

    if run.path("phi_stats.json").exists():
        stats = json.loads(run.path("phi_stats.json").read_text(encoding="utf-8"))
        summary["phi_stats"] = {k: stats[k] for k in ("n_pairs", "frac_zero", "frac_below")}
    if run.path("components.csv").exists():
        summary["components"] = [
            {"threshold": _num(r["threshold"]), "ratio": _num(r["ratio"])}
            for r in _csv_records(run.path("components.csv"))
        ]
    if run.path("ratios.csv").exists():
        h = np.array([_num(r["H"]) for r in _csv_records(run.path("ratios.csv"))])
        defined = h[~np.isnan(h)]
        summary["discovery"] = {
            "n_products": int(h.size),
            "n_defined": int(defined.size),
            "frac_H_above_one": float(np.mean(defined > 1)) if defined.size else None,
        }
    if run.path("prob_proximity.csv").exists():
        summary["transition_probability"] = [
            {
                "bin_low": _num(r["bin_low"]),
                "bin_high": _num(r["bin_high"]),
                "opportunities": int(r["opportunities"]),
                "probability": _num(r["probability"]),
            }
            for r in _csv_records(run.path("prob_proximity.csv"))
        ]
    if run.path("convergence.json").exists():
        summary["convergence"] = json.loads(run.path("convergence.json").read_text(encoding="utf-8"))
    write_json(run.path("summary.json"), summary)
    return summary


STAGE_FUNCS = {
    "ingest": stage_ingest,
    "rca": stage_rca,
    "proximity": stage_proximity,
    "graph": stage_graph,
    "density": stage_density,
    "transitions": stage_transitions,
    "diffuse": stage_diffuse,
    "converge": stage_converge,
    "report": stage_report,
}


# stages that `run` skips when an optional input was never supplied
OPTIONAL_INPUTS = {"transitions": "rca_t0.csv", "converge": "income.csv"}


# argument parsing -------------------------------------------------------------


def _bool_flag(text):
    return str(text).lower() in ("1", "true", "yes", "on")


def _common_parser():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("inputs")
    g.add_argument("--trade", help="trade CSV (year,exporter,sitc4,value)")
    g.add_argument("--income", help="income CSV (country,year,gdp_pc)")
    g.add_argument("--meta", help="product metadata CSV (sitc4,name[,leamer_class])")
    g.add_argument("--regions", help="JSON mapping region label -> list of country codes")
    g.add_argument("--window", help="base year window FIRST:LAST (default 1998:2000)")
    g.add_argument("--compare", help="comparison snapshot years T0:T1 (default 1990:1995)")
    g.add_argument("--min-export", type=float, help="drop countries with smaller pooled exports")
    t = p.add_argument_group("thresholds")
    t.add_argument("--rca-high", type=float, help="specialization threshold (default 1.0)")
    t.add_argument("--rca-low", type=float, help="undeveloped threshold (default 0.5)")
    t.add_argument("--overlay-phi", type=float, help="overlay edge threshold (default 0.55)")
    d = p.add_argument_group("diffusion")
    d.add_argument("--phi0", type=float, help="diffusion threshold for `diffuse` (default 0.55)")
    d.add_argument("--phi-grid", help="START:STEP:STOP or comma list for `converge`")
    d.add_argument("--component-grid", help="threshold grid for the component curve")
    d.add_argument("--iterations", type=int, help="diffusion rounds M (default 20)")
    d.add_argument("--top-n", type=int, help="products averaged in reach PRODY (default 50)")
    d.add_argument(
        "--inclusive-threshold",
        type=_bool_flag,
        metavar="BOOL",
        help="diffuse along phi >= phi0 (true, default) or phi > phi0 (false)",
    )
    d.add_argument("--countries", nargs="+", help="restrict `diffuse` to these countries")
    o = p.add_argument_group("outputs")
    o.add_argument(
        "--format",
        nargs="+",
        choices=sorted(graph.GRAPH_SUFFIX),
        help="graph formats to write",
    )
    o.add_argument("--dense", action="store_const", const=True, help="also write proximity.bin")
    o.add_argument("--flag", help="country or region whose RCA>1 set is flagged on graph nodes")
    o.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./productspace-out)")
    o.add_argument("--config", help="JSON config to start from instead of OUT/config.json")
    o.add_argument("--seed", type=int, help="seed for `synth`")
    o.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="productspace",
        description="Build the product space from trade data and study diffusion on it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ingest": "validate inputs and pool the trade window into exports.csv",
        "rca": "revealed comparative advantage (rca.csv, rca_t0.csv, rca_t1.csv)",
        "proximity": "product proximity matrix and its distribution statistics",
        "graph": "spanning backbone + overlay, component curve, hierarchical order",
        "density": "density around every product for every country",
        "transitions": "transition labels, density ratios and transition curves",
        "diffuse": "threshold diffusion traces at --phi0",
        "converge": "PRODY and the IQR convergence sweep over --phi-grid",
        "report": "collect headline statistics into summary.json",
        "run": "run every stage in order",
        "synth": "write a seeded synthetic trade/income/meta dataset into --out",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def resolve(args):
    """Merge defaults, a stored config and command-line flags into a :class:`Run`."""
    out = Path(args.out or os.environ.get(OUT_ENV) or "productspace-out")
    source = Path(args.config) if args.config else out / "config.json"
    base = RunConfig()
    if source.exists():
        base = RunConfig.from_dict(json.loads(source.read_text(encoding="utf-8")))
    elif args.config:
        raise StageError(f"config file {source} not found")
    overrides = {}
    for f in dataclasses.fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    return Run(out, dataclasses.replace(base, **overrides))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    logging.captureWarnings(True)
    try:
        run = resolve(args)
        if args.command == "synth":
            from .synthetic import write_trade_world

            write_trade_world(run.out, seed=run.config.seed)
            return 0
        run.out.mkdir(parents=True, exist_ok=True)
        if args.command == "run":
            for stage in STAGES:
                needs = OPTIONAL_INPUTS.get(stage)
                if needs and not run.path(needs).exists():
                    warnings.warn(f"run: skipping {stage}; {needs} was not produced")
                    continue
                STAGE_FUNCS[stage](run)
                run.save_config()
        else:
            STAGE_FUNCS[args.command](run)
            run.save_config()
    except (ProductSpaceError, ValueError, OSError) as exc:
        stage = args.command
        print(f"productspace {stage}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
