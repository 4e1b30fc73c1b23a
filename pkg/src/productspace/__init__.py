"""Product-space construction and threshold diffusion of comparative advantage."""

from .diffusion import (
    ConvergenceReport,
    DiffusionConfig,
    DiffusionTrace,
    ProductIncome,
    convergence_sweep,
    diffuse,
    diffuse_all,
    iqr,
    prody,
    reach_prody,
)
from .dynamics import (
    DensityMatrix,
    DensityRow,
    TransitionStats,
    TransitionTable,
    classify_transitions,
    density,
    density_distributions,
    density_matrix,
    discovery_ratio,
    transition_prob_by_proximity,
    transition_prob_by_rank,
)
from .errors import (
    DuplicateKeyError,
    EmptyInputError,
    ParseError,
    ProductSpaceError,
    UndefinedStatisticError,
    UnknownCodeError,
)
from .graph import (
    ProductGraph,
    component_curve,
    export_graph,
    hierarchical_order,
    max_spanning_forest,
    overlay,
    product_space,
)
from .ingest import (
    CountryIncome,
    ExportMatrix,
    ProductMeta,
    TradeRecord,
    aggregate_region,
    load_income,
    load_meta,
    load_trade,
    load_trade_by_year,
)
from .proximity import PhiStats, ProximityMatrix, phi_correlation, phi_stats
from .specialization import RcaMatrix, SpecializationMatrix, binarize, rca, region_rca

__version__ = "0.1.0"
