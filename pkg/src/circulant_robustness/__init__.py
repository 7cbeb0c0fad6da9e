"""Robustness analysis of circulant digraphs and W-MSR resilient consensus."""

from .adversary import (
    AdversarySpec,
    Constant,
    PerEdgeDistinct,
    PlacementCheck,
    Ramp,
    RandomInRange,
    Sinusoid,
    validate_adversary_placement,
)
from .bounds import k_circulant_r_bound, k_circulant_rs_bound, robustness_implies_rs
from .connectivity import build_connectivity_counterexample, underlying_vertex_connectivity
from .graph import (
    CirculantSpec,
    Digraph,
    NodeSubset,
    complete_digraph,
    in_neighbors,
    make_circulant,
    make_k_circulant,
    parse_edge_list,
    serialize_edge_list,
    underlying_graph,
)
from .robustness import (
    RobustnessReport,
    RsReport,
    Strategy,
    SubsetPair,
    is_r_reachable,
    is_r_robust,
    is_rs_robust,
    max_f_local_tolerance,
    max_r_robustness,
)
from .simulation import SimulationResult, simulate
from .wmsr import WeightScheme, linear_consensus_step, wmsr_filter, wmsr_update

__version__ = "0.1.0"
