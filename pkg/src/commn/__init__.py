"""Community-aware centrality for targeted immunization.

Graphs and partitions, LFR benchmark generation, degree / betweenness / Mod /
Commn centralities, immunization plans, SIR simulation and sweep harnesses.
"""
from .centrality import (
    CentralityScores,
    betweenness_centrality,
    commn_centrality,
    commn_score,
    degree_centrality,
    mod_centrality,
    rank,
)
from .community import (
    Partition,
    build_community_weighted_network,
    community_mu,
    community_mus,
    detect_communities_label_propagation,
    global_mixing,
    inter_degree,
    intra_degree,
    load_partition,
    mu_limit,
    split_degrees,
)
from .epidemic import (
    DegreeDistribution,
    SirParams,
    degree_distribution,
    epidemic_threshold,
    integrate_mean_field,
    r_infinity,
    run_sir,
    run_sir_ensemble,
)
from .graph import Graph, degree, largest_connected_component_size, load_edge_list, remove_nodes
from .immunization import (
    ImmunizationPlan,
    StochasticParams,
    immunize_acquaintance,
    immunize_cbf,
    immunize_commn,
    immunize_sequential,
    immunize_static,
)
from .lfr import LfrParams, generate_lfr

__version__ = "0.1.0"
