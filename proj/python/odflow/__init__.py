"""Aggregation analysis of origin-destination flows."""

from ._core import (
    DistanceSpec,
    FlowDataset,
    OdflowError,
    ParseError,
    compute_l_curve,
    csr_envelope,
    default_r_grid,
    detect_scales,
    estimate_intensity,
    extract_key_cluster,
    flow_dbscan,
    flow_distance,
    k_function,
    l_function,
    local_l_function,
    read_flows,
    run_benchmark,
    sample_csr,
    score,
    simulate,
)

__version__ = "0.1.0"
