"""Delta descriptors for sequence-based visual place recognition."""

from ._deltavpr import (
    ConfigError,
    DataError,
    Error,
    PcaModel,
    apply_permutation,
    delta,
    delta_bank,
    distance_matrix,
    estimate_span,
    evaluate_pr,
    generate_traverse_pair,
    multi_delta_distance,
    pca_fit,
    pca_transform,
    rank_dimensions,
    read_descriptors,
    retrieve_best,
    run_pair,
    self_distance_profile,
    seq_match,
    smooth,
    time_warp,
    write_descriptors,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
