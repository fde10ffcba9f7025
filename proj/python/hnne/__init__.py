"""Hierarchical 1-NN graph embedding."""

from ._hnne import (
    InvalidArgument,
    InvalidData,
    Model,
    __version__,
    centroid_triplet_accuracy,
    fit,
    gen_blobs,
    gen_uniform_square,
    hierarchy_labels,
    hierarchy_level_sizes,
    knn_accuracy_cv,
    load_model,
    render_scatter_svg,
    set_threads,
    transform,
    trustworthiness,
)

__all__ = [
    "InvalidArgument",
    "InvalidData",
    "Model",
    "__version__",
    "centroid_triplet_accuracy",
    "fit",
    "gen_blobs",
    "gen_uniform_square",
    "hierarchy_labels",
    "hierarchy_level_sizes",
    "knn_accuracy_cv",
    "load_model",
    "render_scatter_svg",
    "set_threads",
    "transform",
    "trustworthiness",
]
