"""Python bindings for the range-partition entropy toolkit."""

from ._core import (
    NumericError,
    SizeGuardError,
    ValidationError,
    bound,
    chamfer,
    fit_anchors,
    gen_dataset,
    h_diff,
    hausdorff,
    hull,
    maxima,
    oracle_partition,
    paired_ttest,
    restructure,
)

__all__ = [
    "NumericError",
    "SizeGuardError",
    "ValidationError",
    "bound",
    "chamfer",
    "fit_anchors",
    "gen_dataset",
    "h_diff",
    "hausdorff",
    "hull",
    "maxima",
    "oracle_partition",
    "paired_ttest",
    "restructure",
]
