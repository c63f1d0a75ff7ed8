"""Category-level multi-label causal feature selection."""

__version__ = "0.1.0"

from .data import (  # noqa: E402
    CamcfConfig,
    CategoryNode,
    CausalNeighborhood,
    Dataset,
    DatasetError,
    SelectionResult,
    category_indicator,
    flatten_labels,
)
from .info import (  # noqa: E402
    conditional_mutual_information,
    dcsmi,
    entropy,
    joint_encode,
    mutual_information,
    scsmi,
)
from .pipeline import run_camcf  # noqa: E402

__all__ = [
    "CamcfConfig",
    "CategoryNode",
    "CausalNeighborhood",
    "Dataset",
    "DatasetError",
    "SelectionResult",
    "category_indicator",
    "conditional_mutual_information",
    "dcsmi",
    "entropy",
    "flatten_labels",
    "joint_encode",
    "mutual_information",
    "run_camcf",
    "scsmi",
]
