"""Self-organizing maps for incomplete data.

Train Kohonen maps on datasets with missing cells (distances and updates
restricted to observed components), classify incomplete rows against a
frozen map, estimate missing values from the winning code vectors, group
units into super-classes, and measure imputation error under controlled
random deletion.
"""

from .data import (
    DataMatrix,
    MaskedCellError,
    StandardizationParams,
    destandardize,
    fit_standardizer,
    standardize,
)
from .evaluation import (
    EvalReport,
    MaskingLedger,
    MaskingPlan,
    deletion_curve,
    mask_random,
    mean_impute_baseline,
    modality_proportions,
    pairwise_correlation,
    rmse_deleted,
)
from .imputation import (
    CellFill,
    ImputationReport,
    apply_column_mean_fallback,
    impute,
    impute_ensemble,
    impute_multi,
)
from .metric import (
    CodeBook,
    UnclassifiableRowError,
    masked_sq_distance,
    masked_sq_distances,
    winner,
)
from .superclass import (
    SuperClassing,
    hierarchical_codes,
    superclass_of_rows,
    ward_dendrogram,
)
from .topology import GridTopology, NeighborhoodState
from .trainer import (
    UNCLASSIFIABLE,
    Assignment,
    ForgyResult,
    TrainingMode,
    TrainingSchedule,
    TrainResult,
    classify_supplementary,
    forgy_train,
    init_codebook,
    sgd_step,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CellFill",
    "CodeBook",
    "DataMatrix",
    "EvalReport",
    "ForgyResult",
    "GridTopology",
    "ImputationReport",
    "MaskedCellError",
    "MaskingLedger",
    "MaskingPlan",
    "NeighborhoodState",
    "StandardizationParams",
    "SuperClassing",
    "TrainResult",
    "TrainingMode",
    "TrainingSchedule",
    "UNCLASSIFIABLE",
    "UnclassifiableRowError",
    "apply_column_mean_fallback",
    "classify_supplementary",
    "deletion_curve",
    "destandardize",
    "fit_standardizer",
    "forgy_train",
    "hierarchical_codes",
    "impute",
    "impute_ensemble",
    "impute_multi",
    "init_codebook",
    "mask_random",
    "masked_sq_distance",
    "masked_sq_distances",
    "mean_impute_baseline",
    "modality_proportions",
    "pairwise_correlation",
    "rmse_deleted",
    "sgd_step",
    "standardize",
    "superclass_of_rows",
    "train",
    "ward_dendrogram",
    "winner",
]
