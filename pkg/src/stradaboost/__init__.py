"""stradaboost: instance-transfer boosting for regression.

Implements S-TrAdaBoost.R2 (importance-sampled transfer boosting), the
two-stage TrAdaBoost.R2 baseline, AdaBoost.R2 with weighted-median
voting, source-instance sampling front ends, dataset complexity
measures, and a deterministic benchmark harness with a CLI.
"""

from .version import __version__
from .dataset import (Dataset, TransferSplit, FoldAssignment, load_csv,
                      standardize, pearson_correlation, correlation_split, kfold)
from .tree import TreeConfig, RegressionTree, fit_tree, predict_tree, dump_tree
from .boosting import (LOSS_KINDS, BoostedEnsemble, normalized_losses,
                       fit_adaboost_r2, predict_weighted_median)
from .sampling import (TrainingPool, KMeansResult, importance_sample, kmeans,
                       k_center_sample, build_pool)
from .transfer import (StradaConfig, StepRecord, TransferModel, adjusted_error,
                       beta_schedule, update_weights, cv_step_error,
                       fit_strada, fit_ttr2, predict)
from .complexity import (ComplexityReport, ols_fit, c_fe, d_l, d_i,
                         complexity_report)
from .bench import (DatasetSpec, ExperimentConfig, ResultTable, derive_seed,
                    rmse, r_squared, run_comparative, run_ablation,
                    run_negative_transfer, run_complexity, summarize_rows,
                    write_outputs)

__all__ = [
    "__version__",
    "Dataset", "TransferSplit", "FoldAssignment", "load_csv", "standardize",
    "pearson_correlation", "correlation_split", "kfold",
    "TreeConfig", "RegressionTree", "fit_tree", "predict_tree", "dump_tree",
    "LOSS_KINDS", "BoostedEnsemble", "normalized_losses", "fit_adaboost_r2",
    "predict_weighted_median",
    "TrainingPool", "KMeansResult", "importance_sample", "kmeans",
    "k_center_sample", "build_pool",
    "StradaConfig", "StepRecord", "TransferModel", "adjusted_error",
    "beta_schedule", "update_weights", "cv_step_error", "fit_strada",
    "fit_ttr2", "predict",
    "ComplexityReport", "ols_fit", "c_fe", "d_l", "d_i", "complexity_report",
    "DatasetSpec", "ExperimentConfig", "ResultTable", "derive_seed", "rmse",
    "r_squared", "run_comparative", "run_ablation", "run_negative_transfer",
    "run_complexity", "summarize_rows", "write_outputs",
]
