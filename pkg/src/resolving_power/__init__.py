"""Resolving power of threshold-free binary-classifier evaluation metrics.

Signal curves map a companion metric (AUPRC) onto a reference quality scale
(AUROC); Monte Carlo replicates give each metric's sampling noise; the width
of a metric's confidence interval on the quality scale is its resolution.
"""

from .binormal import (BinormalModel, PopulationSpec, analytic_auroc, binormal_auprc,
                       binormal_signal_curve, hanley_mcneil_se, shift_for_auroc)
from .experiment import StudyResult, StudySpec, run_binormal_sweep, run_empirical_study
from .noise import NoiseEstimate, SamplingPlan, draw_replicate, estimate_noise, quantile
from .resolve import (LinearApprox, ResolutionReport, linear_resolution, relative_delta,
                      resolution)
from .scores import LabeledScores, MetricId, auprc, auroc, pr_curve, roc_curve
from .signal import (ImprovementStrategy, ShiftGrid, SignalCurve, empirical_signal_curve,
                     map_to_quality, min_out_of_order_gap, shifted_scores)

__version__ = "0.1.0"

__all__ = [
    "BinormalModel", "PopulationSpec", "analytic_auroc", "binormal_auprc",
    "binormal_signal_curve", "hanley_mcneil_se", "shift_for_auroc",
    "StudyResult", "StudySpec", "run_binormal_sweep", "run_empirical_study",
    "NoiseEstimate", "SamplingPlan", "draw_replicate", "estimate_noise", "quantile",
    "LinearApprox", "ResolutionReport", "linear_resolution", "relative_delta", "resolution",
    "LabeledScores", "MetricId", "auprc", "auroc", "pr_curve", "roc_curve",
    "ImprovementStrategy", "ShiftGrid", "SignalCurve", "empirical_signal_curve",
    "map_to_quality", "min_out_of_order_gap", "shifted_scores",
]
