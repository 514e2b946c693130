"""Labeled risk scores and exact empirical ROC / precision-recall estimators.

All estimators work from a single descending sort of the scores. Cases that
share a score move across the decision threshold together, so each distinct
score contributes one confusion-matrix point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import rankdata


class MetricId(str, enum.Enum):
    AUROC = "AUROC"
    AUPRC = "AUPRC"

    def __str__(self) -> str:
        return self.value


class DegenerateDataError(ValueError):
    """Raised when a metric is undefined because one class is missing."""


@dataclass(frozen=True, eq=False)
class LabeledScores:
    """Risk scores paired with binary outcomes (1 = positive, 0 = negative)."""

    scores: NDArray[np.float64]
    labels: NDArray[np.int8]

    def __init__(self, scores: ArrayLike, labels: ArrayLike):
        s = np.array(scores, dtype=np.float64)
        raw = np.asarray(labels)
        if s.ndim != 1 or raw.ndim != 1:
            raise ValueError("scores and labels must be one-dimensional")
        if s.shape != raw.shape:
            raise ValueError(
                f"scores and labels differ in length ({s.size} vs {raw.size})"
            )
        if s.size < 2:
            raise DegenerateDataError("need at least two cases")
        if not np.all(np.isfinite(s)):
            raise ValueError("scores must be finite")
        if not np.all((raw == 0) | (raw == 1)):
            raise ValueError("labels must be 0 or 1")
        lab = raw.astype(np.int8)
        n_pos = int(lab.sum())
        if n_pos == 0 or n_pos == lab.size:
            raise DegenerateDataError(
                "need at least one positive and one negative case"
            )
        s.setflags(write=False)
        lab.setflags(write=False)
        object.__setattr__(self, "scores", s)
        object.__setattr__(self, "labels", lab)

    @classmethod
    def from_classes(cls, positives: ArrayLike, negatives: ArrayLike) -> "LabeledScores":
        pos = np.asarray(positives, dtype=np.float64).ravel()
        neg = np.asarray(negatives, dtype=np.float64).ravel()
        labels = np.concatenate([np.ones(pos.size, np.int8), np.zeros(neg.size, np.int8)])
        return cls(np.concatenate([pos, neg]), labels)

    def __len__(self) -> int:
        return int(self.scores.size)

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return len(self) - self.n_pos

    @property
    def prevalence(self) -> float:
        return self.n_pos / len(self)

    @property
    def positives(self) -> NDArray[np.float64]:
        return self.scores[self.labels == 1]

    @property
    def negatives(self) -> NDArray[np.float64]:
        return self.scores[self.labels == 0]


@dataclass(frozen=True)
class Curve:
    """Points of an empirical ROC or PR curve.

    For ROC curves ``x`` is the false positive rate and ``y`` the true
    positive rate. For PR curves ``x`` is recall and ``y`` precision.
    ``thresholds[i]`` is the score cut producing point ``i`` (cases with
    ``score >= threshold`` are flagged); the synthetic start point uses ``inf``.
    """

    x: NDArray[np.float64]
    y: NDArray[np.float64]
    thresholds: NDArray[np.float64]

    def __len__(self) -> int:
        return int(self.x.size)

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def _confusion_counts(data: LabeledScores):
    """Cumulative (TP, FP) at each distinct threshold, descending.

    Returned arrays start with the (0, 0) point at threshold ``+inf``.
    """
    order = np.argsort(-data.scores, kind="stable")
    s = data.scores[order]
    lab = data.labels[order]
    # last index of each block of tied scores
    ends = np.flatnonzero(np.append(s[1:] != s[:-1], True))
    tp = np.cumsum(lab, dtype=np.int64)[ends]
    fp = (ends + 1) - tp
    tp = np.concatenate([[0], tp])
    fp = np.concatenate([[0], fp])
    thresholds = np.concatenate([[np.inf], s[ends]])
    return tp, fp, thresholds


def auroc(data: LabeledScores) -> float:
    """Mann-Whitney estimate of P(score of a positive > score of a negative).

    Tied positive/negative pairs count one half.
    """
    ranks = rankdata(data.scores, method="average")
    n_pos, n_neg = data.n_pos, data.n_neg
    u = ranks[data.labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_curve(data: LabeledScores) -> Curve:
    tp, fp, thr = _confusion_counts(data)
    return Curve(fp / data.n_neg, tp / data.n_pos, thr)


def curve_area(curve: Curve) -> float:
    """Trapezoidal area under a piecewise-linear curve."""
    return float(np.sum(np.diff(curve.x) * (curve.y[1:] + curve.y[:-1])) / 2.0)


def pr_curve(data: LabeledScores) -> Curve:
    """Achievable precision-recall points, ordered by recall.

    Points at zero recall are dropped; the curve instead starts at recall 0
    with the precision of the first point that has a true positive.
    """
    tp, fp, thr = _confusion_counts(data)
    keep = tp > 0
    tp, fp, thr = tp[keep], fp[keep], thr[keep]
    recall = tp / data.n_pos
    precision = tp / (tp + fp)
    return Curve(
        np.concatenate([[0.0], recall]),
        np.concatenate([[precision[0]], precision]),
        np.concatenate([[np.inf], thr]),
    )


def _dg_area(tp: NDArray, fp: NDArray, n_pos: int) -> float:
    """Area under the Davis-Goadrich interpolated PR curve.

    ``tp``/``fp`` are cumulative counts at successive thresholds starting from
    (0, 0). Between points (T, F) and (T + a, F + b) precision follows
    (T + x) / (T + F + x * (1 + b/a)); each segment is integrated in closed form.
    """
    t0 = tp[:-1].astype(np.float64)
    f0 = fp[:-1].astype(np.float64)
    a = np.diff(tp).astype(np.float64)
    b = np.diff(fp).astype(np.float64)
    seg = a > 0
    t0, f0, a, b = t0[seg], f0[seg], a[seg], b[seg]
    c = 1.0 + b / a
    d = t0 + f0
    area = a / c  # constant-precision part; the whole area when T = 0
    start = t0 > 0
    # first segment has T = 0: horizontal extension at the first point's precision
    first = ~start
    area[first] = a[first] * a[first] / (a[first] + f0[first] + b[first])
    ds, cs = d[start], c[start]
    area[start] += (t0[start] - ds / cs) / cs * np.log1p(cs * a[start] / ds)
    return float(area.sum() / n_pos)


def auprc(data: LabeledScores) -> float:
    """Area under the PR curve with Davis-Goadrich interpolation."""
    tp, fp, _ = _confusion_counts(data)
    return _dg_area(tp, fp, data.n_pos)


def auroc_auprc(data: LabeledScores) -> tuple[float, float]:
    """Both areas from one sort; AUROC via the trapezoid rule (exact with ties)."""
    tp, fp, _ = _confusion_counts(data)
    roc = np.sum(np.diff(fp) * (tp[1:] + tp[:-1])) / 2.0
    return float(roc / (data.n_pos * data.n_neg)), _dg_area(tp, fp, data.n_pos)


METRICS = {MetricId.AUROC: auroc, MetricId.AUPRC: auprc}


def metric_values(data: LabeledScores, metrics) -> list[float]:
    """Evaluate several metrics on one sample, sharing work where possible."""
    ids = [MetricId(m) for m in metrics]
    if set(ids) <= {MetricId.AUROC, MetricId.AUPRC}:
        pair = dict(zip((MetricId.AUROC, MetricId.AUPRC), auroc_auprc(data)))
        return [pair[m] for m in ids]
    return [METRICS[m](data) for m in ids]
