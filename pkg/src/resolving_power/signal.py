"""Signal curves: how a companion metric moves as classifier quality improves.

A signal curve pairs a reference quality scale (AUROC) with a companion
metric (AUPRC) along an ordered sequence of increasingly separated score
distributions. Empirical curves are built by perturbing an observed set of
labeled scores; binormal curves live in :mod:`resolving_power.binormal`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .scores import LabeledScores, MetricId, auroc_auprc


class ExtrapolationError(ValueError):
    """A value lies outside the range covered by a signal curve."""


class PerfectClassifierError(ValueError):
    """No out-of-order pair exists, so the ranking cannot be improved."""


class ImprovementStrategy(str, enum.Enum):
    ADDITIVE_SHIFT = "additive"
    TOP_FIRST = "top-first"
    BOTTOM_FIRST = "bottom-first"


@dataclass(frozen=True, eq=False)
class SignalCurve:
    quality: NDArray[np.float64]
    companion: NDArray[np.float64]
    metric_ids: tuple[MetricId, MetricId] = (MetricId.AUROC, MetricId.AUPRC)

    def __post_init__(self):
        q = np.array(self.quality, dtype=np.float64)
        c = np.array(self.companion, dtype=np.float64)
        if q.ndim != 1 or q.shape != c.shape or q.size == 0:
            raise ValueError("quality and companion must be equal-length 1-d arrays")
        if np.any(np.diff(q) <= 0):
            raise ValueError("quality values must be strictly increasing")
        if np.any(np.diff(c) < 0):
            raise ValueError("companion values must be non-decreasing")
        if np.any((q < 0) | (q > 1) | (c < 0) | (c > 1)):
            raise ValueError("curve values must lie in [0, 1]")
        q.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "quality", q)
        object.__setattr__(self, "companion", c)
        object.__setattr__(self, "metric_ids", tuple(MetricId(m) for m in self.metric_ids))

    def __len__(self) -> int:
        return int(self.quality.size)

    @property
    def companion_range(self) -> tuple[float, float]:
        return float(self.companion[0]), float(self.companion[-1])

    def companion_at(self, quality: float) -> float:
        """Forward map: interpolated companion value at a quality value."""
        if not self.quality[0] <= quality <= self.quality[-1]:
            raise ExtrapolationError(
                f"quality {quality} outside curve range "
                f"[{self.quality[0]}, {self.quality[-1]}]"
            )
        return float(np.interp(quality, self.quality, self.companion))

    def window(self, at_quality: float, half_width: int = 5) -> "SignalCurve":
        """The grid points within ``half_width`` indices of ``at_quality``."""
        i = int(np.argmin(np.abs(self.quality - at_quality)))
        lo, hi = max(0, i - half_width), min(len(self), i + half_width + 1)
        return SignalCurve(self.quality[lo:hi], self.companion[lo:hi], self.metric_ids)


@dataclass(frozen=True, eq=False)
class ShiftGrid:
    """The perturbed score distributions behind an empirical signal curve.

    ``increments`` are signed cumulative score shifts applied to the positive
    class for the additive strategy, and signed counts of resolved
    (negative: introduced) out-of-order pairs for pair-resolution strategies.
    """

    base: LabeledScores
    strategy: ImprovementStrategy
    increments: NDArray[np.float64]
    auroc: NDArray[np.float64]
    auprc: NDArray[np.float64]
    step_up: float
    step_down: float
    requested_points: int
    truncated: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def auroc_range(self) -> tuple[float, float]:
        return float(self.auroc.min()), float(self.auroc.max())

    @property
    def auprc_range(self) -> tuple[float, float]:
        return float(self.auprc.min()), float(self.auprc.max())


def _gap_count(lower: NDArray, upper_sorted: NDArray, d: float) -> int:
    """Number of pairs (a, b) with 0 < b - a <= d."""
    hi = np.searchsorted(upper_sorted, lower + d, side="right")
    lo = np.searchsorted(upper_sorted, lower, side="right")
    return int(np.sum(hi - lo))


def _enumerate_gaps(lower: NDArray, upper_sorted: NDArray, d: float) -> NDArray:
    hi = np.searchsorted(upper_sorted, lower + d, side="right")
    lo = np.searchsorted(upper_sorted, lower, side="right")
    counts = hi - lo
    total = int(counts.sum())
    owner = np.repeat(np.arange(lower.size), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    gaps = upper_sorted[lo[owner] + offsets] - lower[owner]
    return np.sort(gaps[gaps > 0])


def smallest_gaps(lower: ArrayLike, upper: ArrayLike, count: int) -> NDArray[np.float64]:
    """The ``count`` smallest strictly positive differences ``b - a``.

    ``a`` ranges over ``lower`` and ``b`` over ``upper``. Runs in
    O(n log n) per bisection step without materialising all pairs.
    """
    a = np.asarray(lower, dtype=np.float64)
    b = np.sort(np.asarray(upper, dtype=np.float64))
    total = _gap_count(a, b, np.inf)
    count = min(int(count), total)
    if count <= 0:
        return np.empty(0)
    d_lo, d_hi = 0.0, float(b[-1] - a.min())
    n_hi = total
    # bisect until the enumerated set is at most about twice what is needed
    while n_hi > 2 * count + 16:
        mid = 0.5 * (d_lo + d_hi)
        if not d_lo < mid < d_hi:
            break
        n_mid = _gap_count(a, b, mid)
        if n_mid >= count:
            d_hi, n_hi = mid, n_mid
        else:
            d_lo = mid
    # widen slightly so float rounding in a + d cannot drop a boundary pair
    gaps = _enumerate_gaps(a, b, d_hi * (1 + 1e-9))
    return gaps[:count]


def _pair_arrays(data: LabeledScores, direction: int):
    if direction > 0:
        return data.positives, data.negatives  # out-of-order: negative above positive
    return data.negatives, data.positives  # in-order pairs, undone by a downward shift


def min_out_of_order_gap(data: LabeledScores) -> float:
    """Smallest positive score gap between a negative ranked above a positive."""
    gaps = smallest_gaps(data.positives, data.negatives, 1)
    if gaps.size == 0:
        raise PerfectClassifierError("no out-of-order pair: classifier ranks perfectly")
    return float(gaps[0])


def pair_resolving_shift(data: LabeledScores, k: int, direction: int = 1) -> float:
    """Shift of the positive scores that crosses the ``k`` closest pairs.

    Returns the midpoint between the k-th smallest gap and the next strictly
    larger one (or the k-th gap plus half the smallest gap when none is larger). With
    ``direction=-1`` gaps are taken over in-order pairs and the returned
    magnitude is meant to be subtracted. Repeated gap values make the shift
    cross every pair tied with the k-th.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    lower, upper = _pair_arrays(data, direction)
    want = k + 1
    while True:
        gaps = smallest_gaps(lower, upper, want)
        if gaps.size < k:
            if direction > 0:
                raise PerfectClassifierError(
                    f"only {gaps.size} out-of-order pairs, cannot resolve {k}")
            raise PerfectClassifierError(f"only {gaps.size} in-order pairs, cannot undo {k}")
        dk = gaps[k - 1]
        larger = gaps[gaps > dk]
        if larger.size:
            return float(0.5 * (dk + larger[0]))
        if gaps.size < want:  # every remaining pair is crossed
            return float(dk + 0.5 * gaps[0])
        want *= 2


def shifted_scores(data: LabeledScores, delta: float) -> LabeledScores:
    """Add ``delta`` to every positive-class score."""
    return LabeledScores(data.scores + delta * (data.labels == 1), data.labels)


def _top_first(order_labels: NDArray, k: int) -> NDArray:
    """Resolve ``k`` out-of-order pairs, highest-ranked positives first.

    ``order_labels`` is the label sequence sorted by descending score.
    """
    pos_idx = np.flatnonzero(order_labels == 1)
    cost = pos_idx - np.arange(pos_idx.size)  # negatives above each positive
    cum = np.cumsum(cost)
    full = int(np.searchsorted(cum, k, side="right"))
    out = order_labels.copy()
    if full >= pos_idx.size:
        out[: pos_idx.size] = 1
        out[pos_idx.size:] = 0
        return out
    r = k - (int(cum[full - 1]) if full else 0)
    p = int(pos_idx[full])
    c = int(cost[full])
    head = np.zeros(p + 1, dtype=out.dtype)
    head[:full] = 1
    head[full + c - r] = 1
    out[: p + 1] = head
    return out


def _rearrange(order_labels: NDArray, k: int, strategy: ImprovementStrategy) -> NDArray:
    """Labels after resolving (k > 0) or introducing (k < 0) |k| pairs."""
    lab = order_labels
    flip = k < 0
    if flip:
        lab = 1 - lab
    if strategy is ImprovementStrategy.TOP_FIRST:
        out = _top_first(lab, abs(k))
    else:
        out = 1 - _top_first(1 - lab[::-1], abs(k))[::-1]
    return 1 - out if flip else out


def _count_pairs(data: LabeledScores) -> tuple[int, int]:
    """(out-of-order, in-order) pair counts, ignoring tied pairs."""
    pos, neg = data.positives, np.sort(data.negatives)
    below = np.searchsorted(neg, pos, side="left").sum()
    above = neg.size - np.searchsorted(neg, pos, side="right")
    return int(above.sum()), int(below)


def empirical_signal_curve(
    data: LabeledScores,
    n_points: int = 1000,
    target_step: float = 0.001,
    strategy: ImprovementStrategy | str = ImprovementStrategy.ADDITIVE_SHIFT,
) -> tuple[SignalCurve, ShiftGrid]:
    """Build a signal curve around the observed scores.

    The grid extends below and above the baseline with symmetric point
    counts. The step is fixed once from the pair ordering so that the first
    step moves AUROC by about ``target_step``; it is not recomputed along the
    grid. Points beyond AUROC 1 or below 0.5 are dropped, as are repeats of
    an AUROC value already on the grid.
    """
    strategy = ImprovementStrategy(strategy)
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if not 0 < target_step < 0.5:
        raise ValueError("target_step must lie in (0, 0.5)")
    n_down = (n_points - 1) // 2
    n_up = n_points - 1 - n_down
    total = data.n_pos * data.n_neg
    k0 = max(1, int(round(target_step * total)))
    n_ooo, n_in = _count_pairs(data)
    notes: list[str] = []

    if strategy is ImprovementStrategy.ADDITIVE_SHIFT:
        step_up = pair_resolving_shift(data, min(k0, n_ooo), 1) if n_ooo and n_up else 0.0
        step_down = pair_resolving_shift(data, min(k0, n_in), -1) if n_in and n_down else 0.0
        incs = np.concatenate([
            -step_down * np.arange(n_down, 0, -1) if step_down else np.empty(0),
            [0.0],
            step_up * np.arange(1, n_up + 1) if step_up else np.empty(0),
        ])

        def point(inc):
            return auroc_auprc(shifted_scores(data, inc))
    else:
        step_up = float(min(k0, n_ooo))
        step_down = float(min(k0, n_in))
        ks_up = [min(j * k0, n_ooo) for j in range(1, n_up + 1)] if n_ooo else []
        ks_down = [-min(j * k0, n_in) for j in range(n_down, 0, -1)] if n_in else []
        incs = np.array(sorted(set(ks_down + [0] + ks_up)), dtype=np.float64)
        order = np.argsort(-data.scores, kind="stable")
        slots = data.scores[order]
        base_labels = data.labels[order]

        def point(inc):
            lab = _rearrange(base_labels, int(inc), strategy)
            return auroc_auprc(LabeledScores(slots, lab))

    values = np.array([point(inc) for inc in incs])
    roc, prc = values[:, 0], values[:, 1]
    base_i = int(np.flatnonzero(incs == 0)[0])
    keep = np.ones(incs.size, dtype=bool)
    # walking outward from the baseline: stop at AUROC 1, drop points under 0.5
    up_stop = np.flatnonzero(roc[base_i:] >= 1.0)
    if up_stop.size:
        keep[base_i + up_stop[0] + 1:] = False
    below = roc < 0.5
    below[base_i] = False
    keep &= ~below
    # repeated AUROC values (no pair crossed in a step)
    best = roc[base_i]
    for i in range(base_i + 1, incs.size):
        if keep[i] and roc[i] > best:
            best = roc[i]
        else:
            keep[i] = False
    best = roc[base_i]
    for i in range(base_i - 1, -1, -1):
        if keep[i] and roc[i] < best:
            best = roc[i]
        else:
            keep[i] = False
    truncated = int(keep.sum()) < n_points
    if truncated:
        notes.append(
            f"grid truncated to {int(keep.sum())} of {n_points} points; "
            f"AUROC range [{roc[keep].min():.6g}, {roc[keep].max():.6g}]"
        )
    grid = ShiftGrid(
        base=data, strategy=strategy, increments=incs[keep], auroc=roc[keep],
        auprc=prc[keep], step_up=step_up, step_down=step_down,
        requested_points=n_points, truncated=truncated, notes=notes,
    )
    return SignalCurve(roc[keep], prc[keep]), grid


def _collapsed(curve: SignalCurve) -> tuple[NDArray, NDArray]:
    """Companion values with plateaus merged to their midpoint quality."""
    comp, start, counts = np.unique(curve.companion, return_index=True, return_counts=True)
    end = start + counts - 1
    qual = 0.5 * (curve.quality[start] + curve.quality[end])
    return comp, qual


def map_to_quality(curve: SignalCurve, companion_value: float) -> float:
    """Inverse of the signal curve: quality at which the companion metric equals a value."""
    lo, hi = curve.companion_range
    if not lo <= companion_value <= hi:
        raise ExtrapolationError(
            f"{curve.metric_ids[1]} value {companion_value!r} outside signal "
            f"curve range [{lo!r}, {hi!r}]"
        )
    comp, qual = _collapsed(curve)
    if comp.size == 1:
        return float(qual[0])
    return float(np.interp(companion_value, comp, qual))
