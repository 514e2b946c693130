"""Monte Carlo sampling distributions of evaluation metrics.

Every replicate draws a fixed number of positives and negatives (stratified
sampling), so prevalence is held constant. Random streams are keyed by
``(master_seed, replicate_index, class)`` through a counter-based Philox
generator, which makes each replicate reproducible on its own and the whole
run independent of how replicates are split across workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import ndtri
from scipy.stats import skew

from .binormal import PopulationSpec
from .scores import DegenerateDataError, LabeledScores, MetricId, metric_values

_POS, _NEG = 1, 0
_U52 = float(2**52)


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """How to draw replicate samples from a binormal or empirical population."""

    population: PopulationSpec | LabeledScores
    replicates: int = 10_000
    master_seed: int = 0
    sample_size: int | None = None
    alpha: float = 0.05

    def __post_init__(self):
        if int(self.replicates) != self.replicates or self.replicates < 2:
            raise ValueError("replicates must be an integer >= 2")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.sample_size is not None and (
            int(self.sample_size) != self.sample_size or self.sample_size < 2
        ):
            raise ValueError("sample_size must be an integer >= 2")
        if self.n_pos < 1 or self.n_neg < 1:
            raise ValueError(
                f"sample of {self.size} with {self.n_pos} positives leaves a class empty"
            )

    @property
    def empirical(self) -> bool:
        return isinstance(self.population, LabeledScores)

    @property
    def size(self) -> int:
        if self.sample_size is not None:
            return int(self.sample_size)
        if self.empirical:
            return len(self.population)
        return int(self.population.sample_size)

    @property
    def n_pos(self) -> int:
        pop = self.population
        if self.empirical:
            return int(round(pop.n_pos * self.size / len(pop)))
        return int(round(pop.prevalence * self.size))

    @property
    def n_neg(self) -> int:
        return self.size - self.n_pos


@dataclass(frozen=True, eq=False)
class NoiseEstimate:
    metric_id: MetricId
    replicate_values: NDArray[np.float64]
    ci_low: float
    ci_high: float
    std_error: float
    alpha: float = 0.05

    @classmethod
    def from_values(cls, metric_id, values: ArrayLike, alpha: float = 0.05) -> "NoiseEstimate":
        v = np.asarray(values, dtype=np.float64)
        if v.size < 2:
            raise ValueError("need at least two replicate values")
        return cls(
            MetricId(metric_id), v,
            quantile(v, alpha / 2), quantile(v, 1 - alpha / 2),
            float(np.std(v, ddof=1)), alpha,
        )

    @property
    def width(self) -> float:
        return self.ci_high - self.ci_low

    @property
    def mean(self) -> float:
        return float(np.mean(self.replicate_values))

    @property
    def median(self) -> float:
        return float(np.median(self.replicate_values))

    @property
    def skewness(self) -> float:
        return float(skew(self.replicate_values))


def quantile(values: ArrayLike, q: float) -> float:
    """Order-statistic quantile, interpolating linearly at position (n - 1) * q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile level must lie in [0, 1], got {q}")
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cannot take a quantile of no values")
    return float(np.quantile(v, q, method="linear"))


def replicate_rng(master_seed: int, replicate_index: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(replicate_index), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


def _open_uniform(rng: np.random.Generator, n: int) -> NDArray:
    # strictly inside (0, 1) so the inverse normal CDF stays finite
    return (rng.integers(0, 2**52, size=n).astype(np.float64) + 0.5) / _U52


def draw_replicate(plan: SamplingPlan, replicate_index: int) -> LabeledScores:
    """Replicate sample ``replicate_index`` of ``plan``; a pure function of the plan's seed."""
    if replicate_index < 0:
        raise ValueError("replicate_index must be non-negative")
    n_pos, n_neg = plan.n_pos, plan.n_neg
    rng_pos = replicate_rng(plan.master_seed, replicate_index, _POS)
    rng_neg = replicate_rng(plan.master_seed, replicate_index, _NEG)
    pop = plan.population
    if plan.empirical:
        pos_pool, neg_pool = pop.positives, pop.negatives
        if pos_pool.size == 0 or neg_pool.size == 0:
            raise DegenerateDataError("empirical population is missing a class")
        pos = pos_pool[rng_pos.integers(0, pos_pool.size, size=n_pos)]
        neg = neg_pool[rng_neg.integers(0, neg_pool.size, size=n_neg)]
    else:
        m = pop.model
        pos = m.mu_pos + m.sigma_pos * ndtri(_open_uniform(rng_pos, n_pos))
        neg = m.mu_neg + m.sigma_neg * ndtri(_open_uniform(rng_neg, n_neg))
    return LabeledScores.from_classes(pos, neg)


def _replicate_block(plan: SamplingPlan, metrics: tuple, start: int, stop: int) -> NDArray:
    out = np.empty((stop - start, len(metrics)))
    for row, i in enumerate(range(start, stop)):
        out[row] = metric_values(draw_replicate(plan, i), metrics)
    return out


def simulate_metrics(plan: SamplingPlan, metrics: Sequence, workers: int = 1) -> NDArray:
    """Replicate-by-metric matrix of metric values, ordered by replicate index."""
    ids = tuple(MetricId(m) for m in metrics)
    if not ids:
        raise ValueError("no metrics requested")
    n = int(plan.replicates)
    if workers <= 1:
        return _replicate_block(plan, ids, 0, n)
    bounds = np.linspace(0, n, min(n, 4 * workers) + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        blocks = pool.map(
            _replicate_block, [plan] * (bounds.size - 1), [ids] * (bounds.size - 1),
            bounds[:-1].tolist(), bounds[1:].tolist(),
        )
        return np.vstack(list(blocks))


def estimate_noise(plan: SamplingPlan, metrics: Sequence = (MetricId.AUROC, MetricId.AUPRC),
                   workers: int = 1) -> list[NoiseEstimate]:
    """Percentile confidence interval and standard error for each metric."""
    values = simulate_metrics(plan, metrics, workers)
    return [
        NoiseEstimate.from_values(m, values[:, j], plan.alpha)
        for j, m in enumerate(MetricId(m) for m in metrics)
    ]
