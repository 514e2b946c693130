"""Two-Gaussian (binormal) score model.

Negative-class scores follow N(mu_neg, sigma_neg^2) and positive-class scores
N(mu_pos, sigma_pos^2). The standardized form used for sweeps fixes the
negatives at N(0, 1) and the positives at N(delta, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import log_ndtr, ndtr, ndtri

SQRT2 = math.sqrt(2.0)

#: Default AUROC spacing of the binormal quality grid.
FULL_GRID_STEP = 0.00005
FULL_GRID_MAX = 0.99995


@dataclass(frozen=True)
class BinormalModel:
    mu_neg: float = 0.0
    sigma_neg: float = 1.0
    mu_pos: float = 0.0
    sigma_pos: float = 1.0

    def __post_init__(self):
        if not (self.sigma_neg > 0 and self.sigma_pos > 0):
            raise ValueError("standard deviations must be positive")
        for v in (self.mu_neg, self.mu_pos, self.sigma_neg, self.sigma_pos):
            if not math.isfinite(v):
                raise ValueError("model parameters must be finite")

    @classmethod
    def standardized(cls, delta: float) -> "BinormalModel":
        return cls(0.0, 1.0, float(delta), 1.0)

    @classmethod
    def for_auroc(cls, auroc: float) -> "BinormalModel":
        return cls.standardized(shift_for_auroc(auroc))


@dataclass(frozen=True)
class PopulationSpec:
    """A binormal model plus outcome prevalence and sample size."""

    model: BinormalModel
    prevalence: float
    sample_size: int

    def __post_init__(self):
        if not 0.0 < self.prevalence < 1.0:
            raise ValueError(f"prevalence must lie in (0, 1), got {self.prevalence}")
        if int(self.sample_size) != self.sample_size or self.sample_size < 2:
            raise ValueError("sample_size must be an integer >= 2")
        n_pos = self.n_pos
        if n_pos < 1 or self.sample_size - n_pos < 1:
            raise ValueError(
                f"prevalence {self.prevalence} with N={self.sample_size} "
                "leaves a class empty"
            )

    @property
    def n_pos(self) -> int:
        return int(round(self.prevalence * self.sample_size))

    @property
    def n_neg(self) -> int:
        return int(self.sample_size) - self.n_pos


def shift_for_auroc(target_auroc: float) -> float:
    """Mean shift delta such that N(0,1) vs N(delta,1) has the given AUROC."""
    if not 0.5 <= target_auroc < 1.0:
        raise ValueError(f"target AUROC must lie in [0.5, 1), got {target_auroc}")
    return float(SQRT2 * ndtri(target_auroc))


def analytic_auroc(model: BinormalModel) -> float:
    sep = (model.mu_pos - model.mu_neg) / math.hypot(model.sigma_pos, model.sigma_neg)
    return float(ndtr(sep))


@lru_cache(maxsize=8)
def _gauss_legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def binormal_auprc(spec: PopulationSpec | None = None, *, model: BinormalModel | None = None,
                   prevalence: float | None = None, panels: int = 96, order: int = 10,
                   half_width: float = 10.0) -> float:
    """Population AUPRC of a binormal model, integral of PPV over recall.

    The recall integral is rewritten over the decision threshold t (recall =
    1 - Phi_pos(t), so d recall = pdf_pos(t) dt) and evaluated with a composite
    Gauss-Legendre rule on ``mu_pos +/- half_width * sigma_pos``. ``panels``
    sets the step; halving it changes the result by far less than 1e-7.
    """
    if spec is not None:
        model, prevalence = spec.model, spec.prevalence
    if model is None or prevalence is None:
        raise TypeError("give a PopulationSpec or both model= and prevalence=")
    if not 0.0 < prevalence < 1.0:
        raise ValueError(f"prevalence must lie in (0, 1), got {prevalence}")
    return float(_auprc_many(np.array([model.mu_pos]), model.mu_neg, model.sigma_neg,
                             model.sigma_pos, prevalence, panels, order, half_width)[0])


def _auprc_many(mu_pos: NDArray, mu_neg: float, sigma_neg: float, sigma_pos: float,
                prevalence: float, panels: int, order: int, half_width: float,
                chunk: int = 512) -> NDArray:
    nodes, weights = _gauss_legendre(order)
    edges = np.linspace(-half_width, half_width, panels + 1)
    h = np.diff(edges)
    # standardized positions within the positive-class distribution
    z = ((edges[:-1] + edges[1:]) / 2)[:, None] + (h / 2)[:, None] * nodes[None, :]
    w = (h / 2)[:, None] * weights[None, :]
    z, w = z.ravel(), w.ravel()
    wd = w * np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    log_tpr = log_ndtr(-z)
    log_odds0 = math.log((1.0 - prevalence) / prevalence)
    mu_pos = np.asarray(mu_pos, dtype=np.float64)
    out = np.empty(mu_pos.size)
    for lo in range(0, mu_pos.size, chunk):
        mu = mu_pos[lo:lo + chunk, None]
        t = mu + sigma_pos * z[None, :]
        log_fpr = log_ndtr((mu_neg - t) / sigma_neg)
        ppv = 1.0 / (1.0 + np.exp(log_odds0 + log_fpr - log_tpr[None, :]))
        out[lo:lo + chunk] = ppv @ wd
    return out


def ppv_at_recall(recall: ArrayLike, model: BinormalModel, prevalence: float) -> NDArray:
    """Precision as a function of recall for a binormal model."""
    r = np.asarray(recall, dtype=np.float64)
    t = model.mu_pos + model.sigma_pos * ndtri(1.0 - r)
    fpr = ndtr((model.mu_neg - t) / model.sigma_neg)
    return prevalence * r / (prevalence * r + (1.0 - prevalence) * fpr)


def hanley_mcneil_se(auroc: float, n_pos: int, n_neg: int) -> float:
    """Approximate standard error of an AUROC estimate (Hanley & McNeil, 1982)."""
    if not 0.5 <= auroc < 1.0:
        raise ValueError(f"AUROC must lie in [0.5, 1), got {auroc}")
    if int(n_pos) != n_pos or int(n_neg) != n_neg or n_pos < 1 or n_neg < 1:
        raise ValueError("class counts must be positive integers")
    a = auroc
    q1 = a / (2.0 - a)
    q2 = 2.0 * a * a / (1.0 + a)
    var = (a * (1 - a) + (n_pos - 1) * (q1 - a * a) + (n_neg - 1) * (q2 - a * a)) / (n_pos * n_neg)
    return math.sqrt(var)


def normal_ci(auroc: float, se: float, z: float = 1.96) -> tuple[float, float]:
    return auroc - z * se, auroc + z * se


def auroc_grid(step: float = FULL_GRID_STEP, start: float = 0.5,
               stop: float = FULL_GRID_MAX) -> NDArray[np.float64]:
    """Evenly spaced AUROC values from ``start`` up to ``stop`` (inclusive when on-grid)."""
    if not 0 < step < 0.5:
        raise ValueError("grid step must lie in (0, 0.5)")
    if not 0.5 <= start < stop < 1.0:
        raise ValueError("grid must satisfy 0.5 <= start < stop < 1")
    n = int(math.floor((stop - start) / step + 1e-9))
    grid = start + step * np.arange(n + 1)
    return grid[grid < 1.0]


def binormal_signal_curve(prevalence: float, step: float = FULL_GRID_STEP,
                          stop: float = FULL_GRID_MAX, *, grid: ArrayLike | None = None):
    """AUROC -> AUPRC signal curve for N(0,1) negatives and N(delta,1) positives."""
    from .signal import SignalCurve

    if not 0.0 < prevalence < 1.0:
        raise ValueError(f"prevalence must lie in (0, 1), got {prevalence}")
    q = auroc_grid(step, stop=stop) if grid is None else np.asarray(grid, dtype=np.float64)
    deltas = SQRT2 * ndtri(q)
    if not np.all((q >= 0.5) & (q < 1.0)):
        raise ValueError("grid AUROC values must lie in [0.5, 1)")
    comp = _auprc_many(deltas, 0.0, 1.0, 1.0, prevalence, 96, 10, 10.0)
    return SignalCurve(q, comp)
