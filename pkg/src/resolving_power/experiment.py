"""Study orchestration: binormal prevalence x quality sweeps and empirical studies."""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .binormal import BinormalModel, PopulationSpec, binormal_signal_curve
from .noise import NoiseEstimate, SamplingPlan, estimate_noise
from .resolve import ResolutionReport, resolution
from .scores import LabeledScores, MetricId
from .signal import ImprovementStrategy, ShiftGrid, SignalCurve, empirical_signal_curve

DEFAULT_PREVALENCES = (0.01, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50)
DEFAULT_QUALITY = (0.65, 0.75, 0.85, 0.95)
QUALITY_LABELS = {0.65: "Poor", 0.75: "Fair", 0.85: "Good", 0.95: "Excellent"}
METRICS = (MetricId.AUROC, MetricId.AUPRC)


class StudyKind(str, enum.Enum):
    BINORMAL_SWEEP = "binormal_sweep"
    EMPIRICAL_STUDY = "empirical_study"


class Averaging(str, enum.Enum):
    DELTA = "delta"  # mean of per-run deltas
    BOUNDS = "bounds"  # delta of the run-averaged confidence bounds


@dataclass(frozen=True)
class StudySpec:
    kind: StudyKind = StudyKind.BINORMAL_SWEEP
    prevalences: tuple[float, ...] = DEFAULT_PREVALENCES
    quality_points: tuple[float, ...] = DEFAULT_QUALITY
    sample_size: int | None = 10_000
    replicates: int = 2000
    repeats: int = 1
    grid_step: float = 0.0005
    master_seed: int = 0
    alpha: float = 0.05
    averaging: Averaging = Averaging.DELTA
    # empirical studies
    grid_points: int = 1000
    target_step: float = 0.001
    strategy: ImprovementStrategy = ImprovementStrategy.ADDITIVE_SHIFT

    def __post_init__(self):
        object.__setattr__(self, "kind", StudyKind(self.kind))
        object.__setattr__(self, "averaging", Averaging(self.averaging))
        object.__setattr__(self, "strategy", ImprovementStrategy(self.strategy))
        object.__setattr__(self, "prevalences", tuple(float(p) for p in self.prevalences))
        object.__setattr__(self, "quality_points", tuple(float(q) for q in self.quality_points))
        if not all(0 < p < 1 for p in self.prevalences) or not self.prevalences:
            raise ValueError("prevalences must be a non-empty subset of (0, 1)")
        if not all(0.5 < q < 1 for q in self.quality_points) or not self.quality_points:
            raise ValueError("quality points must be a non-empty subset of (0.5, 1)")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.replicates < 2:
            raise ValueError("replicates must be >= 2")
        if not 0 < self.grid_step < 0.5:
            raise ValueError("grid_step must lie in (0, 0.5)")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.sample_size is not None and self.sample_size < 2:
            raise ValueError("sample_size must be >= 2")

    @classmethod
    def desk(cls, **overrides) -> "StudySpec":
        """Reduced profile that runs in minutes."""
        return cls(**{**dict(replicates=2000, repeats=1, grid_step=0.0005), **overrides})

    @classmethod
    def full(cls, **overrides) -> "StudySpec":
        """Full-scale profile: 10,000 replicates on a 0.00005 AUROC grid."""
        n = overrides.get("sample_size", 10_000)
        kind = StudyKind(overrides.get("kind", StudyKind.BINORMAL_SWEEP))
        empirical = kind is StudyKind.EMPIRICAL_STUDY
        repeats = 1 if empirical or (n is not None and n > 10_000) else 3
        base = dict(replicates=10_000, repeats=repeats, grid_step=0.00005)
        return cls(**{**base, **overrides})


@dataclass
class CellResult:
    prevalence: float
    quality: float
    runs: list[ResolutionReport]
    delta: float
    noise: list[tuple[NoiseEstimate, NoiseEstimate]] = field(repr=False, default_factory=list)

    @property
    def label(self) -> str:
        return QUALITY_LABELS.get(round(self.quality, 6), f"{self.quality:g}")

    @property
    def run_deltas(self) -> list[float]:
        return [r.delta for r in self.runs]

    def to_dict(self) -> dict:
        d = self.run_deltas
        return dict(
            prevalence=self.prevalence, quality=self.quality, label=self.label,
            delta=self.delta, delta_min=min(d), delta_max=max(d),
            runs=[r.to_dict() for r in self.runs],
        )


@dataclass
class StudyResult:
    spec: StudySpec
    cells: list[CellResult]
    curves: dict[float, SignalCurve] = field(repr=False, default_factory=dict)
    grid: ShiftGrid | None = field(repr=False, default=None)

    def cell(self, prevalence: float, quality: float) -> CellResult:
        for c in self.cells:
            if np.isclose(c.prevalence, prevalence) and np.isclose(c.quality, quality):
                return c
        raise KeyError((prevalence, quality))

    def to_dict(self) -> dict:
        spec = {k: (v.value if isinstance(v, enum.Enum) else v)
                for k, v in self.spec.__dict__.items()}
        return dict(spec=spec, cells=[c.to_dict() for c in self.cells])

    def run_rows(self) -> list[dict]:
        """One flat row per cell per run."""
        rows = []
        for c in self.cells:
            for k, r in enumerate(c.runs):
                ref, comp = r.reference, r.companion
                rows.append(dict(
                    prevalence=c.prevalence, quality=c.quality, label=c.label, run=k,
                    auroc_ci_low=ref.ci_low, auroc_ci_high=ref.ci_high,
                    auprc_ci_low=comp.ci_low, auprc_ci_high=comp.ci_high,
                    auprc_q_low=comp.q_low, auprc_q_high=comp.q_high,
                    kappa_auroc=ref.kappa, kappa_auprc=comp.kappa, delta=r.delta,
                ))
        return rows

    def cell_rows(self) -> list[dict]:
        return [dict(prevalence=c.prevalence, quality=c.quality, label=c.label,
                     delta=c.delta, delta_min=min(c.run_deltas),
                     delta_max=max(c.run_deltas), runs=len(c.runs))
                for c in self.cells]


def cell_seed(master_seed: int, prevalence_index: int, quality_index: int, run: int) -> int:
    """Independent 64-bit seed for one (cell, run) of a study."""
    ss = np.random.SeedSequence(int(master_seed),
                                spawn_key=(prevalence_index, quality_index, run))
    return int(ss.generate_state(1, np.uint64)[0])


def _average_bounds(estimates: list[NoiseEstimate]) -> NoiseEstimate:
    first = estimates[0]
    return NoiseEstimate(
        first.metric_id, np.concatenate([e.replicate_values for e in estimates]),
        float(np.mean([e.ci_low for e in estimates])),
        float(np.mean([e.ci_high for e in estimates])),
        float(np.mean([e.std_error for e in estimates])), first.alpha,
    )


def _combine(prevalence: float, quality: float, curve: SignalCurve,
             noise: list[tuple[NoiseEstimate, NoiseEstimate]],
             averaging: Averaging) -> CellResult:
    runs = [resolution(curve, ref, comp) for ref, comp in noise]
    if averaging is Averaging.BOUNDS:
        ref = _average_bounds([n[0] for n in noise])
        comp = _average_bounds([n[1] for n in noise])
        delta = resolution(curve, ref, comp).delta
    else:
        delta = float(np.mean([r.delta for r in runs]))
    return CellResult(prevalence, quality, runs, delta, noise)


def _binormal_task(prevalence: float, quality: float, sample_size: int, replicates: int,
                   seed: int, alpha: float):
    pop = PopulationSpec(BinormalModel.for_auroc(quality), prevalence, sample_size)
    plan = SamplingPlan(pop, replicates, seed, alpha=alpha)
    ref, comp = estimate_noise(plan, METRICS)
    return ref, comp


def _run_tasks(tasks: list[tuple], workers: int, fn) -> list:
    if workers <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*tasks)))


def run_binormal_sweep(spec: StudySpec, workers: int = 1,
                       cells: list[tuple[int, int]] | None = None) -> StudyResult:
    """Delta for every (prevalence, quality) cell, averaged over repeats.

    ``cells`` restricts the run to some (prevalence index, quality index)
    pairs; seeds depend only on those indices, so a cell's result does not
    depend on which other cells are run.
    """
    if spec.sample_size is None:
        raise ValueError("a binormal sweep needs sample_size")
    if cells is None:
        cells = [(i, j) for i in range(len(spec.prevalences))
                 for j in range(len(spec.quality_points))]
    curves = {}
    for i in sorted({i for i, _ in cells}):
        p = spec.prevalences[i]
        curves[p] = binormal_signal_curve(p, spec.grid_step)
    tasks = [
        (spec.prevalences[i], spec.quality_points[j], spec.sample_size, spec.replicates,
         cell_seed(spec.master_seed, i, j, run), spec.alpha)
        for i, j in cells for run in range(spec.repeats)
    ]
    noise = _run_tasks(tasks, workers, _binormal_task)
    out = []
    for c, (i, j) in enumerate(cells):
        p, q = spec.prevalences[i], spec.quality_points[j]
        chunk = noise[c * spec.repeats:(c + 1) * spec.repeats]
        try:
            out.append(_combine(p, q, curves[p], chunk, spec.averaging))
        except ValueError as exc:
            raise ValueError(f"cell (prevalence={p}, AUROC={q}): {exc}") from exc
    return StudyResult(spec, out, curves)


def _empirical_task(data: LabeledScores, sample_size: int | None, replicates: int,
                    seed: int, alpha: float):
    plan = SamplingPlan(data, replicates, seed, sample_size=sample_size, alpha=alpha)
    return tuple(estimate_noise(plan, METRICS))


def run_empirical_study(data: LabeledScores, spec: StudySpec, workers: int = 1) -> StudyResult:
    """Signal curve around the observed scores plus resampled noise at the baseline."""
    curve, grid = empirical_signal_curve(data, spec.grid_points, spec.target_step, spec.strategy)
    if len(curve) < 2:
        raise ValueError("signal curve has fewer than two points; cannot map intervals")
    tasks = [(data, spec.sample_size, spec.replicates,
              cell_seed(spec.master_seed, 0, 0, run), spec.alpha)
             for run in range(spec.repeats)]
    noise = _run_tasks(tasks, workers, _empirical_task)
    base = float(grid.auroc[np.flatnonzero(grid.increments == 0)[0]])
    cell = _combine(data.prevalence, base, curve, noise, spec.averaging)
    return StudyResult(replace(spec, kind=StudyKind.EMPIRICAL_STUDY), [cell],
                       {data.prevalence: curve}, grid)
