"""Metric resolution (kappa), resolving power and their comparison.

A metric's resolution is the width of its confidence interval after mapping
onto the reference quality scale through a signal curve; resolving power is
the reciprocal. The linear variant replaces the mapped interval with a local
tangent line and standard errors, so the confidence level cancels out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import NoiseEstimate
from .scores import MetricId
from .signal import ExtrapolationError, SignalCurve, map_to_quality


@dataclass(frozen=True)
class MetricResolution:
    metric_id: MetricId
    ci_low: float
    ci_high: float
    q_low: float
    q_high: float

    @property
    def kappa(self) -> float:
        return self.q_high - self.q_low

    @property
    def resolving_power(self) -> float:
        return 1.0 / self.kappa


@dataclass(frozen=True)
class ResolutionReport:
    reference: MetricResolution
    companion: MetricResolution

    @property
    def delta(self) -> float:
        return relative_delta(self.reference.kappa, self.companion.kappa)

    def rows(self) -> list[dict]:
        """Rows shaped like a results table: raw metrics, then the mapped companion."""
        ref, comp = self.reference, self.companion
        return [
            dict(metric=str(ref.metric_id), lower_ci=ref.ci_low, upper_ci=ref.ci_high,
                 kappa=ref.kappa, resolving_power=ref.resolving_power),
            dict(metric=str(comp.metric_id), lower_ci=comp.ci_low, upper_ci=comp.ci_high,
                 kappa=None, resolving_power=None),
            dict(metric=f"{comp.metric_id} to {ref.metric_id}", lower_ci=comp.q_low,
                 upper_ci=comp.q_high, kappa=comp.kappa,
                 resolving_power=comp.resolving_power),
        ]

    def to_dict(self) -> dict:
        out = {}
        for r in (self.reference, self.companion):
            out[str(r.metric_id)] = dict(
                ci_low=r.ci_low, ci_high=r.ci_high, q_low=r.q_low, q_high=r.q_high,
                kappa=r.kappa, resolving_power=r.resolving_power,
            )
        out["reference"] = str(self.reference.metric_id)
        out["delta"] = self.delta
        return out


@dataclass(frozen=True)
class LinearApprox:
    """Tangent-line comparison of two metrics at one point of a signal curve."""

    eval_point: tuple[float, float]  # (companion value, quality value)
    slope: float  # d quality / d companion
    intercept: float
    sigma_ref: float
    sigma_companion: float
    skew_ref: float = float("nan")
    skew_companion: float = float("nan")

    @property
    def kappa_ratio(self) -> float:
        return self.slope * self.sigma_companion / self.sigma_ref

    @property
    def reference_favored(self) -> bool:
        # slope > sigma_ref / sigma_companion
        return self.slope * self.sigma_companion > self.sigma_ref


def relative_delta(kappa_ref: float, kappa_comp: float) -> float:
    """Relative difference in resolution against the reference metric."""
    if not (kappa_ref > 0 and kappa_comp > 0):
        raise ValueError(f"resolutions must be positive, got {kappa_ref}, {kappa_comp}")
    return (kappa_comp - kappa_ref) / kappa_ref


def resolution(curve: SignalCurve, ref_noise: NoiseEstimate,
               comp_noise: NoiseEstimate) -> ResolutionReport:
    """Map both confidence intervals onto the quality scale and compare widths.

    The reference metric is the curve's quality axis, so its interval maps to
    itself.
    """
    ref_id, comp_id = curve.metric_ids
    if ref_noise.metric_id != ref_id or comp_noise.metric_id != comp_id:
        raise ValueError(
            f"noise estimates ({ref_noise.metric_id}, {comp_noise.metric_id}) do not "
            f"match curve axes ({ref_id}, {comp_id})"
        )
    mapped = []
    for name, bound in (("lower", comp_noise.ci_low), ("upper", comp_noise.ci_high)):
        try:
            mapped.append(map_to_quality(curve, bound))
        except ExtrapolationError as exc:
            raise ExtrapolationError(f"{name} CI bound: {exc}") from None
    ref = MetricResolution(ref_id, ref_noise.ci_low, ref_noise.ci_high,
                           ref_noise.ci_low, ref_noise.ci_high)
    comp = MetricResolution(comp_id, comp_noise.ci_low, comp_noise.ci_high, *mapped)
    if not (ref.kappa > 0 and comp.kappa > 0):
        raise ValueError("confidence intervals have zero width on the quality scale")
    return ResolutionReport(ref, comp)


def linear_resolution(curve_sample: SignalCurve, ref_noise: NoiseEstimate,
                      comp_noise: NoiseEstimate, at_quality: float | None = None,
                      half_width: int = 5) -> LinearApprox:
    """Least-squares tangent of quality on companion near an evaluation point.

    ``curve_sample`` may be a full curve (then the ``half_width`` grid points
    either side of ``at_quality`` are used) or an already-local set of points.
    """
    pts = curve_sample
    if at_quality is not None and len(pts) > 2 * half_width + 1:
        pts = pts.window(at_quality, half_width)
    s, r = pts.companion, pts.quality
    if len(pts) < 2 or np.ptp(s) == 0:
        raise ValueError("need at least two points with distinct companion values")
    slope, intercept = np.polyfit(s, r, 1)
    if at_quality is None:
        at_quality = float(np.median(r))
    eval_s = (at_quality - intercept) / slope
    if not (ref_noise.std_error > 0 and comp_noise.std_error > 0):
        raise ValueError("standard errors must be positive")
    return LinearApprox(
        eval_point=(float(eval_s), float(at_quality)),
        slope=float(slope), intercept=float(intercept),
        sigma_ref=ref_noise.std_error, sigma_companion=comp_noise.std_error,
        skew_ref=ref_noise.skewness, skew_companion=comp_noise.skewness,
    )


def format_sig(x: float | None, digits: int = 4) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    return f"{x:.{digits}g}"
