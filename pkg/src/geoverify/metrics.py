"""Skill scores over gridded fields.

The two headline scores are the latitude-weighted RMSE and the anomaly
correlation coefficient (ACC).  Per evaluated (init time, lead) pair the
RMSE is

    sqrt( (1/(H*W)) * sum_ij  a_i * (forecast_ij - reference_ij)^2 )

with area weights ``a_i = n_lat * cos(lat_i) / sum cos(lat)``, and the set
score is the arithmetic mean of those per-time values over all init times
(a mean of roots, deliberately not a pooled RMSE).  ACC is the weighted
cosine similarity of forecast and reference anomalies about a climatology,
likewise averaged over init times.

All reductions accumulate in 64-bit over fixed-order arrays, so results
are reproducible bit-for-bit at any thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EmptySeries,
    MissingCube,
    NonPositivePeak,
    PerfectMatch,
    ShapeMismatch,
    ZeroAnomalyVariance,
    ZeroBaseline,
)
from .grid import FieldCube, VariableId, latitude_weights, select_channel

#: Canonical metric names used in report CSVs.
METRIC_NAMES = frozenset({"rmse", "acc", "mse", "mae", "mbe", "psnr", "norm_diff"})

#: UTC hours of the 6-hourly verification cadence, matrix column order.
SYNOPTIC_HOURS = (0, 6, 12, 18)


@dataclass(frozen=True)
class EvaluationSet:
    """Init times (the evaluation set D) and forecast lead times in hours."""

    init_times: tuple[datetime, ...]
    lead_hours: tuple[int, ...]

    def __post_init__(self):
        if not self.init_times or not self.lead_hours:
            raise ValueError("evaluation set must have init times and leads")
        if any(lead <= 0 for lead in self.lead_hours):
            raise ValueError("lead times must be positive")
        object.__setattr__(self, "init_times", tuple(sorted(self.init_times)))
        object.__setattr__(self, "lead_hours", tuple(sorted(self.lead_hours)))


@dataclass(frozen=True)
class MetricRecord:
    """One report row: (variable, lead, metric) -> value over n_samples."""

    variable: VariableId
    lead_hours: int
    metric: str
    value: float
    n_samples: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.metric == "acc" and not -1.0 <= self.value <= 1.0:
            raise ValueError(f"acc {self.value} outside [-1, 1]")
        if self.metric in ("rmse", "mae", "mse") and self.value < 0.0:
            raise ValueError(f"{self.metric} {self.value} negative")


def _diff64(forecast, reference) -> np.ndarray:
    """forecast - reference as a fresh float64 array (exact for f32 inputs)."""
    f = np.asarray(forecast)
    r = np.asarray(reference)
    if f.shape != r.shape:
        raise ShapeMismatch(f"field shapes {f.shape} != {r.shape}")
    d = f.astype(np.float64)
    d -= r
    return d


def _check_weights(weights: np.ndarray, n_lat: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n_lat,):
        raise ShapeMismatch(f"weights length {w.shape} != ({n_lat},)")
    return w


def weighted_rmse(forecast, reference, weights) -> float:
    """Latitude-weighted RMSE of one field pair (the per-time inner term)."""
    d = _diff64(forecast, reference)
    if d.ndim != 2:
        raise ShapeMismatch(f"expected 2-D fields, got shape {d.shape}")
    w = _check_weights(weights, d.shape[0])
    total = float(np.dot(w, np.einsum("ij,ij->i", d, d)))
    return math.sqrt(total / d.size)


def weighted_acc(forecast, reference, clim_field, weights) -> float:
    """Anomaly correlation coefficient of one field pair about a climatology.

    Weighted cosine similarity of (forecast - clim) and (reference - clim);
    raises ZeroAnomalyVariance when either anomaly has zero weighted energy.
    The result is clamped into [-1, 1] against rounding spill.
    """
    fa = _diff64(forecast, clim_field)
    ra = _diff64(reference, clim_field)
    if fa.ndim != 2:
        raise ShapeMismatch(f"expected 2-D fields, got shape {fa.shape}")
    w = _check_weights(weights, fa.shape[0])
    num = float(np.dot(w, np.einsum("ij,ij->i", fa, ra)))
    den_f = float(np.dot(w, np.einsum("ij,ij->i", fa, fa)))
    den_r = float(np.dot(w, np.einsum("ij,ij->i", ra, ra)))
    if den_f == 0.0 or den_r == 0.0:
        raise ZeroAnomalyVariance("an anomaly field has zero weighted variance")
    return min(1.0, max(-1.0, num / math.sqrt(den_f * den_r)))


def mse(forecast, reference) -> float:
    """Unweighted mean squared error."""
    d = _diff64(forecast, reference).ravel()
    return float(np.dot(d, d)) / d.size


def mae(forecast, reference) -> float:
    """Unweighted mean absolute error."""
    d = _diff64(forecast, reference)
    return float(np.abs(d).sum()) / d.size


def mbe(forecast, reference) -> float:
    """Mean bias error of paired scalar series; negative = underestimation."""
    f = np.asarray(forecast, dtype=np.float64).ravel()
    r = np.asarray(reference, dtype=np.float64).ravel()
    if f.size == 0 or r.size == 0:
        raise EmptySeries("mbe needs at least one sample")
    if f.size != r.size:
        raise ShapeMismatch(f"series lengths {f.size} != {r.size}")
    return float((f - r).sum()) / f.size


def psnr(candidate, reference, peak: float) -> float:
    """Peak signal-to-noise ratio in dB: 10*log10(peak^2 / MSE), unweighted.

    A perfect match (MSE = 0) is signalled as PerfectMatch rather than
    returned as infinity.
    """
    if peak <= 0.0:
        raise NonPositivePeak(f"peak {peak} must be positive")
    err = mse(candidate, reference)
    if err == 0.0:
        raise PerfectMatch("candidate equals reference; PSNR infinite")
    return 10.0 * math.log10(peak * peak / err)


def dynamic_range(reference) -> float:
    """max - min of a field: the default PSNR peak convention."""
    arr = np.asarray(reference, dtype=np.float64)
    return float(arr.max() - arr.min())


def normalized_difference(model_metric: float, baseline_metric: float) -> float:
    """(model - baseline) / |baseline|.

    Negative favors the model for error metrics; positive favors it for
    PSNR.  Raises ZeroBaseline when the baseline is zero.
    """
    if baseline_metric == 0.0:
        raise ZeroBaseline("baseline metric is zero")
    return (model_metric - baseline_metric) / abs(baseline_metric)


def pointwise_rmse(forecasts: Sequence[np.ndarray], references: Sequence[np.ndarray]) -> np.ndarray:
    """Per-gridpoint RMSE over time: sqrt of the temporal mean squared error."""
    if len(forecasts) == 0 or len(forecasts) != len(references):
        raise ShapeMismatch("need equal, nonzero numbers of forecast/reference fields")
    acc = None
    for f, r in zip(forecasts, references):
        d = _diff64(f, r)
        acc = d * d if acc is None else acc + d * d
    return np.sqrt(acc / len(forecasts))


# --- evaluation-set drivers ---------------------------------------------------

CubeForecastSource = Callable[[datetime, int], FieldCube]
CubeReferenceSource = Callable[[datetime], FieldCube]


def _load_pair(
    forecasts: CubeForecastSource,
    references: CubeReferenceSource,
    t0: datetime,
    lead: int,
) -> tuple[FieldCube, FieldCube]:
    valid = t0 + timedelta(hours=lead)
    try:
        fc = forecasts(t0, lead)
        ref = references(valid)
    except (KeyError, FileNotFoundError) as e:
        raise MissingCube(t0, lead, str(e)) from None
    return fc, ref


def rmse_over_set(
    forecasts: CubeForecastSource,
    references: CubeReferenceSource,
    eval_set: EvaluationSet,
    var,
) -> list[MetricRecord]:
    """Mean over init times of the per-time weighted RMSE, one record per lead.

    This is the mean-of-roots form: each (t0, lead) pair contributes its own
    square root before averaging over the set.
    """
    records = []
    for lead in eval_set.lead_hours:
        total = 0.0
        weights = None
        for t0 in eval_set.init_times:
            fc, ref = _load_pair(forecasts, references, t0, lead)
            if weights is None:
                weights = latitude_weights(fc.spec)
            total += weighted_rmse(select_channel(fc, var), select_channel(ref, var), weights)
        n = len(eval_set.init_times)
        var_id = _resolve_var(var)
        records.append(MetricRecord(var_id, lead, "rmse", total / n, n))
    return records


def acc_over_set(
    forecasts: CubeForecastSource,
    references: CubeReferenceSource,
    clim_fields: Callable[[datetime], np.ndarray],
    eval_set: EvaluationSet,
    var,
) -> list[MetricRecord]:
    """Mean over init times of the per-time ACC, one record per lead.

    ``clim_fields(valid_time)`` must return the 2-D climatological mean for
    the evaluated variable at that valid time.
    """
    records = []
    for lead in eval_set.lead_hours:
        total = 0.0
        weights = None
        for t0 in eval_set.init_times:
            fc, ref = _load_pair(forecasts, references, t0, lead)
            if weights is None:
                weights = latitude_weights(fc.spec)
            clim = clim_fields(fc.valid_time)
            total += weighted_acc(
                select_channel(fc, var), select_channel(ref, var), clim, weights
            )
        n = len(eval_set.init_times)
        var_id = _resolve_var(var)
        records.append(MetricRecord(var_id, lead, "acc", total / n, n))
    return records


def _resolve_var(var) -> VariableId:
    if isinstance(var, VariableId):
        return var
    from .grid import parse_variable_token

    name, level = parse_variable_token(var) if isinstance(var, str) else var
    return VariableId(name, level)


# --- month x hour normalized-difference matrices --------------------------------

def month_hour_matrix(
    model_samples: Iterable[tuple[datetime, float]],
    baseline_samples: Iterable[tuple[datetime, float]],
) -> np.ndarray:
    """12 x 4 normalized differences keyed by valid month and UTC hour.

    Each populated cell aggregates first (mean of per-sample metrics for
    model and baseline separately) and then takes the normalized difference
    of the two aggregates.  Cells without samples on both sides, or with a
    zero baseline aggregate, are NaN (missing, never zero).
    """
    col = {h: k for k, h in enumerate(SYNOPTIC_HOURS)}

    def bucket(samples):
        sums = np.zeros((12, 4))
        counts = np.zeros((12, 4), dtype=int)
        for t, value in samples:
            if t.hour not in col:
                raise ValueError(f"sample hour {t.hour} not a synoptic hour {SYNOPTIC_HOURS}")
            i, j = t.month - 1, col[t.hour]
            sums[i, j] += value
            counts[i, j] += 1
        return sums, counts

    m_sum, m_n = bucket(model_samples)
    b_sum, b_n = bucket(baseline_samples)
    out = np.full((12, 4), np.nan)
    for i in range(12):
        for j in range(4):
            if m_n[i, j] == 0 or b_n[i, j] == 0:
                continue
            b_mean = b_sum[i, j] / b_n[i, j]
            m_mean = m_sum[i, j] / m_n[i, j]
            if b_mean == 0.0:
                continue
            out[i, j] = (m_mean - b_mean) / abs(b_mean)
    return out
