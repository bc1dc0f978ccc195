"""Validation and performance harness: convergence, timing, robustness.

Everything here is seed-deterministic except the wall-clock numbers.
Reports render as plain text and CSV.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .engine import (
    EstimatorSpec,
    classify_field,
    closed_form_triple,
    mc_all_patterns,
)
from .fields import CHANNELS, EnsembleStack, ModelSpec, ProbabilityField, UncertainField
from .synth import random_case


def _check_comparable(a: ProbabilityField, b: ProbabilityField) -> None:
    if a.shape != b.shape:
        raise ValueError("probability fields differ in shape")
    if not np.array_equal(a.valid, b.valid):
        raise ValueError("probability fields differ in validity masks")


def rmse(a: ProbabilityField, b: ProbabilityField, channel: str) -> float:
    """Root mean squared channel difference over the valid pixels."""
    _check_comparable(a, b)
    if not a.valid.any():
        raise ValueError("no valid pixels to compare")
    d = a.channel(channel)[a.valid] - b.channel(channel)[a.valid]
    return float(np.sqrt(np.mean(d * d)))


def max_abs_error(a: ProbabilityField, b: ProbabilityField, channel: str) -> float:
    _check_comparable(a, b)
    if not a.valid.any():
        raise ValueError("no valid pixels to compare")
    d = a.channel(channel)[a.valid] - b.channel(channel)[a.valid]
    return float(np.max(np.abs(d)))


@dataclass
class ConvergenceReport:
    """Monte Carlo error against the closed form as samples grow."""

    pattern: str
    sample_counts: list
    rmse_per_count: list
    max_err_per_count: list
    wall_times: list
    reference_time: float

    def to_text(self) -> str:
        lines = [
            f"convergence ({self.pattern} channel), closed-form reference "
            f"in {self.reference_time:.3f}s"
        ]
        for n, r, m, t in zip(
            self.sample_counts, self.rmse_per_count, self.max_err_per_count, self.wall_times
        ):
            lines.append(f"  n={n:<7d} rmse={r:.6f} max={m:.6f} time={t:.3f}s")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["samples,rmse,max_abs_error,wall_time"]
        for n, r, m, t in zip(
            self.sample_counts, self.rmse_per_count, self.max_err_per_count, self.wall_times
        ):
            lines.append(f"{n},{r:.17g},{m:.17g},{t:.17g}")
        return "\n".join(lines) + "\n"


def convergence_study(
    field: UncertainField,
    pattern: str,
    counts,
    seed: int = 0,
    workers: int = 1,
) -> ConvergenceReport:
    """RMSE and max error of MC classification vs the closed form."""
    counts = list(counts)
    if not counts:
        raise ValueError("counts must be nonempty")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError("counts must be strictly ascending")
    start = time.perf_counter()
    reference = classify_field(field, EstimatorSpec("closed_form"), workers=workers)
    reference_time = time.perf_counter() - start
    rmses, maxes, times = [], [], []
    for n in counts:
        spec = EstimatorSpec("monte_carlo", n_samples=n, seed=seed)
        start = time.perf_counter()
        estimate = classify_field(field, spec, workers=workers)
        times.append(time.perf_counter() - start)
        rmses.append(rmse(reference, estimate, pattern))
        maxes.append(max_abs_error(reference, estimate, pattern))
    return ConvergenceReport(pattern, counts, rmses, maxes, times, reference_time)


def _estimator_label(spec: EstimatorSpec) -> str:
    if spec.method == "monte_carlo":
        return f"monte_carlo(n={spec.n_samples})"
    if spec.method == "semianalytical":
        return f"semianalytical(c={spec.c})"
    return spec.method


@dataclass
class TimingRow:
    label: str
    seconds: float
    speedup: float


@dataclass
class TimingReport:
    rows: list
    baseline: str
    channels: tuple

    def to_text(self) -> str:
        lines = [f"timings (median of repeats, channels={','.join(self.channels)}; "
                 f"speedup vs {self.baseline})"]
        for row in self.rows:
            lines.append(f"  {row.label:<24s} {row.seconds:9.3f}s  {row.speedup:8.2f}x")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["estimator,seconds,speedup"]
        for row in self.rows:
            lines.append(f"{row.label},{row.seconds:.17g},{row.speedup:.17g}")
        return "\n".join(lines) + "\n"


def timing_report(
    field: UncertainField,
    estimators,
    workers: int = 1,
    repeats: int = 5,
    channels=CHANNELS,
) -> TimingReport:
    """Median wall time per estimator; speedups vs the first MC entry."""
    estimators = list(estimators)
    if not estimators:
        raise ValueError("estimators must be nonempty")
    if repeats < 1:
        raise ValueError("repeats must be positive")
    medians = []
    for spec in estimators:
        samples = []
        for _ in range(repeats):
            start = time.perf_counter()
            classify_field(field, spec, workers=workers, channels=channels)
            samples.append(time.perf_counter() - start)
        medians.append(statistics.median(samples))
    baseline_idx = next(
        (i for i, s in enumerate(estimators) if s.method == "monte_carlo"), 0
    )
    baseline = medians[baseline_idx]
    rows = [
        TimingRow(_estimator_label(spec), sec, baseline / sec if sec > 0 else math.inf)
        for spec, sec in zip(estimators, medians)
    ]
    return TimingReport(rows, _estimator_label(estimators[baseline_idx]), tuple(channels))


def _window_mean(prob: ProbabilityField, peaks) -> float:
    values = []
    for r, c in peaks:
        window_valid = prob.valid[r - 1 : r + 2, c - 1 : c + 2]
        if window_valid.shape != (3, 3) or not window_valid.all() or r < 1 or c < 1:
            raise ValueError(f"peak {(r, c)} window touches the field boundary")
        values.append(prob.p_max[r - 1 : r + 2, c - 1 : c + 2])
    return float(np.mean(values))


def robustness_ratio(
    stack: EnsembleStack,
    model: ModelSpec,
    true_peaks,
    outlier_peaks,
    estimator: EstimatorSpec | None = None,
    workers: int = 1,
) -> float:
    """Mean local-maximum probability near true peaks over that near outliers.

    Windows are 3x3 because the probability mass spreads to the modal
    pixel's neighbors.  A zero outlier response with a positive true
    response returns infinity.
    """
    true_peaks = list(true_peaks)
    outlier_peaks = list(outlier_peaks)
    if not true_peaks or not outlier_peaks:
        raise ValueError("peak lists must be nonempty")
    if estimator is None:
        method = "monte_carlo" if model.kind == "gaussian" else "closed_form"
        estimator = EstimatorSpec(method)
    field = UncertainField.from_ensemble(stack, model)
    prob = classify_field(field, estimator, workers=workers, channels=("max",))
    numerator = _window_mean(prob, true_peaks)
    denominator = _window_mean(prob, outlier_peaks)
    if denominator == 0.0:
        return math.inf if numerator > 0.0 else math.nan
    return numerator / denominator


@dataclass
class ValidationSummary:
    """Fuzz comparison of the closed form against the MC oracle."""

    model: str
    cases: int
    samples: int
    max_abs_dev: float
    max_se_dev: float
    within_4se: float

    def to_text(self) -> str:
        return (
            f"validate model={self.model}: {self.cases} cases, "
            f"mc n={self.samples}; max |closed-mc| = {self.max_abs_dev:.6f} "
            f"({self.max_se_dev:.2f} standard errors), "
            f"{100.0 * self.within_4se:.1f}% of checks within 4 SE"
        )


def validate_random_cases(
    cases: int,
    model: str = "uniform",
    neighborhood: int = 4,
    samples: int = 100_000,
    seed: int = 0,
    bins: int = 5,
) -> ValidationSummary:
    """Closed form vs shared-draw MC over seeded random cases.

    The standard error uses the closed-form probability (binomial,
    known p), so a zero probability demands an exactly-zero MC count.
    """
    if cases < 1:
        raise ValueError("cases must be positive")
    max_abs = 0.0
    max_se = 0.0
    hits = 0
    checks = 0
    for i in range(cases):
        case = random_case(seed + i, model=model, neighborhood=neighborhood, bins=bins)
        exact = closed_form_triple(case)
        estimate = mc_all_patterns(case, samples, seed=seed, pixel=i)
        for p, q in zip(exact, estimate):
            se = math.sqrt(max(p * (1.0 - p), 0.0) / samples)
            dev = abs(p - q)
            dev_se = dev / se if se > 0.0 else (0.0 if dev == 0.0 else math.inf)
            max_abs = max(max_abs, dev)
            max_se = max(max_se, dev_se)
            checks += 1
            if dev_se <= 4.0:
                hits += 1
    return ValidationSummary(model, cases, samples, max_abs, max_se, hits / checks)
