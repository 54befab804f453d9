"""Finite-difference cross-check of the symbolic Christoffel symbols, Riemann
and Ricci tensors.

Only the metric components are evaluated symbolically (at high precision);
everything else is recomputed numerically with central differences and
compared against the exact tensors evaluated at the same points."""

from __future__ import annotations

import warnings
from typing import Any, Mapping, Optional, Sequence

import mpmath
import numpy as np
from attrs import define, field
from jaxtyping import Shaped

from kenmo.base import PoleError, SamplePointSkippedWarning, VerdictReport
from kenmo.curvature import Connection, CurvatureBundle
from kenmo.symbolic.expr import _to_mpf
from kenmo.tensors import MetricField
from kenmo.utilities import sample_points

QUANTITIES = ("christoffel", "riemann", "ricci")


@define
class OracleSettings:
    """Numeric parameters of the finite-difference oracle"""

    points: int = field(default=5)
    """Number of sample points drawn when the manifest gives none"""
    tol: float = field(default=1e-6)
    """Largest accepted relative deviation"""
    step: float = field(default=1e-4)
    """Central-difference step"""
    box: tuple[float, float] = (1, 3)
    """Every coordinate of a drawn point lies in this interval"""
    seed: int = 421
    digits: int = field(default=50)
    """mpmath working precision"""

    @points.validator
    def _check_points(self, attribute, value):
        if value < 1:
            raise ValueError(f"points must be positive, got {value}")

    @tol.validator
    @step.validator
    def _check_positive(self, attribute, value):
        if not value > 0:
            raise ValueError(f"{attribute.name} must be positive, got {value}")

    @digits.validator
    def _check_digits(self, attribute, value):
        if value < 15:
            raise ValueError(f"digits must be at least 15, got {value}")


@define(eq=False)
class OracleResult:
    deviations: dict[str, Any]
    """Largest relative deviation per quantity (mpmath numbers)"""
    points_used: list[dict[str, Any]]
    points_skipped: int
    tol: float

    @property
    def max_deviation(self):
        return max(self.deviations.values()) if self.deviations else None

    @property
    def usable(self) -> bool:
        return bool(self.points_used)

    def as_verdict(self) -> VerdictReport:
        notes = [
            f"max relative deviation of {q}: {mpmath.nstr(self.deviations[q], 3)}"
            for q in QUANTITIES
            if q in self.deviations
        ]
        notes.append(
            f"{len(self.points_used)} point(s) used, {self.points_skipped} skipped, tolerance {self.tol:g}"
        )
        passed = self.usable and self.max_deviation <= self.tol
        return VerdictReport("finite_difference_oracle", passed, notes=notes)

    def as_dict(self) -> dict[str, Any]:
        return {
            "deviations": {q: mpmath.nstr(v, 6) for q, v in self.deviations.items()},
            "points": [{k: str(v) for k, v in p.items()} for p in self.points_used],
            "skipped": self.points_skipped,
            "tol": self.tol,
        }


def _metric_at(metric: MetricField, coords: Sequence[str], x: Sequence, digits: int):
    point = dict(zip(coords, x))
    return metric.g.evaluate(point, approximate=True, digits=digits)


def _numeric_christoffel(
    metric: MetricField, coords: Sequence[str], x: Sequence, h, digits: int
) -> Shaped[np.ndarray, "k i j"]:
    n = len(coords)
    g = _metric_at(metric, coords, x, digits)
    dg = np.empty((n, n, n), dtype=object)
    for m in range(n):
        plus = list(x)
        minus = list(x)
        plus[m] += h
        minus[m] -= h
        dg[:, :, m] = (
            _metric_at(metric, coords, plus, digits) - _metric_at(metric, coords, minus, digits)
        ) / (2 * h)
    g_inv = mpmath.inverse(mpmath.matrix(g.tolist()))
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = sum(
                    g_inv[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l]) for l in range(n)
                ) / 2
    return out


def numeric_curvature(
    metric: MetricField, point: Mapping[str, Any], settings: OracleSettings
) -> dict[str, Shaped[np.ndarray, "..."]]:
    """Γ, R and Ric at `point` from central differences of the metric"""
    coords = metric.chart.coordinates
    n = len(coords)
    with mpmath.workdps(settings.digits):
        h = mpmath.mpf(settings.step)
        x = [_to_mpf(point[c]) for c in coords]
        G = _numeric_christoffel(metric, coords, x, h, settings.digits)
        dG = np.empty((n, n, n, n), dtype=object)
        for m in range(n):
            plus = list(x)
            minus = list(x)
            plus[m] += h
            minus[m] -= h
            dG[..., m] = (
                _numeric_christoffel(metric, coords, plus, h, settings.digits)
                - _numeric_christoffel(metric, coords, minus, h, settings.digits)
            ) / (2 * h)
        R = np.empty((n, n, n, n), dtype=object)
        for l, i, j, k in np.ndindex(n, n, n, n):
            R[l, i, j, k] = dG[l, j, k, i] - dG[l, i, k, j] + sum(
                G[l, i, m] * G[m, j, k] - G[l, j, m] * G[m, i, k] for m in range(n)
            )
        ricci = np.empty((n, n), dtype=object)
        for j, k in np.ndindex(n, n):
            ricci[j, k] = sum(R[i, i, j, k] for i in range(n))
    return {"christoffel": G, "riemann": R, "ricci": ricci}


def _deviation(symbolic: np.ndarray, numeric: np.ndarray):
    worst = mpmath.mpf(0)
    for s, v in zip(symbolic.flat, numeric.flat):
        worst = max(worst, abs(s - v) / max(abs(s), 1))
    return worst


def run_oracle(
    conn: Connection,
    bundle: CurvatureBundle,
    settings: Optional[OracleSettings] = None,
    points: Optional[Sequence[Mapping[str, Any]]] = None,
) -> OracleResult:
    """Compare the exact tensors with the finite-difference oracle.

    Points where the metric or a compared tensor has a pole are skipped with
    a :class:`~kenmo.base.SamplePointSkippedWarning`. Without explicit
    `points`, ``settings.points`` points are drawn from ``settings.box``
    with a generator seeded from ``settings.seed``.
    """
    settings = OracleSettings() if settings is None else settings
    metric = conn.metric
    chart = metric.chart
    if not points:
        points = sample_points(
            chart.coordinates, settings.points, settings.box, np.random.default_rng(settings.seed)
        )
    symbolic = {
        "christoffel": conn.as_tensor(),
        "riemann": bundle.riemann,
        "ricci": bundle.ricci,
    }
    deviations = {}
    used = []
    skipped = 0
    for point in points:
        try:
            exact = {
                q: T.evaluate(point, approximate=True, digits=settings.digits)
                for q, T in symbolic.items()
            }
            numeric = numeric_curvature(metric, point, settings)
        except (PoleError, ZeroDivisionError) as err:
            warnings.warn(f"skipping sample point {dict(point)}: {err}", SamplePointSkippedWarning)
            skipped += 1
            continue
        used.append(dict(point))
        with mpmath.workdps(settings.digits):
            for q in QUANTITIES:
                deviations[q] = max(deviations.get(q, mpmath.mpf(0)), _deviation(exact[q], numeric[q]))
    return OracleResult(deviations, used, skipped, settings.tol)
