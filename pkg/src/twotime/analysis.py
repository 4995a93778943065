"""Photon-statistics interpretation of correlation series.

Classifies Poissonian / super- / sub-Poissonian character from g2 values and
detects bunching or antibunching from the shape of g2(tau) relative to
g2(0), on a discrete grid with an explicit tolerance band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlators import CorrelationSeries

POISSONIAN = "poissonian"
SUPER_POISSONIAN = "super_poissonian"
SUB_POISSONIAN = "sub_poissonian"
BUNCHED = "bunched"
ANTIBUNCHED = "antibunched"
NEITHER = "neither"

MIN_PREFIX_POINTS = 2  # grid points needed before declaring a bunching class


@dataclass
class StatisticsReport:
    classification_zero: str
    classification_per_tau: list
    bunching: str
    conclusive: bool
    critical_time: float | None
    g2_zero: float
    tolerance_band: float


def _poisson_class(value: float, band: float) -> str:
    if value > 1.0 + band:
        return SUPER_POISSONIAN
    if value < 1.0 - band:
        return SUB_POISSONIAN
    return POISSONIAN


def _strict_prefix(diffs: np.ndarray) -> int:
    """Length of the maximal prefix of True values."""
    n = 0
    for d in diffs:
        if not d:
            break
        n += 1
    return n


def classify(series: CorrelationSeries, band: float | None = None) -> StatisticsReport:
    """Photon-statistics report for a g2 series.

    band defaults to 1e-6 for deterministic series and three standard errors
    for Monte Carlo ones.  Bunched means g2 drops below g2(0) beyond the band
    on an initial grid prefix of at least two points (excess same-time
    correlation); antibunched the reverse.  A series pinned at a
    sub-Poissonian g2(0) that never dips below it (the single-quantum case,
    where g2 stays at zero) also counts as antibunched.  When every
    difference sits inside the band the bunching verdict is flagged
    inconclusive rather than failed.
    """
    if len(series.tau_grid) == 0:
        raise ValueError("empty correlation series")
    if band is None:
        worst = float(np.max(series.error_estimate))
        band = 1e-6 if worst == 0 else 3.0 * worst
    if band <= 0:
        raise ValueError("band must be > 0")

    g2 = np.asarray(series.g2, dtype=float)
    g2_zero = float(g2[0])
    per_tau = [_poisson_class(v, band) for v in g2]

    rest = g2[1:]
    taus = series.tau_grid[1:]
    bunching = NEITHER
    conclusive = True
    critical_time = None

    k_bunched = _strict_prefix(rest < g2_zero - band)
    k_anti = _strict_prefix(rest > g2_zero + band)
    if k_bunched >= MIN_PREFIX_POINTS:
        bunching = BUNCHED
        critical_time = float(taus[k_bunched - 1])
    elif k_anti >= MIN_PREFIX_POINTS:
        bunching = ANTIBUNCHED
        critical_time = float(taus[k_anti - 1])
    elif g2_zero < 1.0 - band and len(rest) >= MIN_PREFIX_POINTS:
        k_flat = _strict_prefix(rest >= g2_zero - band)
        if k_flat >= MIN_PREFIX_POINTS:
            bunching = ANTIBUNCHED
            critical_time = float(taus[k_flat - 1])
        else:
            conclusive = False
    else:
        conclusive = bool(np.any(np.abs(rest - g2_zero) > band))

    return StatisticsReport(
        classification_zero=per_tau[0],
        classification_per_tau=per_tau,
        bunching=bunching,
        conclusive=conclusive,
        critical_time=critical_time,
        g2_zero=g2_zero,
        tolerance_band=float(band),
    )
