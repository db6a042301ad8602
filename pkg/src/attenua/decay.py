"""Decay-rate verdicts: power-law exponent fits and boundedness certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveValues
from .observables import DataNorms


@dataclass
class EnergySeries:
    """Time-ordered observable streams for one simulation run."""

    t: np.ndarray
    fields: dict[str, np.ndarray]
    scenario_id: str = ""
    norms: DataNorms | None = None

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0.0):
            raise ValueError("record times must be strictly increasing")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.fields[name]


@dataclass
class RateVerdict:
    quantity: str
    fitted_exponent: float
    fit_stderr: float
    fit_window: tuple[float, float]
    empirical_C: float
    claimed_exponent: float      # the claimed log-log slope, e.g. -2
    slack: float
    passed: bool
    status: str = "VERIFIED"     # or UNVERIFIED_PRECONDITION
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "fitted_exponent": self.fitted_exponent,
            "fit_stderr": self.fit_stderr,
            "fit_window": list(self.fit_window),
            "empirical_C": self.empirical_C,
            "claimed_exponent": self.claimed_exponent,
            "slack": self.slack,
            "pass": self.passed,
            "status": self.status,
            "detail": self.detail,
        }


def _window_slice(t: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    lo, hi = window
    sel = (t >= lo) & (t <= hi)
    return sel


def fit_power_exponent(t: np.ndarray, values: np.ndarray,
                       window: tuple[float, float]) -> tuple[float, float]:
    """Least-squares slope of log(values) against log(1 + t) over the window."""
    sel = _window_slice(t, window)
    if sel.sum() < 20:
        raise ValueError("need at least 20 samples in the fit window")
    v = values[sel]
    if np.any(v <= 0.0):
        raise NonPositiveValues("fit window contains non-positive samples")
    x = np.log1p(t[sel])
    y = np.log(v)
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    return float(slope), float(np.sqrt(cov[0, 0]))


def boundedness_certificate(t: np.ndarray, values: np.ndarray, p: float,
                            I: float, window: tuple[float, float],
                            slack: float = 0.4,
                            quantity: str = "E") -> RateVerdict:
    """No-growth certificate for (1 + t)^p * values / I over the window.

    Passes when the sup over the last quarter of the window does not exceed
    1.1x the sup over the whole window (no growth trend) and the fitted
    slope of the normalized quantity stays below the slack.
    """
    if I <= 0.0:
        raise ValueError("normalizer must be positive")
    sel = _window_slice(t, window)
    if sel.sum() < 20:
        raise ValueError("need at least 20 samples in the window")
    ts = t[sel]
    q = (1.0 + ts) ** p * values[sel] / I
    full_sup = float(q.max())
    t_last = ts[0] + 0.75 * (ts[-1] - ts[0])
    last_sup = float(q[ts >= t_last].max())
    trend_ok = last_sup <= 1.1 * full_sup + np.finfo(float).tiny
    try:
        slope, err = fit_power_exponent(ts, np.maximum(q, 1e-300), (ts[0], ts[-1]))
    except NonPositiveValues:
        slope, err = np.nan, np.nan
    slope_ok = (not np.isfinite(slope)) or slope <= slack
    return RateVerdict(
        quantity=quantity, fitted_exponent=slope, fit_stderr=err,
        fit_window=(float(ts[0]), float(ts[-1])), empirical_C=full_sup,
        claimed_exponent=-p, slack=slack, passed=bool(trend_ok and slope_ok),
        detail={"last_quarter_sup": last_sup, "p": p, "normalizer": I})


def exponent_certificate(t: np.ndarray, values: np.ndarray, claimed: float,
                         window: tuple[float, float], slack: float = 0.4,
                         quantity: str = "E") -> RateVerdict:
    """Pass iff the fitted log-log slope is at most claimed + slack."""
    slope, err = fit_power_exponent(t, values, window)
    return RateVerdict(
        quantity=quantity, fitted_exponent=slope, fit_stderr=err,
        fit_window=window, empirical_C=float(np.max(values)), claimed_exponent=claimed,
        slack=slack, passed=bool(slope <= claimed + slack))


def assert_monotone_energy(series: EnergySeries, tol: float = 1e-9) -> None:
    """Damped runs must have non-increasing energy; checked before fitting."""
    E = series["E"]
    if np.any(np.diff(E) > tol * max(E[0], 1e-300)):
        raise ValueError("energy series is not non-increasing; solver suspect")


def cascade_verdicts(runs: list[EnergySeries], weighted: bool,
                     windows: list[tuple[float, float]],
                     slack: float = 0.4) -> list[RateVerdict]:
    """One certificate per cascade depth n (run index), claimed rate n+1 or n+2.

    Run n must have been produced from generator-iterated initial data; its
    series is normalized by the matching cascade sum of the base data.
    """
    out = []
    for n, (series, window) in enumerate(zip(runs, windows)):
        p = n + (2 if weighted else 1)
        I = series.norms.normalizer(n, weighted)
        v = boundedness_certificate(series.t, series["E"], p, I, window,
                                    slack=slack, quantity=f"E_cascade({n})")
        out.append(v)
    return out
