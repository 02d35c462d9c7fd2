"""Closed-form along-track, cross-track, and fix-displacement error budgets.

With x = t/Tc and a = exp(-x), the variance contributions of one drift
process factor into dimensionless shapes (distance scale applied outside):

    along-track   in-flight  K^2 Tc^3 R^2 * [x - (3 - 4a + a^2)/2]
                  turn-on    K^2 Tc^3 R^2 * (1 - a)^2 / 2
                  (their sum is exactly K^2 Tc^3 R^2 * [x - (1 - a)])
    cross-track   in-flight  K^2 Tc^5 v^2 * [x^3/3 - x^2 + x(1-2a) + (1-a^2)/2]
                  turn-on    K^2 Tc^5 v^2 * (x - (1 - a))^2 / 2

White noise contributes N^2 R^2 t along-track and N^2 v^2 t^3 / 3
cross-track.  The fix displacement error is the root-sum-square of the two
axes; 2 sigma_FDE is reported as the 95% figure.

The bracketed shapes cancel catastrophically for x << 1, so they switch to
exact power series below x = 0.5 (small-t limits: x^3/3 along-track,
x^5/20 cross-track).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from ._series import atrk_inflight_shape, xminus_em, xtrk_inflight_shape
from .gyro import GyroErrorModel
from .units import NMI_KM

__all__ = [
    "FlightProfile", "ErrorBudget", "atrk_variance", "xtrk_variance",
    "fde_sigma", "turnon_fraction", "budget_series_to_csv",
]


@dataclass(frozen=True)
class FlightProfile:
    """Constant-speed great-circle flight: v km/h, duration h, sphere radius km.

    dt is the simulation step used by the Monte-Carlo engine only.
    """

    v: float = 900.0
    duration: float = 10.0
    R: float = 6371.0
    dt: float = 1.0 / 3600.0

    def __post_init__(self):
        if self.v < 0:
            raise ValueError(f"v must be >= 0, got {self.v}")
        if self.duration <= 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")
        if self.R <= 0:
            raise ValueError(f"R must be > 0, got {self.R}")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.duration / self.dt)))


def atrk_variance(m: GyroErrorModel, R: float, t: float) -> tuple[float, float, float]:
    """(noise, drift, turn-on) along-track variance terms in km^2 at time t."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    noise = m.noise.N ** 2 * R * R * t
    drift = turnon = 0.0
    for d in m.drifts:
        scale = d.K * d.K * d.Tc ** 3 * R * R
        x = t / d.Tc
        drift += scale * atrk_inflight_shape(x)
        if m.turn_on:
            em = -math.expm1(-x)
            turnon += scale * em * em / 2.0
    return noise, drift, turnon


def xtrk_variance(m: GyroErrorModel, v: float, t: float) -> tuple[float, float, float]:
    """(noise, drift, turn-on) cross-track variance terms in km^2 at time t."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    noise = m.noise.N ** 2 * v * v * t ** 3 / 3.0
    drift = turnon = 0.0
    for d in m.drifts:
        scale = d.K * d.K * d.Tc ** 5 * v * v
        x = t / d.Tc
        drift += scale * xtrk_inflight_shape(x)
        if m.turn_on:
            g = xminus_em(x)
            turnon += scale * g * g / 2.0
    return noise, drift, turnon


@dataclass(frozen=True)
class ErrorBudget:
    """Per-term and total error standard deviations at one flight time."""

    t: float
    atrk_noise: float
    atrk_drift: float
    atrk_turnon: float
    xtrk_noise: float
    xtrk_drift: float
    xtrk_turnon: float
    sigma_atrk: float
    sigma_xtrk: float
    sigma_fde: float

    @property
    def fde95_km(self) -> float:
        """95%-confidence fix displacement, the 2 sigma convention."""
        return 2.0 * self.sigma_fde

    @property
    def fde95_nmi(self) -> float:
        return self.fde95_km / NMI_KM


def fde_sigma(m: GyroErrorModel, p: FlightProfile, t: float) -> ErrorBudget:
    """Assemble the full budget at time t of the profile."""
    if not 0.0 <= t <= p.duration * (1 + 1e-12):
        raise ValueError(f"t={t} outside flight duration {p.duration}")
    an, ad, at = atrk_variance(m, p.R, t)
    xn, xd, xt = xtrk_variance(m, p.v, t)
    va, vx = an + ad + at, xn + xd + xt
    return ErrorBudget(
        t=t, atrk_noise=an, atrk_drift=ad, atrk_turnon=at,
        xtrk_noise=xn, xtrk_drift=xd, xtrk_turnon=xt,
        sigma_atrk=math.sqrt(va), sigma_xtrk=math.sqrt(vx),
        sigma_fde=math.sqrt(va + vx))


def turnon_fraction(m: GyroErrorModel, p: FlightProfile, t: float,
                    axis: str) -> float:
    """Fraction of the total drift variance on one axis owed to the turn-on
    state (turn-on term over in-flight + turn-on).

    Far into a flight this tends to Tc/(2t) along-track and 3Tc/(2t)
    cross-track; for t << Tc it approaches 1 (the turn-on state dominates).
    """
    if len(m.drifts) != 1:
        raise ValueError("turn-on fraction is defined for a single drift process")
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    if axis == "ATRK":
        _, drift, turnon = atrk_variance(m, p.R, t)
    elif axis == "XTRK":
        _, drift, turnon = xtrk_variance(m, p.v, t)
    else:
        raise ValueError(f"axis must be 'ATRK' or 'XTRK', got {axis!r}")
    total = drift + turnon
    if total == 0.0:
        raise ValueError("drift variance is zero; fraction undefined")
    return turnon / total


def budget_series_to_csv(path, m: GyroErrorModel, p: FlightProfile,
                         times) -> None:
    """ErrorBudget CSV over a time grid: sigmas, 95% figure, per-term variances."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_h", "sigma_atrk_km", "sigma_xtrk_km", "sigma_fde_km",
                    "fde95_nmi", "atrk_noise_km2", "atrk_drift_km2",
                    "atrk_turnon_km2", "xtrk_noise_km2", "xtrk_drift_km2",
                    "xtrk_turnon_km2"])
        for t in times:
            b = fde_sigma(m, p, float(t))
            w.writerow([f"{v:.17g}" for v in (
                b.t, b.sigma_atrk, b.sigma_xtrk, b.sigma_fde, b.fde95_nmi,
                b.atrk_noise, b.atrk_drift, b.atrk_turnon,
                b.xtrk_noise, b.xtrk_drift, b.xtrk_turnon)])
