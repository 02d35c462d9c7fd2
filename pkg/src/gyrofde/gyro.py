"""Statistical gyroscope error model and seeded rate-error synthesis.

The measured rate error is white noise plus one or more exponentially
correlated (first-order Markov) drift processes:

    noise sample          w_N / sqrt(dt),        w_N ~ N(0, N^2)
    drift state update    s <- s exp(-dt/Tc) + w_K sqrt(dt),  w_K ~ N(0, K^2)

All quantities are canonical (rad, h).  Randomness is always drawn from an
explicit numpy Generator; reproducible substreams are derived from a master
seed with ``substream`` so results never depend on execution order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .units import DEG

__all__ = [
    "NoiseSpec", "DriftSpec", "GyroErrorModel", "RateTrace",
    "substream", "drift_stationary_std", "init_drift_state", "step_drift",
    "noise_sample", "synthesize_rate_trace",
]


@dataclass(frozen=True)
class NoiseSpec:
    """Angle-random-walk amplitude N, rad/sqrt(h)."""

    N: float

    def __post_init__(self):
        if not (self.N >= 0.0 and math.isfinite(self.N)):
            raise ValueError(f"N must be finite and >= 0, got {self.N}")


@dataclass(frozen=True)
class DriftSpec:
    """One Markov drift process: amplitude K (rad/h^(3/2)), time constant Tc (h)."""

    K: float
    Tc: float

    def __post_init__(self):
        if not (self.K >= 0.0 and math.isfinite(self.K)):
            raise ValueError(f"K must be finite and >= 0, got {self.K}")
        if not (self.Tc > 0.0 and math.isfinite(self.Tc)):
            raise ValueError(f"Tc must be finite and > 0, got {self.Tc}")


@dataclass(frozen=True)
class GyroErrorModel:
    """Noise plus an ordered list of drift processes.

    ``turn_on`` selects whether each drift state starts from its stationary
    distribution (a gyroscope switched on with residual drift history) or
    from exactly zero.
    """

    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec(0.0))
    drifts: tuple[DriftSpec, ...] = ()
    turn_on: bool = True

    def __post_init__(self):
        object.__setattr__(self, "drifts", tuple(self.drifts))

    @classmethod
    def from_deg(cls, N_deg_sqrt_h: float = 0.0,
                 drifts_deg: tuple[tuple[float, float], ...] = (),
                 turn_on: bool = True) -> "GyroErrorModel":
        """Convenience constructor taking N in deg/sqrt(h) and (K deg/h^1.5, Tc h)."""
        return cls(NoiseSpec(N_deg_sqrt_h * DEG),
                   tuple(DriftSpec(k * DEG, tc) for k, tc in drifts_deg),
                   turn_on)


@dataclass
class RateTrace:
    """Bench-test rate-error record: n samples at step dt covering `duration`."""

    dt: float
    samples: np.ndarray
    duration: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        n = len(self.samples)
        if abs(n * self.dt - self.duration) > 1.5 * self.dt:
            raise ValueError(
                f"{n} samples x dt={self.dt} != duration={self.duration}")

    def to_csv(self, path) -> None:
        """Header ``t_h,rate_deg_per_h``; timestamps at interval ends; 17 sig digits."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_h", "rate_deg_per_h"])
            for i, r in enumerate(self.samples):
                w.writerow([f"{(i + 1) * self.dt:.17g}", f"{r / DEG:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "RateTrace":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != ["t_h", "rate_deg_per_h"]:
            raise ValueError(f"{path}: expected header t_h,rate_deg_per_h")
        t = np.array([float(r[0]) for r in rows[1:]])
        rates = np.array([float(r[1]) for r in rows[1:]]) * DEG
        if len(t) == 0:
            raise ValueError(f"{path}: empty trace")
        dt = t[0]
        return cls(dt=dt, samples=rates, duration=len(rates) * dt)


def substream(seed, *key: int) -> np.random.Generator:
    """Generator for a keyed substream of ``seed``.

    ``seed`` is an int master seed or an existing SeedSequence; ``key`` extends
    its spawn key, so (seed, *key) fully determines the stream regardless of
    what else has been drawn or in which order streams are created.
    """
    if isinstance(seed, np.random.SeedSequence):
        ss = np.random.SeedSequence(entropy=seed.entropy,
                                    spawn_key=tuple(seed.spawn_key) + key)
    else:
        ss = np.random.SeedSequence(entropy=seed, spawn_key=key)
    return np.random.default_rng(ss)


def drift_stationary_std(d: DriftSpec) -> float:
    """Stationary standard deviation K sqrt(Tc/2) of the drift state, rad/h."""
    return d.K * math.sqrt(d.Tc / 2.0)


def init_drift_state(d: DriftSpec, rng: np.random.Generator,
                     turn_on: bool = True) -> float:
    """Draw the drift state at t=0; exactly 0 (and no draw) when turn_on is off."""
    if not turn_on:
        return 0.0
    return drift_stationary_std(d) * float(rng.standard_normal())


def step_drift(state: float, d: DriftSpec, dt: float,
               rng: np.random.Generator) -> float:
    """Advance the drift state by dt: decay through exp(-dt/Tc), add K sqrt(dt) impulse."""
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    return state * math.exp(-dt / d.Tc) + (d.K * math.sqrt(dt)) * float(rng.standard_normal())


def noise_sample(n: NoiseSpec, dt: float, rng: np.random.Generator) -> float:
    """One white-noise rate sample with std N/sqrt(dt)."""
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    return (n.N / math.sqrt(dt)) * float(rng.standard_normal())


def _drift_states(d: DriftSpec, n_steps: int, dt: float,
                  init_rng: np.random.Generator,
                  sample_rng: np.random.Generator, turn_on: bool) -> np.ndarray:
    """States s_0..s_{n-1} held over each step interval (zero-order hold).

    s_0 is the turn-on draw (or 0); s_j = s_{j-1} exp(-dt/Tc) + K sqrt(dt) w_j.
    Bit-identical to looping init_drift_state/step_drift on the same streams.
    """
    s0 = init_drift_state(d, init_rng, turn_on)
    if n_steps == 1:
        return np.array([s0])
    q = math.exp(-dt / d.Tc)
    impulses = (d.K * math.sqrt(dt)) * sample_rng.standard_normal(n_steps - 1)
    tail, _ = lfilter([1.0], [1.0, -q], impulses, zi=np.array([q * s0]))
    return np.concatenate(([s0], tail))


def _rate_series(m: GyroErrorModel, n_steps: int, dt: float, seed,
                 prefix: tuple[int, ...] = ()) -> np.ndarray:
    """Per-step rate error, rad/h, from keyed substreams of ``seed``.

    Process p's streams are keyed (*prefix, p, 0) for the turn-on draw and
    (*prefix, p, 1) for per-step samples; noise is process 0, drift i is
    process 1+i.  Separating the turn-on draw keeps all in-flight randomness
    identical when only the turn_on flag changes.
    """
    rate = (m.noise.N / math.sqrt(dt)) * \
        substream(seed, *prefix, 0, 1).standard_normal(n_steps)
    for i, d in enumerate(m.drifts):
        rate += _drift_states(d, n_steps, dt,
                              substream(seed, *prefix, 1 + i, 0),
                              substream(seed, *prefix, 1 + i, 1), m.turn_on)
    return rate


def synthesize_rate_trace(m: GyroErrorModel, duration: float, dt: float,
                          seed) -> RateTrace:
    """Simulate a bench recording of the rate error (zero applied rotation).

    Keyed substreams per process make the trace bit-reproducible for a given
    seed and unaffected by evaluation order.
    """
    if dt <= 0.0 or duration < dt:
        raise ValueError(f"need duration >= dt > 0, got duration={duration}, dt={dt}")
    n = int(round(duration / dt))
    return RateTrace(dt=dt, samples=_rate_series(m, n, dt, seed),
                     duration=n * dt)
