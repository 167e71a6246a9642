"""Trajectory integration over a time scale plus empirical verification suites.

Right-scattered points advance with the exact affine solve; dense spans use
classical fixed-step fourth-order integration with the contact rate refreshed
per stage. Verification covers the permanence box and pairwise Lyapunov
contraction against the certified envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from io import StringIO
from pathlib import Path

import numpy as np

from .analysis import StabilityCertificate, PermanenceBounds, exp_ominus_const, lyapunov_V
from .errors import (
    H1ViolationError,
    MismatchedTrajectoriesError,
    NonfiniteStateError,
)
from .model import (
    ContactRateMode,
    Coupled,
    Exogenous,
    SicaParams,
    State,
    contact_rate,
    rhs_dense,
    scattered_step,
)
from .timescale import TimeScale

MAX_HALVINGS = 40
CSV_HEADER = "t,x1,x2,x3,x4,N,lambda,mu"


@dataclass(frozen=True)
class SolverConfig:
    """Integration settings: substep on dense intervals, horizon, thinning."""

    dense_step: float = 1e-3
    horizon: float | None = None
    record_every: int = 1

    def __post_init__(self):
        if not (self.dense_step > 0):
            raise ValueError(f"dense_step must be positive, got {self.dense_step}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")


@dataclass
class Trajectory:
    """Recorded (t, state, lambda, mu) samples with the run's params and mode."""

    times: np.ndarray
    states: np.ndarray
    lambdas: np.ndarray
    mus: np.ndarray
    params: SicaParams
    mode: ContactRateMode

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> State:
        return State.from_array(self.states[i])

    @property
    def final_state(self) -> State:
        return self.state(len(self.times) - 1)

    @property
    def totals(self) -> np.ndarray:
        return self.states.sum(axis=1)

    def to_csv(self) -> str:
        out = StringIO()
        out.write(CSV_HEADER + "\n")
        totals = self.totals
        for i in range(len(self.times)):
            row = (self.times[i], *self.states[i], totals[i],
                   self.lambdas[i], self.mus[i])
            out.write(",".join("%.17g" % v for v in row) + "\n")
        return out.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8", newline="\n")


def _lambda_evaluator(mode: ContactRateMode, p: SicaParams):
    if isinstance(mode, Coupled):
        return lambda t, y: contact_rate(y, p, mode.single_beta)
    if isinstance(mode, Exogenous):
        lo = mode.lambda_L - 1e-12 * max(1.0, mode.lambda_L)
        hi = mode.lambda_U + 1e-12 * max(1.0, mode.lambda_U)
        sig = mode.signal

        def lam(t, y):
            v = float(sig(t))
            if v < lo or v > hi:
                raise H1ViolationError(
                    f"exogenous contact rate {v!r} at t={t} leaves "
                    f"[{mode.lambda_L}, {mode.lambda_U}]")
            return v

        return lam
    raise TypeError(f"unknown contact-rate mode {mode!r}")


def _rk4(t: float, y: np.ndarray, h: float, lam_at, p: SicaParams) -> np.ndarray:
    k1 = rhs_dense(y, lam_at(t, y), p)
    y2 = y + 0.5 * h * k1
    k2 = rhs_dense(y2, lam_at(t + 0.5 * h, y2), p)
    y3 = y + 0.5 * h * k2
    k3 = rhs_dense(y3, lam_at(t + 0.5 * h, y3), p)
    y4 = y + h * k3
    k4 = rhs_dense(y4, lam_at(t + h, y4), p)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance_dense(t0: float, t1: float, y: np.ndarray, lam_at, p: SicaParams,
                   depth: int = 0) -> np.ndarray:
    """One dense substep, bisected until the result stays nonnegative."""
    out = _rk4(t0, y, t1 - t0, lam_at, p)
    if np.all(np.isfinite(out)) and np.all(out >= 0.0):
        return out
    if depth >= MAX_HALVINGS:
        raise NonfiniteStateError(
            f"dense step [{t0}, {t1}] could not preserve positivity after "
            f"{MAX_HALVINGS} halvings")
    mid = 0.5 * (t0 + t1)
    half = _advance_dense(t0, mid, y, lam_at, p, depth + 1)
    return _advance_dense(mid, t1, half, lam_at, p, depth + 1)


def simulate(ts: TimeScale, p: SicaParams, mode: ContactRateMode, init: State,
             cfg: SolverConfig) -> Trajectory:
    """Integrate the dynamics over the (possibly truncated) time scale.

    Scattered points use the exact affine solve with the true graininess;
    dense spans step with RK4 at cfg.dense_step, re-evaluating the contact
    rate per stage. All scattered points are recorded regardless of
    record_every; dense samples are thinned.
    """
    ts_eff = ts.truncate(cfg.horizon) if cfg.horizon is not None else ts
    pts = ts_eff.grid(cfg.dense_step)
    lam_at = _lambda_evaluator(mode, p)

    y = init.as_array().astype(float)
    n = len(pts)
    rec_t, rec_x, rec_lam, rec_mu = [], [], [], []

    def record(i, t, mu):
        rec_t.append(t)
        rec_x.append(y.copy())
        rec_lam.append(lam_at(t, y))
        rec_mu.append(mu)

    for i, (t, mu) in enumerate(pts):
        if not np.all(np.isfinite(y)):
            raise NonfiniteStateError(f"state became nonfinite at t={t}")
        if i % cfg.record_every == 0 or mu > 0 or i == n - 1:
            record(i, t, mu)
        if i == n - 1:
            break
        if mu > 0:
            lam = lam_at(t, y)
            y = scattered_step(State.from_array(y), lam, mu, p).as_array()
        else:
            y = _advance_dense(t, pts[i + 1][0], y, lam_at, p)

    return Trajectory(
        times=np.array(rec_t),
        states=np.array(rec_x),
        lambdas=np.array(rec_lam),
        mus=np.array(rec_mu),
        params=p,
        mode=mode,
    )


# ----------------------------------------------------------------------
# pairwise Lyapunov contraction
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PairConvergenceReport:
    """Pointwise envelope verdict and fitted decay rate for a trajectory pair."""

    holds: bool
    n_points: int
    v0: float
    max_violation: float
    violation_time: float
    fitted_rate: float
    psi: float
    tol: float
    noise_floor: float


def pair_convergence(trajA: Trajectory, trajB: Trajectory,
                     cert: StabilityCertificate, tol: float = 1e-2,
                     transient_fraction: float = 0.5) -> PairConvergenceReport:
    """Check V(t) <= V(t0) * e_{(-)Psi}(t, t0) * (1 + tol) along a pair.

    The envelope check carries a machine-noise floor: once the two float
    trajectories collapse to (near-)identical states, V rattles at ulp scale
    while the theoretical envelope keeps shrinking, and values below the
    floor are numerically indistinguishable from zero. The decay rate is a
    log-linear fit over the post-transient samples above that floor (+inf
    when the pair collapses entirely).
    """
    if not cert.H2_holds:
        raise ValueError("pair_convergence needs a certificate with H2_holds")
    if (len(trajA.times) != len(trajB.times)
            or not np.array_equal(trajA.times, trajB.times)
            or trajA.params != trajB.params
            or trajA.mode != trajB.mode):
        raise MismatchedTrajectoriesError(
            "trajectories must share times, parameters and contact-rate mode")

    psi = cert.Psi
    times = trajA.times
    v = np.abs(trajA.states - trajB.states).sum(axis=1)
    env = v[0] * exp_ominus_const(times, trajA.mus, psi) * (1.0 + tol)
    scale = max(float(np.max(np.abs(trajA.states).sum(axis=1))),
                float(np.max(np.abs(trajB.states).sum(axis=1))), 1.0)
    floor = 64.0 * np.finfo(float).eps * scale

    excess = v - env
    worst = int(np.argmax(excess))
    holds = bool(np.all(v <= np.maximum(env, floor)))

    above = np.flatnonzero(v > floor)
    if len(above) < 4:
        fitted = float("inf")
    else:
        start = int(len(above) * transient_fraction)
        tail = above[start:] if len(above) - start >= 2 else above[-2:]
        slope = np.polyfit(times[tail], np.log(v[tail]), 1)[0]
        fitted = float(-slope)

    return PairConvergenceReport(
        holds=holds,
        n_points=len(times),
        v0=float(v[0]),
        max_violation=float(excess[worst]),
        violation_time=float(times[worst]),
        fitted_rate=fitted,
        psi=psi,
        tol=tol,
        noise_floor=float(floor),
    )


# ----------------------------------------------------------------------
# permanence box check
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CompartmentBox:
    name: str
    lower: float
    upper: float
    observed_min: float
    observed_max: float
    inside: bool
    entry_time: float | None


@dataclass(frozen=True)
class PermanenceReport:
    holds: bool
    window_start: float
    tol: float
    compartments: tuple[CompartmentBox, ...]


def permanence_check(traj: Trajectory, bounds: PermanenceBounds,
                     transient_fraction: float = 0.5,
                     tol: float = 1e-3) -> PermanenceReport:
    """Post-transient min/max per compartment against the permanence box.

    The entry time is the first time (over the whole trajectory) a
    compartment lies within its tolerance-widened box; it stands in for the
    analytical transient times, which are existential only.
    """
    if not (0.0 < transient_fraction < 1.0):
        raise ValueError(f"transient_fraction must be in (0, 1), got {transient_fraction}")
    if len(traj.times) == 0:
        raise ValueError("trajectory is empty")
    t0, t1 = traj.times[0], traj.times[-1]
    window_start = t0 + transient_fraction * (t1 - t0)
    in_window = traj.times >= window_start
    boxes = []
    for i, name in enumerate(("x1", "x2", "x3", "x4")):
        lo = bounds.lowers()[i] * (1.0 - tol)
        hi = bounds.uppers()[i] * (1.0 + tol)
        col = traj.states[:, i]
        wmin = float(np.min(col[in_window]))
        wmax = float(np.max(col[in_window]))
        inside_track = (col >= lo) & (col <= hi)
        entry = float(traj.times[np.argmax(inside_track)]) if np.any(inside_track) else None
        boxes.append(CompartmentBox(
            name=name, lower=lo, upper=hi, observed_min=wmin, observed_max=wmax,
            inside=bool(lo <= wmin and wmax <= hi), entry_time=entry))
    return PermanenceReport(
        holds=all(b.inside for b in boxes),
        window_start=float(window_start),
        tol=tol,
        compartments=tuple(boxes),
    )
