"""Permanence bounds, stability certificate, Lyapunov distance, comparison check.

The permanence box comes from chaining scalar comparison bounds through the
four equations; the certificate condition compares the slowest forward-jump
loss coefficient (Gamma1) with the largest current-time gain coefficient
(Gamma2) and, when Gamma2 < Gamma1, certifies the uniform decay rate
Psi = (Gamma1 - Gamma2) / (1 + Gamma1 * mu_sup).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBoundsError, NotRegressiveError
from .model import ContactRateMode, Coupled, Exogenous, SicaParams, State
from .timescale import TimeScale


# ----------------------------------------------------------------------
# permanence bounds
# ----------------------------------------------------------------------

def upper_bounds(p: SicaParams, lambda_L: float, lambda_U: float):
    """Eventual upper bounds (M1, M2, M3, M4), chained through the equations."""
    if lambda_L > lambda_U:
        raise ValueError(f"lambda_L={lambda_L} exceeds lambda_U={lambda_U}")
    M1 = p.Lambda / (p.beta * lambda_L + p.nu)
    M2 = p.beta * (lambda_U * M1 + (p.gamma + p.omega) * p.Lambda / p.nu) \
        / (p.rho + p.phi + p.nu)
    M3 = p.phi * M2 / (p.omega + p.nu)
    M4 = p.rho * M2 / (p.gamma + p.nu + p.d)
    return M1, M2, M3, M4


def lower_bounds(p: SicaParams, lambda_L: float, lambda_U: float):
    """Eventual lower bounds (m1, m2, m3, m4); degenerate when lambda_L -> 0."""
    if lambda_L > lambda_U:
        raise ValueError(f"lambda_L={lambda_L} exceeds lambda_U={lambda_U}")
    m1 = p.Lambda / (p.beta * lambda_U + p.nu)
    m2 = p.beta * lambda_L * m1 / (p.rho + p.phi + p.nu)
    m3 = p.phi * m2 / (p.omega + p.nu)
    m4 = p.rho * m2 / (p.gamma + p.nu + p.d)
    return m1, m2, m3, m4


@dataclass(frozen=True)
class PermanenceBounds:
    """Per-compartment permanence box plus the contact-rate bounds that built it."""

    M1: float
    M2: float
    M3: float
    M4: float
    m1: float
    m2: float
    m3: float
    m4: float
    lambda_L: float
    lambda_U: float

    @property
    def M(self) -> float:
        return max(self.M1, self.M2, self.M3, self.M4)

    @property
    def m(self) -> float:
        return min(self.m1, self.m2, self.m3, self.m4)

    def uppers(self):
        return self.M1, self.M2, self.M3, self.M4

    def lowers(self):
        return self.m1, self.m2, self.m3, self.m4


def permanence_bounds(p: SicaParams, lambda_L: float, lambda_U: float) -> PermanenceBounds:
    Ms = upper_bounds(p, lambda_L, lambda_U)
    ms = lower_bounds(p, lambda_L, lambda_U)
    return PermanenceBounds(*Ms, *ms, lambda_L=lambda_L, lambda_U=lambda_U)


# ----------------------------------------------------------------------
# stability certificate
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityCertificate:
    """Forward-jump loss coefficients a_i, current-time gain coefficients b_i,
    their extremes, and the certified decay rate when the gap condition holds.
    """

    a1: float
    a2: float
    a3: float
    a4: float
    b1: float
    b2: float
    b3: float
    b4: float
    Gamma1: float
    Gamma2: float
    mu_sup: float
    H2_holds: bool
    Psi: float | None
    neg_psi_regressive: bool

    def a(self):
        return self.a1, self.a2, self.a3, self.a4

    def b(self):
        return self.b1, self.b2, self.b3, self.b4

    def worst_gain_name(self) -> str:
        """Name of the b_i that realizes Gamma2 (the coefficient breaking H2)."""
        names = ("b1", "b2", "b3", "b4")
        return names[int(np.argmax(self.b()))]


def decay_rate(Gamma1: float, Gamma2: float, mu_sup: float) -> float:
    """Certified uniform decay rate (Gamma1 - Gamma2) / (1 + Gamma1 * mu_sup)."""
    return (Gamma1 - Gamma2) / (1.0 + Gamma1 * mu_sup)


def certificate(p: SicaParams, bounds: PermanenceBounds, mu_sup: float) -> StabilityCertificate:
    """Assemble the stability certificate from a permanence box.

    Raises DegenerateBoundsError when the box's lower edge m is nonpositive
    (the gain coefficients divide by 2m).
    """
    if mu_sup < 0:
        raise ValueError(f"mu_sup must be nonnegative, got {mu_sup}")
    m = bounds.m
    M = bounds.M
    if m <= 0:
        raise DegenerateBoundsError(
            f"lower permanence bound m={m} is nonpositive; certificate undefined")
    a1 = p.beta * bounds.lambda_L + p.nu
    a2 = p.rho + p.phi + p.nu
    a3 = p.omega + p.nu
    a4 = p.gamma + p.nu + p.d
    q = p.beta**2 * M / (2.0 * m)
    b1 = p.beta * bounds.lambda_U + q
    b2 = p.rho + p.phi
    b3 = p.omega + q * p.eta_C
    b4 = p.gamma + q * p.eta_A
    Gamma1 = min(a1, a2, a3, a4)
    Gamma2 = max(b1, b2, b3, b4)
    H2 = Gamma2 < Gamma1
    Psi = decay_rate(Gamma1, Gamma2, mu_sup) if H2 else None
    neg_psi_ok = bool(H2 and 1.0 - mu_sup * Psi > 0.0)
    return StabilityCertificate(a1, a2, a3, a4, b1, b2, b3, b4,
                                Gamma1, Gamma2, mu_sup, H2, Psi, neg_psi_ok)


# ----------------------------------------------------------------------
# Lyapunov distance
# ----------------------------------------------------------------------

def lyapunov_V(Z: State | np.ndarray, Zhat: State | np.ndarray) -> float:
    """Sum of absolute componentwise differences between two states."""
    a = Z.as_array() if isinstance(Z, State) else np.asarray(Z, dtype=float)
    b = Zhat.as_array() if isinstance(Zhat, State) else np.asarray(Zhat, dtype=float)
    return float(np.sum(np.abs(a - b)))


# ----------------------------------------------------------------------
# hypothesis (H1) check
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class H1Report:
    holds: bool
    lambda_L: float
    lambda_U: float
    warning: str | None = None


def check_H1(mode: ContactRateMode, horizon: float,
             params: SicaParams | None = None) -> H1Report:
    """Report whether the contact rate is certified within 0 < lambda_L <= lambda_U.

    Exogenous mode uses the signal's analytic envelope. Coupled mode only has
    the a-priori envelope [0, beta*eta_A] and is never certified: the coupled
    rate vanishes at the disease-free state.
    """
    if isinstance(mode, Exogenous):
        lo, hi = mode.signal.analytic_bounds()
        warning = None
        if lo < mode.lambda_L - 1e-15 or hi > mode.lambda_U + 1e-15:
            warning = (f"analytic envelope [{lo:.6g}, {hi:.6g}] exceeds the declared "
                       f"[{mode.lambda_L:.6g}, {mode.lambda_U:.6g}]")
        return H1Report(holds=lo > 0.0, lambda_L=lo, lambda_U=hi, warning=warning)
    if not isinstance(mode, Coupled):
        raise TypeError(f"unknown contact-rate mode {mode!r}")
    if params is None:
        raise ValueError("coupled-mode H1 check needs the model parameters")
    return H1Report(
        holds=False,
        lambda_L=0.0,
        lambda_U=params.beta * params.eta_A,
        warning="coupled contact rate has no certified positive lower bound "
                "(it vanishes at the disease-free state)")


# ----------------------------------------------------------------------
# comparison inequality check
# ----------------------------------------------------------------------

def exp_ominus_const(times: np.ndarray, mus: np.ndarray, rate: float) -> np.ndarray:
    """e_{(-)rate}(t_j, t_0) along sampled times that include every jump.

    Per recorded step the scattered part contributes 1/(1 + mu*rate) and the
    remaining dense span exp(-rate * span); both factors are exact, so this
    equals the generalized exponential of the circle-negated constant.
    """
    times = np.asarray(times, dtype=float)
    mus = np.asarray(mus, dtype=float)
    out = np.empty(len(times))
    acc = 1.0
    out[0] = acc
    for j in range(len(times) - 1):
        dt = times[j + 1] - times[j]
        mu = mus[j]
        if mu > 0:
            acc /= 1.0 + mu * rate
            dense = max(0.0, dt - mu)
        else:
            dense = dt
        if dense > 0:
            acc *= math.exp(-rate * dense)
        out[j + 1] = acc
    return out


@dataclass(frozen=True)
class ComparisonReport:
    direction: str
    n_points: int
    premise_holds: bool
    first_premise_violation_time: float | None
    checked_points: int
    max_violation: float
    violation_time: float


def verify_comparison(ts: TimeScale, times, values, a: float, b: float,
                      direction: str = "upper",
                      premise_rtol: float = 1e-9) -> ComparisonReport:
    """Check the scalar comparison bound along a sampled trajectory.

    Wherever the sampled delta derivative satisfies y^Delta <= b - a*y^sigma
    (>= for direction="lower"), the trajectory must respect
    (b/a) * [1 + (a*y(t0)/b - 1) * e_{(-)a}(t, t0)] from the same side. The
    conclusion at a point is only asserted while the premise has held at all
    earlier samples; the returned max_violation is signed (positive means the
    bound was broken). Samples must include every right-scattered point of
    the scale between t0 and the end (grids and trajectories do).
    """
    if direction not in ("upper", "lower"):
        raise ValueError(f"direction must be 'upper' or 'lower', got {direction!r}")
    if not (a > 0 and b > 0):
        raise ValueError(f"comparison needs a > 0 and b > 0, got a={a}, b={b}")
    times = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if times.shape != y.shape or times.ndim != 1 or len(times) < 2:
        raise ValueError("need matching 1-d times and values with at least 2 samples")
    if np.any(y <= 0):
        raise ValueError("comparison applies to positive trajectories only")
    mus = ts.graininess_array(times)
    if np.any(1.0 - mus * a <= 0.0):
        raise NotRegressiveError(
            f"-a is not positively regressive: 1 - mu*a <= 0 for a={a}")

    env = exp_ominus_const(times, mus, a)
    bound = (b / a) * (1.0 + (a * y[0] / b - 1.0) * env)

    dt = np.diff(times)
    dy = np.diff(y) / dt
    y_sigma = np.where(mus[:-1] > 0, y[1:], y[:-1])
    slack = premise_rtol * np.maximum.reduce(
        [np.full_like(dy, max(1.0, abs(b))), np.abs(a * y_sigma), np.abs(dy)])
    if direction == "upper":
        premise = dy <= b - a * y_sigma + slack
        violation = y - bound
    else:
        premise = dy >= b - a * y_sigma - slack
        violation = bound - y

    fails = np.flatnonzero(~premise)
    if len(fails):
        first_fail = int(fails[0])
        checked = first_fail + 1  # conclusion asserted through the failure point
        first_fail_time = float(times[first_fail])
    else:
        checked = len(times)
        first_fail_time = None
    vi = int(np.argmax(violation[:checked]))
    return ComparisonReport(
        direction=direction,
        n_points=len(times),
        premise_holds=not len(fails),
        first_premise_violation_time=first_fail_time,
        checked_points=checked,
        max_violation=float(violation[vi]),
        violation_time=float(times[vi]),
    )


# ----------------------------------------------------------------------
# report rendering
# ----------------------------------------------------------------------

def report_items(p: SicaParams, bounds: PermanenceBounds,
                 cert: StabilityCertificate | None, h1: H1Report,
                 reference: dict[str, float] | None = None) -> list[tuple[str, object]]:
    """Flat (key, value) report: bounds, certificate, verdicts, reference deltas."""
    items: list[tuple[str, object]] = []
    computed: dict[str, float] = {}
    for name, val in zip(("M1", "M2", "M3", "M4"), bounds.uppers()):
        items.append((name, val))
        computed[name] = val
    for name, val in zip(("m1", "m2", "m3", "m4"), bounds.lowers()):
        items.append((name, val))
        computed[name] = val
    items += [("M", bounds.M), ("m", bounds.m),
              ("lambda_L", bounds.lambda_L), ("lambda_U", bounds.lambda_U)]
    if cert is not None:
        for name, val in zip(("a1", "a2", "a3", "a4"), cert.a()):
            items.append((name, val))
        for name, val in zip(("b1", "b2", "b3", "b4"), cert.b()):
            items.append((name, val))
        items += [("Gamma1", cert.Gamma1), ("Gamma2", cert.Gamma2),
                  ("mu_sup", cert.mu_sup), ("H2_holds", cert.H2_holds)]
        computed["Gamma1"] = cert.Gamma1
        computed["Gamma2"] = cert.Gamma2
        if cert.H2_holds:
            items.append(("Psi", cert.Psi))
            items.append(("neg_psi_regressive", cert.neg_psi_regressive))
            computed["Psi"] = cert.Psi
    items += [("H1_holds", h1.holds), ("H1_lambda_L", h1.lambda_L),
              ("H1_lambda_U", h1.lambda_U)]
    if h1.warning:
        items.append(("H1_warning", h1.warning))
    if reference:
        for name, pub in reference.items():
            if name in computed:
                items.append((f"paper_delta.{name}", abs(computed[name] - pub)))
    return items


def format_value(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def render_report_kv(items: list[tuple[str, object]]) -> str:
    return "\n".join(f"{k} = {format_value(v)}" for k, v in items) + "\n"


def render_report_text(items: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in items)
    lines = ["analysis report", "-" * 15]
    for k, v in items:
        lines.append(f"  {k:<{width}}  {format_value(v)}")
    return "\n".join(lines) + "\n"
