"""SICA compartment model: parameters, state, force of infection, one-step maps.

The dynamics couple four compartments (susceptible, infected, chronic under
ART, AIDS). Loss terms act on the forward-jumped state, gain terms on the
current one, so every right-scattered step is affine in its own unknown and
solves in closed form with unconditional positivity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyPopulationError
from .signals import AlmostPeriodicSignal

COMPARTMENTS = ("x1", "x2", "x3", "x4")


@dataclass(frozen=True)
class SicaParams:
    """The eight positive rates plus the two modification parameters.

    Lambda: recruitment of susceptibles (individuals/time)
    beta:   HIV transmission rate (1/time)
    nu:     natural death rate (1/time)
    rho:    default-treatment rate for infected (1/time)
    phi:    HIV treatment rate for infected (1/time)
    gamma:  AIDS treatment rate (1/time)
    omega:  default-treatment rate for chronic (1/time)
    d:      AIDS-induced death rate (1/time)
    eta_C:  modification parameter, in [0, 1]
    eta_A:  partial-restoration parameter, >= 1
    """

    Lambda: float
    beta: float
    nu: float
    rho: float
    phi: float
    gamma: float
    omega: float
    d: float
    eta_C: float
    eta_A: float

    def __post_init__(self):
        for name in ("Lambda", "beta", "nu", "rho", "phi", "gamma", "omega", "d"):
            v = getattr(self, name)
            if not (v > 0):
                raise ValueError(f"rate {name} must be strictly positive, got {v}")
        if not (0.0 <= self.eta_C <= 1.0):
            raise ValueError(f"eta_C must lie in [0, 1], got {self.eta_C}")
        if not (self.eta_A >= 1.0):
            raise ValueError(f"eta_A must be >= 1, got {self.eta_A}")


@dataclass(frozen=True)
class State:
    """Compartment vector (x1, x2, x3, x4), componentwise nonnegative."""

    x1: float
    x2: float
    x3: float
    x4: float

    def __post_init__(self):
        for name in COMPARTMENTS:
            v = getattr(self, name)
            if not (v >= 0) or not np.isfinite(v):
                raise ValueError(f"compartment {name} must be finite and >= 0, got {v}")

    @property
    def total(self) -> float:
        return self.x1 + self.x2 + self.x3 + self.x4

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])

    @classmethod
    def from_array(cls, vec) -> "State":
        x1, x2, x3, x4 = (float(v) for v in vec)
        return cls(x1, x2, x3, x4)

    def scaled(self, factor: float) -> "State":
        return State(self.x1 * factor, self.x2 * factor,
                     self.x3 * factor, self.x4 * factor)


@dataclass(frozen=True)
class Coupled:
    """Force of infection computed from the evolving state itself.

    single_beta divides the force of infection by beta, for users who want
    the conventional form; the default keeps the literal double-beta reading
    (beta appears in the force of infection and again in the infection term).
    """

    single_beta: bool = False


@dataclass(frozen=True)
class Exogenous:
    """Externally prescribed contact-rate signal with declared (H1) bounds."""

    signal: AlmostPeriodicSignal
    lambda_L: float
    lambda_U: float

    def __post_init__(self):
        if not (0 < self.lambda_L <= self.lambda_U):
            raise ValueError(
                f"need 0 < lambda_L <= lambda_U, got ({self.lambda_L}, {self.lambda_U})")


ContactRateMode = Coupled | Exogenous


def contact_rate(s: State | np.ndarray, p: SicaParams, single_beta: bool = False) -> float:
    """Effective contact rate (beta/N)(x2 + eta_C*x3 + eta_A*x4).

    With single_beta the leading beta is dropped (the model's infection term
    then carries beta exactly once). Raw 4-vectors are accepted so integrator
    stages can evaluate the rate without constructing validated states.
    """
    x1, x2, x3, x4 = (s.as_array() if isinstance(s, State) else np.asarray(s, dtype=float))
    n = x1 + x2 + x3 + x4
    if n <= 0:
        raise EmptyPopulationError(f"total population must be positive, got N={n}")
    lam = (x2 + p.eta_C * x3 + p.eta_A * x4) / n
    return float(lam if single_beta else p.beta * lam)


def rhs_dense(s: State | np.ndarray, lam: float, p: SicaParams) -> np.ndarray:
    """Right-hand side of the dense (classical ODE) form of the dynamics."""
    x1, x2, x3, x4 = (s.as_array() if isinstance(s, State) else np.asarray(s, dtype=float))
    infection = p.beta * lam * x1
    return np.array([
        p.Lambda - infection - p.nu * x1,
        infection - (p.rho + p.phi + p.nu) * x2 + p.gamma * x4 + p.omega * x3,
        p.phi * x2 - (p.omega + p.nu) * x3,
        p.rho * x2 - (p.gamma + p.nu + p.d) * x4,
    ])


def scattered_step(s: State, lam: float, mu: float, p: SicaParams) -> State:
    """Exact solve of one right-scattered step of length mu.

    Each equation is affine in its own forward value (losses are evaluated
    at sigma(t), gains at t), so the step is four independent linear solves.
    All denominators are >= 1, making positivity unconditional.
    """
    if not (mu > 0):
        raise ValueError(f"scattered step needs mu > 0, got {mu}")
    x1 = (s.x1 + mu * p.Lambda) / (1.0 + mu * (p.beta * lam + p.nu))
    x2 = (s.x2 + mu * (p.beta * lam * s.x1 + p.gamma * s.x4 + p.omega * s.x3)) \
        / (1.0 + mu * (p.rho + p.phi + p.nu))
    x3 = (s.x3 + mu * p.phi * s.x2) / (1.0 + mu * (p.omega + p.nu))
    x4 = (s.x4 + mu * p.rho * s.x2) / (1.0 + mu * (p.gamma + p.nu + p.d))
    return State(x1, x2, x3, x4)


def disease_free_equilibrium(p: SicaParams) -> State:
    """Fixed point with no infection pressure: (Lambda/nu, 0, 0, 0)."""
    return State(p.Lambda / p.nu, 0.0, 0.0, 0.0)
