"""Finite-horizon time scales and the calculus primitives on them.

A time scale here is an explicitly enumerable union of closed intervals and
isolated points, sorted and disjoint. That representation supports exact jump
operators (sigma, rho), graininess, the circle algebra on regressive
functions, the generalized exponential, and delta derivatives. Dense
sub-intervals are handled by quadrature; everything scattered is exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import AtMaximumError, NotRegressiveError, TimeNotInScaleError

# A time function is any evaluator time -> real, total on the scale it is
# used with. Vectorized (ndarray-aware) callables are exploited when possible.
TimeFunction = Callable[[float], float]

MEMBERSHIP_RTOL = 1e-12
REGRESSIVITY_ATOL = 1e-14

QUADRATURE_RULES = ("midpoint", "trapezoid", "simpson")


@dataclass(frozen=True)
class QuadratureConfig:
    """Quadrature settings for integrals over dense sub-intervals."""

    dense_step: float = 1e-3
    rule: str = "trapezoid"

    def __post_init__(self):
        if not (self.dense_step > 0):
            raise ValueError(f"dense_step must be positive, got {self.dense_step}")
        if self.rule not in QUADRATURE_RULES:
            raise ValueError(f"rule must be one of {QUADRATURE_RULES}, got {self.rule!r}")


def _tol(t: float) -> float:
    return MEMBERSHIP_RTOL * max(1.0, abs(t))


class TimeScale:
    """Sorted union of closed intervals and isolated points on [0, inf).

    Segments are (lo, hi) pairs with lo == hi encoding an isolated point.
    Instances are immutable; all derived quantities are pure functions of
    the segment list.
    """

    __slots__ = ("segments", "translation_invariant_hint", "_los", "_his")

    def __init__(self, segments: Sequence[tuple[float, float]],
                 translation_invariant_hint: bool = False):
        segs = [(float(lo), float(hi)) for lo, hi in segments]
        if not segs:
            raise ValueError("a time scale needs at least one segment")
        prev_hi = -math.inf
        for lo, hi in segs:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("segment bounds must be finite")
            if lo < 0:
                raise ValueError(f"times must be >= 0, got segment start {lo}")
            if hi < lo:
                raise ValueError(f"segment [{lo}, {hi}] has hi < lo")
            if lo <= prev_hi:
                raise ValueError("segments must be sorted, disjoint and strictly increasing")
            prev_hi = hi
        object.__setattr__(self, "segments", tuple(segs))
        object.__setattr__(self, "translation_invariant_hint", bool(translation_invariant_hint))
        object.__setattr__(self, "_los", np.array([s[0] for s in segs]))
        object.__setattr__(self, "_his", np.array([s[1] for s in segs]))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("TimeScale is immutable")

    def __eq__(self, other):
        return isinstance(other, TimeScale) and self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    def __repr__(self):
        return f"TimeScale({self.to_literal()!r})"

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def interval(cls, lo: float, hi: float) -> "TimeScale":
        if not (hi > lo):
            raise ValueError(f"interval needs lo < hi, got [{lo}, {hi}]")
        return cls([(lo, hi)], translation_invariant_hint=True)

    @classmethod
    def point(cls, t: float) -> "TimeScale":
        return cls([(t, t)])

    @classmethod
    def integers(cls, lo: int, hi: int) -> "TimeScale":
        """Unit lattice lo, lo+1, ..., hi."""
        return cls.lattice(lo, hi, 1.0)

    @classmethod
    def lattice(cls, lo: float, hi: float, h: float) -> "TimeScale":
        """Arithmetic lattice lo, lo+h, ... up to hi (inclusive within tolerance)."""
        if not (h > 0):
            raise ValueError(f"lattice step must be positive, got {h}")
        n = int(math.floor((hi - lo) / h + 1e-9))
        if n < 0:
            raise ValueError(f"empty lattice: [{lo}, {hi}] with step {h}")
        pts = [lo + k * h for k in range(n + 1)]
        return cls([(p, p) for p in pts], translation_invariant_hint=True)

    @classmethod
    def geometric(cls, q0: float, q: float, count: int) -> "TimeScale":
        """Geometric lattice t_k = q0 * q**k for k = 0 .. count-1."""
        if not (q0 > 0 and q > 1):
            raise ValueError("geometric lattice needs q0 > 0 and q > 1")
        if count < 1:
            raise ValueError("geometric lattice needs count >= 1")
        pts = [q0 * q**k for k in range(count)]
        return cls([(p, p) for p in pts])

    @classmethod
    def from_segments(cls, segments: Sequence[tuple[float, float]]) -> "TimeScale":
        return cls(segments)

    # ------------------------------------------------------------------
    # basic queries
    # ------------------------------------------------------------------

    @property
    def t_min(self) -> float:
        return self.segments[0][0]

    @property
    def t_max(self) -> float:
        return self.segments[-1][1]

    def _locate(self, t: float) -> int:
        """Index of the segment containing t, or -1."""
        tol = _tol(t)
        # rightmost segment with lo <= t + tol
        i = int(np.searchsorted(self._los, t + tol, side="right")) - 1
        if i < 0:
            return -1
        lo, hi = self.segments[i]
        if t >= lo - tol and t <= hi + tol:
            return i
        return -1

    def contains(self, t: float) -> bool:
        return self._locate(float(t)) >= 0

    def __contains__(self, t: float) -> bool:
        return self.contains(t)

    def _require(self, t: float) -> int:
        i = self._locate(float(t))
        if i < 0:
            raise TimeNotInScaleError(f"t={t!r} is not in the time scale {self.to_literal()}")
        return i

    def sigma(self, t: float) -> float:
        """Forward jump: least scale element strictly greater than t (t at the max)."""
        i = self._require(t)
        lo, hi = self.segments[i]
        if t < hi - _tol(t):
            return float(t)  # right-dense interior
        if i + 1 < len(self.segments):
            return self.segments[i + 1][0]
        return hi  # inf of empty set := sup T

    def rho(self, t: float) -> float:
        """Backward jump: greatest scale element strictly less than t (t at the min)."""
        i = self._require(t)
        lo, hi = self.segments[i]
        if t > lo + _tol(t):
            return float(t)  # left-dense interior
        if i > 0:
            return self.segments[i - 1][1]
        return lo  # sup of empty set := inf T

    def graininess(self, t: float) -> float:
        """mu(t) = sigma(t) - t."""
        return self.sigma(t) - float(t)

    def graininess_array(self, times: np.ndarray) -> np.ndarray:
        """Vectorized graininess; every entry must lie in the scale."""
        ts = np.asarray(times, dtype=float)
        tol = MEMBERSHIP_RTOL * np.maximum(1.0, np.abs(ts))
        idx = np.searchsorted(self._los, ts + tol, side="right") - 1
        if np.any(idx < 0):
            bad = ts[idx < 0][0]
            raise TimeNotInScaleError(f"t={bad!r} is not in the time scale")
        lo = self._los[idx]
        hi = self._his[idx]
        inside = (ts >= lo - tol) & (ts <= hi + tol)
        if not np.all(inside):
            bad = ts[~inside][0]
            raise TimeNotInScaleError(f"t={bad!r} is not in the time scale")
        # "next segment start" of the last segment is its own hi: sigma(max) = max
        next_lo = np.append(self._los[1:], self._his[-1])
        sigma = np.where(ts < hi - tol, ts, next_lo[idx])
        return sigma - ts

    def sup_graininess(self) -> float:
        """Largest gap between consecutive segments (0 for a single interval)."""
        gaps = [self.segments[i + 1][0] - self.segments[i][1]
                for i in range(len(self.segments) - 1)]
        return max(gaps, default=0.0)

    def is_right_scattered(self, t: float) -> bool:
        return self.graininess(t) > 0

    def truncate(self, horizon: float) -> "TimeScale":
        """Restrict the scale to [t_min, horizon]."""
        if horizon < self.t_min - _tol(horizon):
            raise ValueError(f"horizon {horizon} precedes the scale start {self.t_min}")
        segs = []
        for lo, hi in self.segments:
            if lo > horizon + _tol(horizon):
                break
            segs.append((lo, min(hi, float(horizon))))
        return TimeScale(segs, translation_invariant_hint=self.translation_invariant_hint)

    # ------------------------------------------------------------------
    # grids
    # ------------------------------------------------------------------

    def grid(self, dense_step: float) -> list[tuple[float, float]]:
        """Strictly increasing (t, mu(t)) samples covering the whole scale.

        Isolated points appear once; each interval is subdivided into equal
        steps no longer than dense_step, endpoints included. The graininess
        attached to each sample is the true mu of the underlying scale.
        """
        if not (dense_step > 0):
            raise ValueError(f"dense_step must be positive, got {dense_step}")
        out: list[tuple[float, float]] = []
        nseg = len(self.segments)
        for i, (lo, hi) in enumerate(self.segments):
            gap = self.segments[i + 1][0] - hi if i + 1 < nseg else 0.0
            if hi == lo:
                out.append((lo, gap))
                continue
            n = max(1, math.ceil((hi - lo) / dense_step - 1e-9))
            pts = np.linspace(lo, hi, n + 1)
            for p in pts[:-1]:
                out.append((float(p), 0.0))
            out.append((hi, gap))
        return out

    # ------------------------------------------------------------------
    # literal syntax
    # ------------------------------------------------------------------

    def to_literal(self) -> str:
        parts = []
        for lo, hi in self.segments:
            if lo == hi:
                parts.append("{%s}" % _fmt(lo))
            else:
                parts.append("[%s,%s]" % (_fmt(lo), _fmt(hi)))
        return ";".join(parts)

    @classmethod
    def parse(cls, text: str) -> "TimeScale":
        return parse_timescale(text)


def _fmt(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_PIECE_RES = {
    "interval": re.compile(rf"^\[({_NUM})\s*,\s*({_NUM})\]$"),
    "point": re.compile(rf"^\{{({_NUM})\}}$"),
    "Z": re.compile(rf"^Z\[({_NUM})\s*,\s*({_NUM})\]$"),
    "hZ": re.compile(rf"^hZ\[({_NUM})\s*,\s*({_NUM})\s*,\s*({_NUM})\]$"),
    "qN": re.compile(rf"^q\^N\[({_NUM})\s*,\s*({_NUM})\s*,\s*(\d+)\]$"),
}


class TimeScaleSyntaxError(ValueError):
    """Malformed time-scale literal; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def parse_timescale(text: str) -> TimeScale:
    """Parse the literal syntax: semicolon-separated pieces.

    Pieces: ``[a,b]`` closed interval, ``{t}`` isolated point, and the
    shorthands ``Z[a,b]`` (unit lattice), ``hZ[a,b,h]``, ``q^N[q0,q,count]``
    (geometric lattice).
    """
    pieces = []
    pos = 0
    shorthand_kinds = []
    for raw in text.split(";"):
        piece = raw.strip()
        offset = pos + (len(raw) - len(raw.lstrip()))
        pos += len(raw) + 1
        if not piece:
            raise TimeScaleSyntaxError("empty piece in time-scale literal", offset)
        matched = False
        for kind, rx in _PIECE_RES.items():
            m = rx.match(piece)
            if not m:
                continue
            matched = True
            try:
                if kind == "interval":
                    lo, hi = float(m.group(1)), float(m.group(2))
                    if not hi > lo:
                        raise ValueError(f"interval needs lo < hi, got [{lo}, {hi}]")
                    pieces.append([(lo, hi)])
                elif kind == "point":
                    t = float(m.group(1))
                    pieces.append([(t, t)])
                elif kind == "Z":
                    sub = TimeScale.lattice(float(m.group(1)), float(m.group(2)), 1.0)
                    pieces.append(list(sub.segments))
                elif kind == "hZ":
                    sub = TimeScale.lattice(float(m.group(1)), float(m.group(2)),
                                            float(m.group(3)))
                    pieces.append(list(sub.segments))
                else:  # qN
                    sub = TimeScale.geometric(float(m.group(1)), float(m.group(2)),
                                              int(m.group(3)))
                    pieces.append(list(sub.segments))
            except ValueError as exc:
                raise TimeScaleSyntaxError(str(exc), offset) from exc
            shorthand_kinds.append(kind)
            break
        if not matched:
            raise TimeScaleSyntaxError(f"unrecognized time-scale piece {piece!r}", offset)
    segments = [seg for chunk in pieces for seg in chunk]
    # Pi != {0} holds (for the idealized infinite continuation) only for a
    # single arithmetic lattice or a single interval; unions and geometric
    # lattices are generally not translation invariant.
    hint = len(pieces) == 1 and shorthand_kinds[0] in ("interval", "Z", "hZ")
    try:
        return TimeScale(segments, translation_invariant_hint=hint)
    except ValueError as exc:
        raise TimeScaleSyntaxError(str(exc), 0) from exc


# ----------------------------------------------------------------------
# circle algebra
# ----------------------------------------------------------------------

def circle_plus(p: float, q: float, mu: float) -> float:
    """p (+) q = p + q + mu*p*q."""
    return p + q + mu * p * q


def circle_minus(p: float, q: float, mu: float) -> float:
    """p (-) q = (p - q) / (1 + mu*q); requires q regressive at this point."""
    denom = 1.0 + mu * q
    if abs(denom) <= REGRESSIVITY_ATOL:
        raise NotRegressiveError(f"1 + mu*q = {denom!r} with mu={mu}, q={q}")
    return (p - q) / denom


def circle_negate(p: TimeFunction | float, ts: TimeScale) -> TimeFunction:
    """Unary (-)p as a time function: t -> (0 (-) p(t)) with mu(t) from ts."""
    pf = _as_time_function(p)

    def neg(t):
        if np.ndim(t) == 0:
            return circle_minus(0.0, float(pf(float(t))), ts.graininess(float(t)))
        arr = np.asarray(t, dtype=float)
        mu = ts.graininess_array(arr)
        v = _eval_on(pf, arr)
        denom = 1.0 + mu * v
        if np.any(np.abs(denom) <= REGRESSIVITY_ATOL):
            raise NotRegressiveError("1 + mu*p vanished while negating")
        return -v / denom

    return neg


def _as_time_function(p: TimeFunction | float) -> TimeFunction:
    if callable(p):
        return p
    c = float(p)
    return lambda t: np.full_like(np.asarray(t, dtype=float), c) if np.ndim(t) else c


def _eval_on(p: TimeFunction, xs: np.ndarray) -> np.ndarray:
    """Evaluate p on an array, falling back to pointwise calls."""
    try:
        ys = np.asarray(p(xs), dtype=float)
        if ys.shape == xs.shape:
            return ys
    except Exception:
        pass
    return np.array([float(p(float(x))) for x in xs])


def is_positively_regressive(p: TimeFunction | float, ts: TimeScale,
                             dense_step: float) -> bool:
    """Finite-horizon check of 1 + mu(t)*p(t) > 0 over the grid."""
    pf = _as_time_function(p)
    pts = ts.grid(dense_step)
    times = np.array([t for t, _ in pts])
    mus = np.array([m for _, m in pts])
    vals = _eval_on(pf, times)
    return bool(np.all(1.0 + mus * vals > 0.0))


# ----------------------------------------------------------------------
# generalized exponential
# ----------------------------------------------------------------------

def _quad(pf: TimeFunction, a: float, b: float, q: QuadratureConfig,
          open_right: bool = False) -> float:
    """Integral of pf over the dense span [a, b].

    With open_right the last node is nudged just inside the span: rd-continuous
    integrands may jump exactly at a right-scattered b (mu-dependent functions
    such as (-)p do), and the dense integral needs their left limit there.
    """
    span = b - a
    if span <= 0:
        return 0.0
    n = max(1, math.ceil(span / q.dense_step - 1e-9))
    cell = span / n
    if q.rule == "midpoint":
        xs = a + (np.arange(n) + 0.5) * cell
        return float(np.sum(_eval_on(pf, xs)) * cell)
    if q.rule == "trapezoid":
        xs = np.linspace(a, b, n + 1)
        if open_right:
            xs[-1] = b - min(1e-9 * max(1.0, abs(b)), 0.5 * cell)
        ys = _eval_on(pf, xs)
        return float(cell * (np.sum(ys) - 0.5 * (ys[0] + ys[-1])))
    # simpson needs an even interval count
    if n % 2:
        n += 1
        cell = span / n
    xs = np.linspace(a, b, n + 1)
    if open_right:
        xs[-1] = b - min(1e-9 * max(1.0, abs(b)), 0.5 * cell)
    ys = _eval_on(pf, xs)
    return float(cell / 3.0 * (ys[0] + ys[-1] + 4.0 * np.sum(ys[1:-1:2]) + 2.0 * np.sum(ys[2:-1:2])))


def ts_exp(p: TimeFunction | float, t: float, t0: float, ts: TimeScale,
           quad: QuadratureConfig | None = None) -> float:
    """Generalized exponential e_p(t, t0) on the scale, for t >= t0.

    Accumulates (1 + mu(s)*p(s)) over right-scattered points and
    exp(integral of p) over dense spans; e_p(t0, t0) = 1.
    """
    quad = quad or QuadratureConfig()
    pf = _as_time_function(p)
    t = float(t)
    t0 = float(t0)
    ts._require(t)
    ts._require(t0)
    if t < t0 - _tol(t0):
        raise ValueError(f"ts_exp needs t >= t0, got t={t} < t0={t0}")

    acc = 1.0
    cur = t0
    while cur < t - _tol(t):
        i = ts._locate(cur)
        lo, hi = ts.segments[i]
        if cur < hi - _tol(cur):
            # dense span up to the interval end or to t, whichever first
            b = min(hi, t)
            jumps_after = b == hi and i + 1 < len(ts.segments)
            acc *= math.exp(_quad(pf, cur, b, quad, open_right=jumps_after))
            cur = b
        else:
            # right-scattered: jump to the next segment start
            nxt = ts.sigma(cur)
            mu = nxt - cur
            val = float(pf(cur))
            factor = 1.0 + mu * val
            if abs(factor) <= REGRESSIVITY_ATOL:
                raise NotRegressiveError(
                    f"p is not regressive at t={cur}: 1 + mu*p = {factor!r}")
            acc *= factor
            cur = nxt
    return acc


# ----------------------------------------------------------------------
# delta derivative
# ----------------------------------------------------------------------

def delta_derivative(f: TimeFunction, t: float, ts: TimeScale, h: float) -> float:
    """Delta derivative of f at t: exact quotient when right-scattered,
    finite difference (step <= h, constrained to the scale) when right-dense.
    """
    if not (h > 0):
        raise ValueError(f"h must be positive, got {h}")
    t = float(t)
    i = ts._require(t)
    lo, hi = ts.segments[i]
    mu = ts.graininess(t)
    if mu > 0:
        return (float(f(ts.sigma(t))) - float(f(t))) / mu
    if t >= ts.t_max - _tol(t) and ts.rho(t) < t - _tol(t):
        raise AtMaximumError(f"t={t} is the left-scattered maximum; not in T^kappa")
    # right-dense: differentiate inside the containing interval [lo, hi]
    hl = min(h, t - lo)
    hr = min(h, hi - t)
    if hl <= 0 and hr <= 0:
        raise AtMaximumError(f"no delta derivative at the degenerate point t={t}")
    if hl > 0 and hr > 0:
        step = min(hl, hr)
        return (float(f(t + step)) - float(f(t - step))) / (2.0 * step)
    if hr > 0:
        return (float(f(t + hr)) - float(f(t))) / hr
    return (float(f(t)) - float(f(t - hl))) / hl
