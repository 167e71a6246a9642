"""Bounded almost periodic signals for exogenous contact rates.

A signal is a constant plus a finite trigonometric sum, optionally clamped.
Almost periodicity is only ever verified approximately, on a finite horizon,
by scanning for epsilon-translation numbers on a sample grid; relative
density over the whole line is not decidable in finite time, so callers get
the found translation numbers plus an empirical inclusion-length estimate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AlmostPeriodicSignal:
    """c0 + sum of a*sin(w*t + phase) terms, optionally clamped to [lo, hi]."""

    c0: float
    terms: tuple[tuple[float, float, float], ...] = ()
    clamp: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms",
                           tuple((float(a), float(w), float(ph)) for a, w, ph in self.terms))
        for a, w, ph in self.terms:
            if not (w > 0):
                raise ValueError(f"term frequencies must be positive, got {w}")
        if self.clamp is not None:
            lo, hi = self.clamp
            if not (lo <= hi):
                raise ValueError(f"clamp needs lo <= hi, got ({lo}, {hi})")
            object.__setattr__(self, "clamp", (float(lo), float(hi)))

    def __call__(self, t):
        """Evaluate at a scalar time or an ndarray of times."""
        ts = np.asarray(t, dtype=float)
        val = np.full_like(ts, self.c0, dtype=float)
        for a, w, ph in self.terms:
            val = val + a * np.sin(w * ts + ph)
        if self.clamp is not None:
            val = np.clip(val, self.clamp[0], self.clamp[1])
        return float(val) if np.ndim(t) == 0 else val

    def analytic_bounds(self) -> tuple[float, float]:
        """Conservative envelope guaranteed to contain every value.

        Amplitude envelope [c0 - sum|a|, c0 + sum|a|], pushed through the
        clamp when one is set.
        """
        amp = sum(abs(a) for a, _, _ in self.terms)
        lo, hi = self.c0 - amp, self.c0 + amp
        if self.clamp is not None:
            clo, chi = self.clamp
            lo = min(max(lo, clo), chi)
            hi = min(max(hi, clo), chi)
        return lo, hi


def epsilon_translation_numbers(sig: AlmostPeriodicSignal, eps: float,
                                horizon: float, search_window: float,
                                sample_step: float) -> list[float]:
    """Translation numbers tau with sup_t |sig(t+tau) - sig(t)| < eps.

    Both t (over [0, horizon]) and tau (over (0, search_window]) run on a
    grid of pitch sample_step. Finite-horizon, sampled surrogate of the
    epsilon-translation set: no completeness claim, and an empty result
    usually just means the window is too small.
    """
    if not (eps > 0 and horizon > 0 and search_window > 0 and sample_step > 0):
        raise ValueError("eps, horizon, search_window and sample_step must be positive")
    n_t = int(np.floor(horizon / sample_step + 1e-9)) + 1
    n_tau = int(np.floor(search_window / sample_step + 1e-9))
    base_t = np.arange(n_t) * sample_step
    base_vals = sig(base_t)
    taus = (np.arange(n_tau) + 1) * sample_step
    found = []
    # chunk the tau axis to keep the (tau, t) evaluation matrix modest
    chunk = max(1, int(2_000_000 / max(1, n_t)))
    for start in range(0, n_tau, chunk):
        block = taus[start:start + chunk]
        shifted = sig(block[:, None] + base_t[None, :])
        worst = np.max(np.abs(shifted - base_vals[None, :]), axis=1)
        found.extend(block[worst < eps].tolist())
    return found


def inclusion_length_estimate(taus: list[float]) -> float:
    """Largest gap between consecutive found translation numbers (0 included).

    Empirical stand-in for the inclusion length l(eps); infinity when the
    search found nothing.
    """
    if not taus:
        return float("inf")
    pts = np.sort(np.asarray(taus, dtype=float))
    gaps = np.diff(np.concatenate(([0.0], pts)))
    return float(np.max(gaps))


_SIGNAL_TERM = re.compile(
    r"^\s*([-+]?[\d.eE+-]+)\s*\*\s*sin\(\s*([-+]?[\d.eE+-]+)\s*\*\s*t\s*"
    r"(?:([+-])\s*([\d.eE+-]+)\s*)?\)\s*$")


def parse_signal(text: str) -> AlmostPeriodicSignal:
    """Parse ``c0 + a1*sin(w1*t + p1) + ...`` into a signal (no clamp).

    The leading constant is optional; each sine term needs an explicit
    amplitude and frequency, the phase defaults to 0.
    """
    # split on +/- at depth 0 (outside parentheses), keeping signs
    parts: list[str] = []
    depth = 0
    cur = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip() and not cur.rstrip().endswith(("e", "E", "*", "(")):
            parts.append(cur)
            cur = ch
            continue
        cur += ch
    if cur.strip():
        parts.append(cur)

    c0 = 0.0
    terms = []
    for part in parts:
        piece = part.strip()
        if not piece:
            continue
        sign = 1.0
        if piece[0] in "+-":
            sign = -1.0 if piece[0] == "-" else 1.0
            piece = piece[1:].strip()
        if "sin" in piece:
            m = _SIGNAL_TERM.match(piece)
            if not m:
                raise ValueError(f"cannot parse signal term {part.strip()!r}")
            a = sign * float(m.group(1))
            w = float(m.group(2))
            ph = 0.0
            if m.group(4) is not None:
                ph = float(m.group(4))
                if m.group(3) == "-":
                    ph = -ph
            terms.append((a, w, ph))
        else:
            try:
                c0 += sign * float(piece)
            except ValueError as exc:
                raise ValueError(f"cannot parse signal constant {part.strip()!r}") from exc
    return AlmostPeriodicSignal(c0=c0, terms=tuple(terms))


def parse_clamp(text: str) -> tuple[float, float]:
    """Parse ``[lo, hi]`` clamp bounds."""
    m = re.match(r"^\s*\[\s*([-+\d.eE]+)\s*,\s*([-+\d.eE]+)\s*\]\s*$", text)
    if not m:
        raise ValueError(f"cannot parse clamp {text!r}; expected [lo, hi]")
    lo, hi = float(m.group(1)), float(m.group(2))
    if lo > hi:
        raise ValueError(f"clamp needs lo <= hi, got ({lo}, {hi})")
    return lo, hi
