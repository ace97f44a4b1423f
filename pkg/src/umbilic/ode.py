"""Explicit Runge-Kutta machinery: adaptive Dormand-Prince 5(4) with event
location, and a fixed-step trajectory used for smooth dense evaluation.

Right-hand sides may raise :class:`~umbilic.errors.DomainError` at trial
stages; the adaptive driver treats that as a rejected step and shrinks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

__all__ = ["Event", "AdaptiveRun", "dopri_step", "integrate_adaptive", "FixedStepTrajectory"]

Rhs = Callable[[float, np.ndarray], np.ndarray]

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# 5th minus embedded 4th order weights; the 7th (FSAL) stage enters with -1/40.
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525)
_E7 = -1 / 40


def dopri_step(rhs: Rhs, s: float, y: np.ndarray, h: float):
    """One Dormand-Prince step; returns ``(y_new, error_estimate)``."""
    ks = []
    for c, row in zip(_C, _A):
        yi = y
        for a, k in zip(row, ks):
            yi = yi + (h * a) * k
        ks.append(np.asarray(rhs(s + c * h, yi), float))
    y_new = y + h * sum(b * k for b, k in zip(_B, ks))
    k7 = np.asarray(rhs(s + h, y_new), float)
    err = h * (sum(e * k for e, k in zip(_E, ks)) + _E7 * k7)
    return y_new, err


@dataclass
class Event:
    """Zero crossing of ``func(s, y)``.

    A terminal event stops integration at the crossing.  A non-terminal one
    is recorded; once it has fired more than ``limit`` times it stops the
    run with status ``limit_status``.
    """

    name: str
    func: Callable[[float, np.ndarray], float]
    terminal: bool = True
    limit: int | None = None
    limit_status: str = ""


@dataclass
class AdaptiveRun:
    s: list = field(default_factory=list)
    y: list = field(default_factory=list)
    status: str = "reached-end"
    events: list = field(default_factory=list)  # (name, index into s)
    steps_accepted: int = 0
    steps_rejected: int = 0
    last_error: Exception | None = None


def _locate(rhs, s, y, h, func, g0, xtol):
    """Bisection on the step fraction for a sign change of ``func`` inside
    the step ``(s, s + h)``; returns ``(s_root, y_root)``."""
    lo, hi = 0.0, 1.0
    y_hi = None
    while (hi - lo) * abs(h) > xtol:
        mid = 0.5 * (lo + hi)
        y_mid, _ = dopri_step(rhs, s, y, mid * h)
        g_mid = func(s + mid * h, y_mid)
        if g_mid == 0.0:
            return s + mid * h, y_mid
        if (g_mid > 0) == (g0 > 0):
            lo = mid
        else:
            hi, y_hi = mid, y_mid
    if y_hi is None:
        y_hi, _ = dopri_step(rhs, s, y, hi * h)
    return s + hi * h, y_hi


def integrate_adaptive(rhs: Rhs, s0: float, y0, s_end: float, tol: float,
                       events: Sequence[Event] = (), project=None,
                       classify_failure=None, max_steps: int = 200_000,
                       event_xtol: float = 1e-12) -> AdaptiveRun:
    """Integrate ``y' = rhs(s, y)`` from ``s0`` to ``s_end > s0``.

    ``project(s, y) -> y`` is applied to each accepted state.
    ``classify_failure(s, y, exc) -> status`` names the termination when the
    step size underflows after repeated domain errors.
    """
    if not s_end > s0:
        raise ValueError("s_end must exceed s0")
    if not tol > 0:
        raise ValueError("tol must be positive")
    y = np.asarray(y0, float).copy()
    s = float(s0)
    run = AdaptiveRun(s=[s], y=[y.copy()])
    counts = {ev.name: 0 for ev in events}
    g_prev = [ev.func(s, y) for ev in events]
    h = min(s_end - s, 1e-3)
    h_min = 1e-14 * max(1.0, abs(s0), abs(s_end))

    while s < s_end:
        if run.steps_accepted >= max_steps:
            run.status = "step-underflow"
            break
        h = min(h, s_end - s)
        try:
            y_new, err_vec = dopri_step(rhs, s, y, h)
            scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.max(np.abs(err_vec) / scale))
            if not math.isfinite(err):
                raise DomainError("non-finite step")
        except DomainError as exc:
            run.last_error = exc
            run.steps_rejected += 1
            h *= 0.25
            if h < h_min:
                run.status = classify_failure(s, y, exc) if classify_failure else "step-underflow"
                break
            continue

        if err > 1.0:
            run.steps_rejected += 1
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < h_min:
                run.status = "step-underflow"
                break
            continue

        # accepted: look for the earliest event in (s, s + h]
        try:
            g_new = [ev.func(s + h, y_new) for ev in events]
        except DomainError as exc:
            run.last_error = exc
            h *= 0.25
            continue
        hit = None
        for idx, ev in enumerate(events):
            if g_prev[idx] * g_new[idx] < 0.0:
                s_root, y_root = _locate(rhs, s, y, h, ev.func, g_prev[idx], event_xtol)
                if hit is None or s_root < hit[1]:
                    hit = (idx, s_root, y_root)
        if hit is not None:
            idx, s_root, y_root = hit
            if project is not None:
                y_root = project(s_root, y_root)
            ev = events[idx]
            counts[ev.name] += 1
            if s_root > s:
                run.s.append(s_root)
                run.y.append(y_root.copy())
            run.events.append((ev.name, len(run.s) - 1))
            stop = ev.terminal or (ev.limit is not None and counts[ev.name] > ev.limit)
            if stop:
                run.status = ev.name if ev.terminal else ev.limit_status
                run.steps_accepted += 1
                break
            # resume just past the root; its sign already matches g_new
            s, y = s_root, y_root
            g_prev = [e.func(s, y) for e in events]
            run.steps_accepted += 1
            continue

        s += h
        y = y_new if project is None else project(s, y_new)
        g_prev = g_new if project is None else [ev.func(s, y) for ev in events]
        run.s.append(s)
        run.y.append(y.copy())
        run.steps_accepted += 1
        h *= min(5.0, 0.9 * max(err, 1e-10) ** -0.2)
    return run


class FixedStepTrajectory:
    """Dense evaluation of an ODE solution by fixed-step Dormand-Prince
    (5th order) from a uniform node grid anchored at ``s0``.

    ``evaluate(s)`` takes one partial step from the node below ``s``; the
    result is smooth in ``s`` up to ``O(step^5)`` kinks at nodes, which keeps
    finite differences of the trajectory clean.
    """

    def __init__(self, rhs: Rhs, s0: float, y0, step: float = 2e-3):
        self.rhs = rhs
        self.s0 = float(s0)
        self.step = float(step)
        self._fwd = [np.asarray(y0, float).copy()]
        self._bwd = [self._fwd[0]]

    def _node(self, k: int) -> np.ndarray:
        nodes, sign = (self._fwd, 1.0) if k >= 0 else (self._bwd, -1.0)
        n = abs(k)
        while len(nodes) <= n:
            j = len(nodes) - 1
            s_j = self.s0 + sign * j * self.step
            y_next, _ = dopri_step(self.rhs, s_j, nodes[j], sign * self.step)
            nodes.append(y_next)
        return nodes[n]

    def evaluate(self, s: float) -> np.ndarray:
        u = (s - self.s0) / self.step
        k = math.floor(u) if u >= 0 else math.ceil(u)
        y_k = self._node(k)
        s_k = self.s0 + k * self.step
        if s == s_k:
            return y_k.copy()
        y, _ = dopri_step(self.rhs, s_k, y_k, s - s_k)
        return y
