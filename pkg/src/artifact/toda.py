"""Cylindrical Toda checks on Fredholm data and a Flaschka-variable integrator.

y(t, s) = log Q(t, s) - log Q(t, s-1) solves

    y_tt + y_t / t = 4 (exp(y(s+1) - y(s)) - exp(y(s) - y(s-1))),

and the Flaschka variables a = exp((y(s+1) - y(s))/2), b = y_t / 2 solve

    a_t = a (b(s+1) - b(s)),    b_t = 2 (a(s)^2 - a(s-1)^2) - b / t.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import asymptotics as asy
from . import kernels
from .errors import DomainError, NumericalBreakdownError


@lru_cache(maxsize=4096)
def _logq(t: float, s: int, eta: float) -> float:
    if t == 0:
        return kernels.log_Q_closed_t0(s, eta)
    return kernels.log_Q(t, s, eta, tol=1e-12).logQ


def y_from_Q(t: float, s: int, eta: float) -> float:
    if t < 0:
        raise DomainError("t must be nonnegative")
    return _logq(t, s, eta) - _logq(t, s - 1, eta)


def y_initial(s, eta: float):
    """y(0, s) for the Q above; the empty partition gives log(1 + exp(-eta (s - 1/2)))."""
    return np.logaddexp(0.0, -eta * (np.asarray(s, dtype=float) - 0.5))


@dataclass(frozen=True)
class TodaResidual:
    t: float
    s: int
    h: float
    residual: float


def toda_residual(t: float, s: int, eta: float, h: float) -> TodaResidual:
    """|LHS - RHS| of the cylindrical Toda equation with centered t-differences."""
    if not t > h > 0:
        raise DomainError("need t > h > 0")
    ym, y0, yp = (y_from_Q(tt, s, eta) for tt in (t - h, t, t + h))
    if max(abs(yp - y0), abs(y0 - ym)) < 1e-12 and abs(y0) > 1e-12:
        warnings.warn("t-differences of y are at roundoff level", RuntimeWarning, stacklevel=2)
    lhs = (yp - 2 * y0 + ym) / h**2 + (yp - ym) / (2 * h * t)
    rhs = 4 * (math.exp(y_from_Q(t, s + 1, eta) - y0) - math.exp(y0 - y_from_Q(t, s - 1, eta)))
    return TodaResidual(t, s, h, abs(lhs - rhs))


@dataclass(frozen=True)
class FlaschkaState:
    t: float
    s_range: tuple[int, int]
    a: np.ndarray
    b: np.ndarray

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.s_range[0], self.s_range[1] + 1)


def flaschka(t: float, s_range: tuple[int, int], eta: float, dt: float | None = None) -> FlaschkaState:
    """Flaschka variables from log Q; b uses a centered t-difference with step t*1e-3."""
    lo, hi = s_range
    ss = range(lo - 1, hi + 2)
    lq = np.array([_logq(t, s, eta) for s in ss])
    a = np.exp((lq[2:] - 2 * lq[1:-1] + lq[:-2]) / 2)
    if t == 0:
        return FlaschkaState(t, (lo, hi), a, np.zeros_like(a))
    dt = t * 1e-3 if dt is None else dt
    yp = np.diff([_logq(t + dt, s, eta) for s in range(lo - 1, hi + 1)])
    ym = np.diff([_logq(t - dt, s, eta) for s in range(lo - 1, hi + 1)])
    return FlaschkaState(t, (lo, hi), a, (yp - ym) / (4 * dt))


def _rhs(t: float, a: np.ndarray, b: np.ndarray, a_left: float) -> tuple[np.ndarray, np.ndarray]:
    b_next = np.append(b[1:], 0.0)
    a_prev = np.insert(a[:-1], 0, a_left)
    return a * (b_next - b), 2 * (a**2 - a_prev**2) - b / t


def integrate_flaschka(t0: float, t1: float, s_range: tuple[int, int], eta: float,
                       dt: float = 1e-3, initial: FlaschkaState | None = None) -> FlaschkaState:
    """Classical RK4 for the Flaschka system on a truncated window.

    Outside the window a is pinned to exp(-eta/2) on the left and 1 on the
    right, b to 0; the window should contain the light cone of the data.
    """
    if t0 <= 0:
        raise DomainError("t0 must be positive; the friction term is singular at t = 0")
    st = initial if initial is not None else flaschka(t0, s_range, eta)
    a, b = st.a.copy(), st.b.copy()
    a_left = math.exp(-eta / 2)
    n = max(1, int(round((t1 - t0) / dt)))
    h = (t1 - t0) / n
    t = t0
    for _ in range(n):
        k1 = _rhs(t, a, b, a_left)
        k2 = _rhs(t + h / 2, a + h / 2 * k1[0], b + h / 2 * k1[1], a_left)
        k3 = _rhs(t + h / 2, a + h / 2 * k2[0], b + h / 2 * k2[1], a_left)
        k4 = _rhs(t + h, a + h * k3[0], b + h * k3[1], a_left)
        a = a + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        b = b + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        t += h
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(a > 0)):
            raise NumericalBreakdownError(f"Flaschka integration blew up at t={t:.6g}; reduce dt")
    return FlaschkaState(t1, tuple(s_range), a, b)


@dataclass(frozen=True)
class ProfileComparison:
    t: float
    s: int
    x_realized: float
    a: float
    a0: float
    b: float
    b0: float

    @property
    def a_error(self) -> float:
        return abs(self.a - self.a0)

    @property
    def b_error(self) -> float:
        return abs(self.b - self.b0)


def compare_profiles(eta: float, x: float, t: float) -> ProfileComparison:
    """Fredholm Flaschka variables at s = round(x t) against their large-t profiles."""
    s = int(round(x * t))
    st = flaschka(t, (s, s), eta)
    prof = asy.toda_profiles(eta, s / t, t)
    return ProfileComparison(t, s, s / t, float(st.a[0]), prof.a0, float(st.b[0]), prof.b0)
