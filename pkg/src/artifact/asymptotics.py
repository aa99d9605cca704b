"""Large-t predictions: log Q expansion, oscillatory amplitudes, Toda profiles,
residue corrections X(x, t), the log coefficient A(eta) and the q-PNG rate.

Throughout, theta(z) is the Jacobi theta function theta_00(z | i pi / K) and
primes are derivatives in z.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from . import equilibrium as eqm
from .elliptic import RectLattice, theta_derivs, weier
from .errors import RegimeError

DEFAULT_DELTA = 1e-3


@lru_cache(maxsize=512)
def _state(eta: float, x: float) -> eqm._TwoCutData:
    if eqm.regime(eta, x) != eqm.TWO_CUT:
        raise RegimeError(f"x={x} is not in the two-cut regime for eta={eta}")
    return eqm._TwoCutData.build(eta, x)


def _theta(z, K: float, order: int = 1) -> np.ndarray:
    return theta_derivs("00", z, K, order)


def _warn_boundary(eta: float, x: float, delta: float) -> None:
    xs = eqm.x_star(eta)
    if abs(x - xs) < delta or abs(2 - x) < delta:
        warnings.warn(f"x={x} is within {delta} of a phase transition; asymptotics are not uniform there",
                      RuntimeWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# amplitudes and predictions
# ---------------------------------------------------------------------------

def p_amplitudes(eta: float, x: float, t: float) -> tuple[float, float]:
    """(p0, p_plus), periodic in t with period 1/L."""
    st = _state(eta, x)
    K, tl, sh = st.K, t * st.L, eta / (2 * st.K)
    th = _theta(tl, K)
    p0 = st.U / (2 * K) * (th[1] / th[0]).real
    pp = math.exp(eta / 2 * (sh - 1)) * (_theta(tl + sh, K, 0)[0] / th[0]).real
    return float(p0), float(pp)


def p0_theta_form(eta: float, x: float, t: float) -> float:
    """p0 written with theta_11 ratios instead of U."""
    st = _state(eta, x)
    K, tl, sh = st.K, t * st.L, eta / (2 * st.K)
    t11 = theta_derivs("11", sh, K, 0)[0] / theta_derivs("11", 0.0, K, 1)[1]
    th = _theta(tl, K)
    return float((math.exp(eta / 2 * (sh - 1)) * t11 * th[1] / th[0]).real)


@dataclass(frozen=True)
class AsymptoticPrediction:
    t: float
    x: float
    eta: float
    regime: str
    leading: float
    theta_osc: float | None
    log_term: float | None
    predicted_log_beta: float
    predicted_alpha: float

    @property
    def log_Q(self) -> float:
        """Prediction for log Q without the unknown constant log C(x)."""
        return self.leading + (self.theta_osc or 0.0) + (self.log_term or 0.0)


def log_theta_osc(eta: float, x: float, t: float) -> float:
    st = _state(eta, x)
    return float(math.log(_theta(t * st.L, st.K, 0)[0].real))


def predict(eta: float, x: float, t: float, delta: float = DEFAULT_DELTA,
            with_log_term: bool = True) -> AsymptoticPrediction:
    """Asymptotic prediction for log Q(t, xt), log beta-hat and alpha-hat."""
    _warn_boundary(eta, x, delta)
    prof = eqm.profile(eta, x)
    lead = -t * t * float(prof.F)
    if prof.regime == eqm.ONE_CUT:
        return AsymptoticPrediction(t, x, eta, prof.regime, lead, None, None,
                                    x * t * eta - eta / 2, -t * math.expm1(-eta))
    if prof.regime == eqm.VKLS:
        return AsymptoticPrediction(t, x, eta, prof.regime, 0.0, None, None, 0.0, 0.0)
    p0, pp = p_amplitudes(eta, x, t)
    osc = log_theta_osc(eta, x, t)
    logt = a_coefficient(eta) * math.log(t) if with_log_term else None
    return AsymptoticPrediction(t, x, eta, prof.regime, lead, osc, logt,
                                float(t * eta * (x + prof.L) + math.log(pp)), float(t * (1 + prof.g1) + p0))


def bessel_tail(eta: float, x: float, t: float) -> float:
    """Predicted log P(b_1 <= x t) for the positive-temperature process, up to log C(x)."""
    if x > 2:
        return 0.0
    return predict(eta, x, t).log_Q


# ---------------------------------------------------------------------------
# Toda profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TodaAsym:
    y1: float
    y0: float
    a0: float
    b0: float


def toda_profiles(eta: float, x: float, t: float, delta: float = DEFAULT_DELTA) -> TodaAsym:
    _warn_boundary(eta, x, delta)
    reg = eqm.regime(eta, x)
    if reg == eqm.ONE_CUT:
        return TodaAsym(-eta * x, eta / 2, math.exp(-eta / 2), 0.0)
    if reg == eqm.VKLS:
        return TodaAsym(0.0, 0.0, 1.0, 0.0)
    st = _state(eta, x)
    K, tl, sh = st.K, t * st.L, eta / (2 * st.K)
    th0 = _theta(tl, K)
    thp = _theta(tl + sh, K)
    thm = _theta(tl - sh, K, 0)
    y1 = -eta * (x + st.L)
    y0 = eta / 2 - eta**2 / (4 * K) - math.log((thp[0] / th0[0]).real)
    a0 = math.exp(-eta / 2 + eta**2 / (4 * K)) * math.sqrt((thp[0] * thm[0]).real) / th0[0].real
    b0 = st.U / (2 * K) * (eta + (thp[1] / thp[0]).real - (th0[1] / th0[0]).real)
    return TodaAsym(float(y1), float(y0), float(a0), float(b0))


# ---------------------------------------------------------------------------
# residues and X(x, t)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EndpointCoefficients:
    T: float
    S: float
    A_coef: float
    B_coef: float
    C_coef: float
    res11: complex


@dataclass(frozen=True)
class ResidueData:
    a: EndpointCoefficients
    b: EndpointCoefficients
    c: EndpointCoefficients
    d: EndpointCoefficients
    X: float
    X_imag: float

    def __getitem__(self, key: str) -> EndpointCoefficients:
        return getattr(self, key)


def _chi(w: complex, K: float, tl: float) -> tuple[complex, complex, complex]:
    """chi(w) = theta_11(w/2K - tL)/theta_11(w/2K) with its first two w-derivatives."""
    u = w / (2 * K)
    N = theta_derivs("11", u - tl, K, 2)
    D = theta_derivs("11", u, K, 2)
    f = N[0] / D[0]
    f1 = (N[1] - f * D[1]) / D[0]
    f2 = (N[2] - 2 * f1 * D[1] - f * D[2]) / D[0]
    s = 1 / (2 * K)
    return complex(f), complex(f1 * s), complex(f2 * s * s)


def _endpoint_static(st: eqm._TwoCutData) -> dict[str, tuple[float, float, float, float, float]]:
    """(T, S, A, B, C) per endpoint; independent of t."""
    a, b, c, d = st.endpoints()
    pts = {"a": a, "b": b, "c": c, "d": d}
    K, eta, U = st.K, st.eta, st.U
    lat = RectLattice(K)
    h = eta / 2
    wmap = {"a": K, "b": K + 1j * np.pi, "c": 1j * np.pi, "d": 0.0}
    out = {}
    for name, z0 in pts.items():
        others = [v for k, v in pts.items() if k != name]
        T = float(np.prod([abs(z0 - z) ** 0.5 for z in others]))
        S = (1 if name in "ac" else -1) / 6 * sum(1 / (z0 - z) for z in others)
        w = wmap[name]
        C = (-st.r * eta + weier("zeta", h + w, lat) + weier("zeta", h - w, lat)).real
        wpp = (weier("wp_prime", h + w, lat) + weier("wp_prime", h - w, lat)).real
        A = 8 * U / (3 * T) * C
        B = 8 * U / (5 * T) * (S * C - 2 * U**2 / (3 * T**2) * wpp)
        out[name] = (T, float(S), float(A), float(B), float(C))
    return out


@lru_cache(maxsize=512)
def _static_cached(eta: float, x: float):
    return _endpoint_static(_state(eta, x))


def residues(eta: float, x: float, t: float) -> ResidueData:
    """Endpoint coefficients, (1,1) residues and X(x, t).

    Each residue is the w-plane Laurent coefficient of the (1,1) entry of the
    local Airy correction; signs were fixed against a direct contour
    integral in the uniformizing variable (see tests/oracles.py).
    """
    st = _state(eta, x)
    a, b, c, d = st.endpoints()
    K, m, tl = st.K, st.U, t * st.L
    stat = _static_cached(eta, x)
    h = eta / 2
    ip = 1j * np.pi
    w1 = h - K + ip
    w2 = -h + K + ip
    pref = 1 / (_chi(h - w1, K, tl)[0] * _chi(-h - w2, K, tl)[0])
    osc = np.exp(-2j * np.pi * tl)

    def pair(shift):
        return _chi(shift - w1, K, tl), _chi(shift - w2, K, tl)

    def bracket(shift, T, quad_coef, sq, paren):
        (c1, d1, e1), (c2, d2, e2) = pair(shift)
        return (m / (18 * T) * (d1 * c2 - c1 * d2)
                + quad_coef * m**2 / (36 * T) * (5 * e1 * c2 + 14 * d1 * d2 + 5 * c1 * e2)
                + sq / 144 * paren * c1 * c2)

    res = {}
    T, S, A, B, C = stat["d"]
    res["d"] = pref / A * bracket(
        0.0, T, -1 / (d - b), math.sqrt((d - a) * (d - c) / (d - b)),
        10 * B / A - 5 / (d - a) + 5 / (d - b) - 5 / (d - c) + 14 * (d - b) / ((d - a) * (d - c)))
    T, S, A, B, C = stat["a"]
    res["a"] = pref / A * bracket(
        K, T, 1 / (c - a), -math.sqrt((b - a) * (d - a) / (c - a)),
        10 * B / A + 5 / (a - b) - 5 / (a - c) + 5 / (a - d) + 14 * (c - a) / ((b - a) * (d - a)))
    T, S, A, B, C = stat["b"]
    res["b"] = osc * pref / A * bracket(
        ip + K, T, 1 / (d - b), math.sqrt((b - a) * (c - b) / (d - b)),
        -10 * B / A + 5 / (b - a) + 5 / (b - c) - 5 / (b - d) - 14 * (d - b) / ((b - a) * (c - b)))
    T, S, A, B, C = stat["c"]
    res["c"] = osc * pref / A * bracket(
        ip, T, -1 / (c - a), math.sqrt((c - b) * (d - c) / (c - a)),
        10 * B / A - 5 / (c - a) + 5 / (c - b) + 5 / (c - d) + 14 * (c - a) / ((c - b) * (d - c)))
    X = -1 / 24 + sum(res.values())
    coeffs = {k: EndpointCoefficients(*stat[k], complex(res[k])) for k in "abcd"}
    return ResidueData(X=float(X.real), X_imag=float(X.imag), **coeffs)


def X_of(eta: float, x: float, t: float) -> float:
    return residues(eta, x, t).X


@lru_cache(maxsize=64)
def a_coefficient(eta: float, nodes: int = 64, t0: float = 0.0) -> float:
    """A(eta) = -2 L(0) times the integral of X(0, tau) over one period."""
    st = _state(eta, 0.0)
    period = 1 / abs(st.L)
    u, wts = np.polynomial.legendre.leggauss(nodes)
    taus = t0 + period * (u + 1) / 2
    vals = np.array([X_of(eta, 0.0, tau) for tau in taus])
    mean = float(np.dot(wts, vals)) / 2
    return -2 * mean


# ---------------------------------------------------------------------------
# q-PNG lower tail
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiMinusResult:
    value: float
    argmax_y: float


def phi_minus(q: float, mu: float) -> PhiMinusResult:
    """Phi_-(mu) = max_y F(y) - (eta/2)(mu - y)^2 with eta = -log q.

    The objective is strictly concave in y on the two-cut interval (F'' < eta),
    so the maximizer solves L(y) = -mu there.
    """
    if not 0 < q < 1:
        raise eqm.DomainError("q must lie in (0, 1)")
    eta = -math.log(q)
    if not 0 <= mu <= 2:
        warnings.warn(f"mu={mu} lies outside [0, 2]", RuntimeWarning, stacklevel=2)
    if mu < 0:
        # the objective grows linearly as y -> -infinity
        return PhiMinusResult(math.inf, -math.inf)
    xs = eqm.x_star(eta)

    def obj(y):
        return eqm.rate_function(eta, y) - eta / 2 * (mu - y) ** 2

    if mu >= 2:
        return PhiMinusResult(0.0, mu)
    if mu == 0:
        # flat on y <= x_*, where F(y) = eta y^2/2 + 1 - e^{-eta}
        return PhiMinusResult(obj(xs), xs)
    lo, hi = xs + 1e-12, 2 - 1e-12
    y = optimize.brentq(lambda v: eqm.L_of_x(eta, v) + mu, lo, hi, xtol=1e-14)
    return PhiMinusResult(obj(y), y)
