"""Equilibrium measure, implicit half-period and rate function.

Regimes in the rescaled position x = s/t:

* ``OneCutLeft`` (x <= x_*): rescaled arcsine-type density, F quadratic.
* ``TwoCut`` (x_* < x < 2): two bands (a, b), (c, d) with saturated
  regions on (-inf, a) and (b, c); the lattice half-period K = K(x) solves
  U(K) V(K) = -eta x / 2.
* ``VKLS`` (x >= 2): the unconstrained limit shape, F = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import fft, integrate, optimize

from . import elliptic as ell
from .elliptic import RectLattice, theta_logderiv, weier
from .errors import ConvergenceError, DomainError, RegimeError

ONE_CUT = "OneCutLeft"
TWO_CUT = "TwoCut"
VKLS = "VKLS"
JUNCTION_TOL = 1e-12
ETA_MAX = 120.0


def _check_eta(eta: float) -> None:
    if not np.isfinite(eta) or eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")


def x_star(eta: float) -> float:
    """Left critical position -2(1 - e^{-eta})/eta."""
    _check_eta(eta)
    return -2.0 * (-np.expm1(-eta)) / eta


def regime(eta: float, x: float) -> str:
    xs = x_star(eta)
    if x <= xs + JUNCTION_TOL:
        return ONE_CUT
    if x >= 2.0 - JUNCTION_TOL:
        return VKLS
    return TWO_CUT


# ---------------------------------------------------------------------------
# U, V and the implicit half-period
# ---------------------------------------------------------------------------

def _check_K(eta: float, K: float) -> RectLattice:
    _check_eta(eta)
    if not K > eta / 2:
        raise DomainError(f"need K > eta/2, got K={K}, eta={eta}")
    return RectLattice(K)


def u_of_K(eta: float, K: float, form: str = "weier") -> float:
    """U(K); ``form`` selects the sigma ("weier") or theta ("theta") expression."""
    lat = _check_K(eta, K)
    if form == "theta" or eta > 100:
        t0 = ell.theta_derivs("11", eta / (2 * K), K, 0)[0]
        t1 = ell.theta_derivs("11", 0.0, K, 1)[1]
        return float(np.real(2 * K * np.exp(eta / 2 * (eta / (2 * K) - 1)) * t0 / t1))
    r = lat.zeta_ipi_ratio
    return float(np.real(np.exp(-eta / 2 - r * eta**2 / 2) * weier("sigma", eta, lat)))


def v_of_K(eta: float, K: float) -> float:
    lat = _check_K(eta, K)
    r = lat.zeta_ipi_ratio
    z = weier("zeta", eta, lat).real
    wp = weier("wp", eta, lat).real
    return 1.0 + K * ((z - eta * r) ** 2 - wp + 2 * r)


def uv_of_K(eta: float, K: float) -> float:
    return u_of_K(eta, K) * v_of_K(eta, K)


def solve_K(eta: float, x: float) -> float:
    """Unique K in (eta/2, inf) with U(K) V(K) = -eta x / 2."""
    _check_eta(eta)
    xs = x_star(eta)
    if not xs < x < 2:
        raise RegimeError(f"x={x} outside the two-cut interval ({xs}, 2)")
    if eta > ETA_MAX:
        raise DomainError(f"two-cut solver supports eta <= {ETA_MAX} (double-precision overflow)")
    target = -eta * x / 2

    def f(K):
        return uv_of_K(eta, K) - target

    off = 1e-8
    lo = eta / 2 * (1 + off)
    while f(lo) >= 0:
        off *= 1e-2
        if off < 1e-15:
            raise ConvergenceError("cannot bracket K near eta/2")
        lo = eta / 2 * (1 + off)
    hi = max(eta, 4.0)
    while f(hi) <= 0:
        hi *= 2
        if hi > 400:
            raise ConvergenceError("cannot bracket K: x too close to x_*")
    return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


# ---------------------------------------------------------------------------
# two-cut quantities at fixed K
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _TwoCutData:
    eta: float
    x: float
    K: float
    U: float
    V: float
    r: float
    zeta_eta: float
    zeta_half: float
    wp_eta: float

    @classmethod
    def build(cls, eta: float, x: float, K: float | None = None) -> "_TwoCutData":
        if K is None:
            K = solve_K(eta, x)
        lat = RectLattice(K)
        r = lat.zeta_ipi_ratio
        return cls(eta, x, K, u_of_K(eta, K), v_of_K(eta, K), r,
                   weier("zeta", eta, lat).real, weier("zeta", eta / 2, lat).real,
                   weier("wp", eta, lat).real)

    @property
    def lattice(self) -> RectLattice:
        return RectLattice(self.K)

    @property
    def L(self) -> float:
        return -(self.eta * self.x / 2 + self.U) / self.K

    @property
    def L_alt(self) -> float:
        return self.U * (self.V - 1) / self.K

    def F(self) -> float:
        eta, K, U, x = self.eta, self.K, self.U, self.x
        return (1 + eta / 2 * (1 - eta / (2 * K)) * x**2 - 3 * eta * U / (4 * K) * x
                - U**2 * (self.wp_eta + self.lattice.zeta_K_ratio))

    def F_theta(self) -> float:
        eta, K, U, x = self.eta, self.K, self.U, self.x
        l2 = theta_logderiv("11", eta / (2 * K), K, 2).real / (4 * K**2)
        return 1 + eta / 2 * (1 - eta / (2 * K)) * x**2 - 3 * eta * U / (4 * K) * x + U**2 * l2

    @property
    def z0(self) -> float:
        return self.r * self.eta - 2 * self.zeta_eta

    def g1(self) -> float:
        return -self.U**2 * (self.wp_eta + self.r - (self.V - 1) / (2 * self.K))

    def g_inf(self) -> float:
        return self.eta * self.U / 2 * (self.z0 + 2 * self.zeta_half + (self.V - 1) / self.K)

    def ell(self) -> float:
        return self.eta * self.U * (self.z0 + 2 * self.zeta_half + 2 * self.V / self.eta)

    def endpoints(self) -> tuple[float, float, float, float]:
        lat, h, K, U = self.lattice, self.eta / 2, self.K, self.U
        ip = 1j * np.pi

        def zs(w):
            return (weier("zeta", h + w, lat) + weier("zeta", h - w, lat)).real

        return (U * (self.z0 + zs(K)), U * (self.z0 + zs(K + ip)),
                U * (self.z0 + zs(ip)), U * (self.z0 + 2 * self.zeta_half))

    def endpoints_theta(self) -> tuple[float, float, float, float]:
        eta, K, U = self.eta, self.K, self.U
        shift = eta / 2 + theta_logderiv("11", eta / (2 * K), K).real
        u = eta / (4 * K)
        return tuple(U / K * (theta_logderiv(k, u, K).real - shift)
                     for k in ("01", "00", "10", "11"))


# ---------------------------------------------------------------------------
# profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquilibriumProfile:
    eta: float
    x: float
    regime: str
    xStar: float
    K: float | None
    U: float
    V: float
    L: float
    endpoints: tuple[float, float, float, float] | None
    F: float
    dF: float
    d2F: float
    g1: float
    gInf: float
    ell: float


def profile(eta: float, x: float) -> EquilibriumProfile:
    """All x-dependent equilibrium data at (eta, x)."""
    _check_eta(eta)
    xs = x_star(eta)
    reg = regime(eta, x)
    if reg == ONE_CUT:
        u = -np.expm1(-eta)
        return EquilibriumProfile(
            eta, x, reg, xs, None, u, 1.0, 0.0, None,
            eta * x**2 / 2 + u, eta * x, eta, -np.exp(-eta), eta * np.exp(-eta / 2),
            eta * (2 * np.exp(-eta / 2) - x))
    if reg == VKLS:
        return EquilibriumProfile(eta, x, reg, xs, None, 0.0, 1.0, -x, None,
                                  0.0, 0.0, 0.0, -1.0, 0.0, 0.0)
    d = _TwoCutData.build(eta, x)
    L = d.L
    return EquilibriumProfile(
        eta, x, reg, xs, d.K, d.U, d.V, L, d.endpoints(), d.F(),
        eta * (x + L), eta * (1 - eta / (2 * d.K)), d.g1(), d.g_inf(), d.ell())


def rate_function(eta: float, x: float) -> float:
    return profile(eta, x).F


def L_of_x(eta: float, x: float) -> float:
    """L(x): zero for x <= x_*, -x for x >= 2."""
    reg = regime(eta, x)
    if reg == ONE_CUT:
        return 0.0
    if reg == VKLS:
        return -x
    return _TwoCutData.build(eta, x).L


def rate_function_integral(eta: float, x: float, epsabs: float = 1e-12) -> float:
    """F from the integral of L; one K-solve per quadrature node."""
    xs = x_star(eta)
    base = eta * xs**2 / 2 - np.expm1(-eta)
    if x <= xs:
        return eta * x**2 / 2 - np.expm1(-eta)
    if x >= 2:
        return 0.0
    val, _ = integrate.quad(lambda y: L_of_x(eta, y), xs, x, epsabs=epsabs, epsrel=1e-12, limit=200)
    return base + eta * ((x**2 - xs**2) / 2 + val)


def endpoints(eta: float, x: float, form: str = "weier") -> tuple[float, float, float, float]:
    """(a, b, c, d) in the two-cut regime."""
    if regime(eta, x) != TWO_CUT:
        raise RegimeError("endpoints are defined only for x_* < x < 2")
    d = _TwoCutData.build(eta, x)
    return d.endpoints_theta() if form == "theta" else d.endpoints()


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensitySample:
    mu: float
    rho: float
    h: float


def rho_vkls(mu):
    mu = np.asarray(mu, dtype=float)
    inside = np.arccos(np.clip(mu / 2, -1, 1)) / np.pi
    return np.where(mu <= -2, 1.0, np.where(mu >= 2, 0.0, inside))


class TwoCutDensity:
    """Band density from the endpoint data by quadrature."""

    def __init__(self, eta: float, x: float, abcd: Sequence[float] | None = None):
        self.eta, self.x = eta, x
        self.a, self.b, self.c, self.d = abcd if abcd is not None else endpoints(eta, x)

    def R(self, mu):
        a, b, c, d = self.a, self.b, self.c, self.d
        return np.sqrt(np.abs((mu - a) * (mu - b) * (mu - c) * (mu - d)))

    def tail(self, mu: float) -> float:
        a, b, c, d = self.a, self.b, self.c, self.d

        def f(s):
            nu = d + s * s
            return 2.0 / (np.sqrt((nu - a) * (nu - b) * (nu - c)) * (nu - mu))

        v1, _ = integrate.quad(f, 0, 1, epsabs=1e-14, epsrel=1e-12, limit=200)
        v2, _ = integrate.quad(f, 1, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
        return v1 + v2

    def band_cd(self, mu: float) -> float:
        """Integral over (c, d) of 1/(R(nu)(nu - mu)); principal value inside."""
        a, b, c, d = self.a, self.b, self.c, self.d
        m, hw = (c + d) / 2, (d - c) / 2

        def phi(nu):
            return 1.0 / np.sqrt((nu - a) * (nu - b))

        if c < mu < d:
            p0 = phi(mu)
            dp = -0.5 * p0 * (1 / (mu - a) + 1 / (mu - b))

            def f(th):
                nu = m + hw * np.cos(th)
                dnu = nu - mu
                if abs(dnu) < 1e-9 * hw:
                    return dp
                return (phi(nu) - p0) / dnu
        else:
            def f(th):
                nu = m + hw * np.cos(th)
                return phi(nu) / (nu - mu)
        val, _ = integrate.quad(f, 0, np.pi, epsabs=1e-14, epsrel=1e-12, limit=200)
        return val

    def bracket(self, mu: float) -> float:
        """(1/pi)(tail - eta/(2 pi) band integral)."""
        return (self.tail(mu) - self.eta / (2 * np.pi) * self.band_cd(mu)) / np.pi

    def rho(self, mu: float) -> float:
        a, b, c, d = self.a, self.b, self.c, self.d
        if mu < a or b <= mu <= c:
            return 1.0
        if mu >= d:
            return 0.0
        if mu <= b:
            return 1.0 + self.R(mu) * self.bracket(mu)
        return 1.0 - self.R(mu) * self.bracket(mu)


def density(eta: float, x: float, mu: float) -> DensitySample:
    """Equilibrium density rho_{eta,x}(mu)."""
    reg = regime(eta, x)
    if reg == VKLS:
        rho = float(rho_vkls(mu))
    elif reg == ONE_CUT:
        rho = float(rho_vkls(np.exp(eta / 2) * mu))
    else:
        rho = TwoCutDensity(eta, x).rho(mu)
    return DensitySample(mu, rho, rho - (1.0 if mu <= 0 else 0.0))


def density_parametric(eta: float, K: float, u, band: str = "cd"):
    """(mu, rho) on a band from the elliptic uniformization.

    On (c, d): mu = z(i u), u in [0, pi] runs from d to c.
    On (a, b): mu = z(K + i u), u in [0, pi] runs from a to b.
    Accepts scalar or array ``u``.
    """
    lat = RectLattice(K)
    U = u_of_K(eta, K)
    r = lat.zeta_ipi_ratio
    h = eta / 2
    u = np.asarray(u, dtype=float)
    zh = weier("zeta", h, lat).real
    d = U * (r * eta - 2 * weier("zeta", eta, lat).real + 2 * zh)
    w = 1j * u if band == "cd" else K + 1j * u
    mu = (d - 2 * U * zh + U * weier("zeta", h - w, lat) + U * weier("zeta", h + w, lat)).real
    if band == "cd":
        rho = (-eta * r * u + 2 * np.angle(weier("sigma", h + 1j * u, lat))) / np.pi
    else:
        s1 = weier("sigma", K - h + 1j * u, lat)
        rho = 1 + (1 + r * (2 * K - eta)) * u / np.pi - 2 * np.angle(s1) / np.pi
    return mu, rho


# ---------------------------------------------------------------------------
# logarithmic energy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    quadrature_error: float


class _Band:
    """A band parametrized by u in [0, pi] with mu(u) monotone.

    mu(u) is an even trigonometric series and rho(u) is a linear term plus
    an odd one, so both are spectrally accurate in u.
    """

    def __init__(self, mu_cos: np.ndarray, rho_lin: tuple[float, float], rho_sin: np.ndarray):
        self.mu_cos = np.asarray(mu_cos, dtype=float)
        self.rho_lin = rho_lin
        self.rho_sin = np.asarray(rho_sin, dtype=float)
        ends = self.mu(np.array([0.0, np.pi]))
        self.lo, self.hi = float(ends.min()), float(ends.max())

    @classmethod
    def from_samples(cls, mu_fn: Callable, rho_fn: Callable, rho_lin: tuple[float, float],
                     n: int = 128) -> "_Band":
        u = np.pi * (np.arange(n) + 0.5) / n
        mu, rho = mu_fn(u), rho_fn(u)
        cm = fft.dct(mu, type=2) / n
        cm[0] /= 2
        lin = rho_lin[0] + (rho_lin[1] - rho_lin[0]) * u / np.pi
        cs = fft.dst(rho - lin, type=2) / n
        cs[-1] /= 2
        return cls(cm, rho_lin, cs)

    def mu(self, u):
        k = np.arange(len(self.mu_cos))
        return np.cos(np.multiply.outer(u, k)) @ self.mu_cos

    def dmu(self, u):
        k = np.arange(len(self.mu_cos))
        return -np.sin(np.multiply.outer(u, k)) @ (k * self.mu_cos)

    def rho(self, u):
        k = np.arange(1, len(self.rho_sin) + 1)
        lin = self.rho_lin[0] + (self.rho_lin[1] - self.rho_lin[0]) * np.asarray(u) / np.pi
        return lin + np.sin(np.multiply.outer(u, k)) @ self.rho_sin

    def weight(self, u):
        """(rho - 1) |d mu / d u|."""
        return (self.rho(u) - 1.0) * np.abs(self.dmu(u))

    def u_of(self, mu: float) -> float:
        return optimize.brentq(lambda v: self.mu(v) - mu, 0.0, np.pi, xtol=1e-15)


@dataclass
class HalfComplemented:
    """h = rho - 1_{mu <= 0} written as 1_{(0, top)} plus (rho - 1) on each band."""

    top: float
    bands: list[_Band] = field(default_factory=list)

    @property
    def breakpoints(self) -> list[float]:
        pts = {0.0, self.top}
        for bd in self.bands:
            pts.update((bd.lo, bd.hi))
        return sorted(pts)

    def __call__(self, mu: float) -> float:
        val = 1.0 if 0 < mu < self.top else 0.0
        for bd in self.bands:
            if bd.lo < mu < bd.hi:
                val += float(bd.rho(bd.u_of(mu))) - 1.0
        return val

    def _band_points(self, bd: _Band, mus) -> list[float] | None:
        pts = [bd.u_of(m) for m in mus if bd.lo < m < bd.hi]
        return sorted(pts) or None

    def log_potential(self, mu: float) -> float:
        """P(mu) = integral of log|mu - nu| h(nu) d nu."""

        def G(v):
            return v * np.log(abs(v)) - v if v != 0 else 0.0

        val = G(mu) - G(mu - self.top)
        for bd in self.bands:
            def f(u, bd=bd):
                return np.log(abs(mu - bd.mu(u)) + 1e-300) * bd.weight(u)

            v, _ = integrate.quad(f, 0, np.pi, points=self._band_points(bd, [mu]),
                                  epsabs=1e-11, epsrel=1e-10, limit=200)
            val += v
        return val


def _one_cut_band(w: float) -> _Band:
    # mu = w cos u and rho = u / pi exactly
    return _Band(np.array([0.0, w]), (0.0, 1.0), np.zeros(1))


def half_complemented(eta: float, x: float, n: int = 128) -> HalfComplemented:
    reg = regime(eta, x)
    if reg in (ONE_CUT, VKLS):
        w = 2.0 if reg == VKLS else 2.0 * np.exp(-eta / 2)
        return HalfComplemented(w, [_one_cut_band(w)])
    K = solve_K(eta, x)
    bands = []
    for name, lin in (("ab", (1.0, 1.0)), ("cd", (0.0, 1.0))):
        bands.append(_Band.from_samples(
            lambda u, nm=name: density_parametric(eta, K, u, nm)[0],
            lambda u, nm=name: density_parametric(eta, K, u, nm)[1], lin, n))
    return HalfComplemented(bands[1].hi, bands)


def potential(eta: float, x: float, mu, weight: float | None = None):
    """External potential weight * [mu - x]_+ (weight defaults to eta)."""
    w = eta if weight is None else weight
    return w * np.maximum(np.asarray(mu, dtype=float) - x, 0.0)


def _outer_integral(hc: HalfComplemented, g: Callable[[float], float]) -> tuple[float, float]:
    """Integral of g(mu) h(mu) d mu over the support of h."""
    pts = [p for p in hc.breakpoints if 0 < p < hc.top]
    total, err = integrate.quad(g, 0, hc.top, points=pts or None, epsabs=1e-9, epsrel=1e-9,
                                limit=400)
    for bd in hc.bands:
        def f(u, bd=bd):
            return g(float(bd.mu(u))) * float(bd.weight(u))

        v, e = integrate.quad(f, 0, np.pi, points=hc._band_points(bd, hc.breakpoints),
                              epsabs=1e-9, epsrel=1e-9, limit=400)
        total, err = total + v, err + e
    return total, err


def energy(eta: float, x: float, hc: HalfComplemented | None = None,
           weight: float | None = None) -> EnergyEstimate:
    """Logarithmic energy of the half-complemented equilibrium density.

    E = -int int log|mu - nu| h h + int (2 mu (log|mu| - 1) + V(mu)) h.
    """
    if hc is None:
        hc = half_complemented(eta, x)

    def ext(mu):
        lg = np.log(abs(mu)) if mu != 0 else 0.0
        return 2 * mu * (lg - 1) + float(potential(eta, x, mu, weight))

    pair, e1 = _outer_integral(hc, hc.log_potential)
    lin, e2 = _outer_integral(hc, ext)
    return EnergyEstimate(-pair + lin, e1 + e2)


def variational_check(eta: float, x: float, grid: Sequence[float], tol: float = 5e-3,
                      weight: float | None = None) -> list[tuple[float, float, str]]:
    """Effective potential minus its band value ell - 2 g_inf, with the zone of each point."""
    reg = regime(eta, x)
    if reg == VKLS:
        raise RegimeError("variational check is provided for x < 2")
    prof = profile(eta, x)
    hc = half_complemented(eta, x)
    if reg == TWO_CUT:
        a, b, c, d = prof.endpoints
        bands = [(a, b), (c, d)]
        saturated = [(-np.inf, a), (b, c)]
    else:
        w = 2 * np.exp(-eta / 2)
        bands, saturated = [(-w, w)], [(-np.inf, -w)]
    robin = prof.ell - 2 * prof.gInf
    out = []
    for mu in grid:
        lg = np.log(abs(mu)) if mu != 0 else 0.0
        lhs = -2 * hc.log_potential(mu) + 2 * mu * (lg - 1) + float(potential(eta, x, mu, weight))
        if any(lo < mu < hi for lo, hi in bands):
            zone = "band"
        elif any(lo < mu < hi for lo, hi in saturated):
            zone = "saturated"
        else:
            zone = "void"
        out.append((float(mu), float(lhs - robin), zone))
    return out
