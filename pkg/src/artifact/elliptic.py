"""Jacobi theta functions and Weierstrass functions on the rectangular lattice.

The lattice has half-periods ``K > 0`` and ``i*pi``.  Theta functions use the
modulus ``tau = i*pi/K``; the theta kinds follow the shift convention

    th00(z) = sum_n exp(2 pi i n z + i pi n^2 tau)
    th10(z) = th00(z + 1/2)
    th01(z) = exp(i pi (z + tau/4)) th00(z + tau/2)
    th11(z) = i exp(i pi (z + tau/4)) th00(z + (1 + tau)/2)

Two series representations are used.  For ``K <= pi`` theta is summed
directly in the nome ``exp(-pi^2/K)`` and the Weierstrass functions use the
trigonometric expansions in ``exp(-2 pi^2/K)``.  For ``K > pi`` theta goes
through the imaginary transformation (nome ``exp(-K)``) and the Weierstrass
functions use the hyperbolic expansions in ``exp(-2K)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Literal

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

ThetaKind = Literal["00", "01", "10", "11"]
WeierKind = Literal["sigma", "zeta", "wp", "wp_prime"]

SEAM = np.pi
POLE_RADIUS = 1e-10
_TOL = 1e-16
_MAX_TERMS = 10000


def _series_sum(term, start: int = 1) -> float:
    """Sum term(n) for n >= start until two consecutive terms are negligible."""
    total = 0.0
    small = 0
    for n in range(start, start + _MAX_TERMS):
        t = term(n)
        total += t
        if abs(t) <= _TOL * max(abs(total), 1e-300):
            small += 1
            if small == 2:
                return total
        else:
            small = 0
    raise ConvergenceError("series did not converge within the iteration cap")


@dataclass(frozen=True)
class RectLattice:
    """Half-period pair (K, i*pi)."""

    K: float

    def __post_init__(self):
        if not np.isfinite(self.K) or self.K <= 0:
            raise DomainError(f"half-period K must be positive, got {self.K}")

    @property
    def tau(self) -> complex:
        return 1j * np.pi / self.K

    @property
    def nome_small(self) -> float:
        return float(np.exp(-np.pi**2 / self.K))

    @property
    def nome_dual(self) -> float:
        return float(np.exp(-self.K))

    @property
    def trig_branch(self) -> bool:
        return self.K <= SEAM

    @cached_property
    def zeta_ipi_ratio(self) -> float:
        return zeta_ipi_ratio(self)

    @cached_property
    def zeta_K_ratio(self) -> float:
        """zeta(K)/K, from the Legendre relation."""
        return self.zeta_ipi_ratio + 0.5 / self.K

    @cached_property
    def invariants(self) -> tuple[float, float]:
        """(g2, g3) from the Eisenstein q-series of the active branch."""
        return _invariants(self.K, trig=self.trig_branch)

    @property
    def g2(self) -> float:
        return self.invariants[0]

    @property
    def g3(self) -> float:
        return self.invariants[1]


def _as_lattice(lattice) -> RectLattice:
    return lattice if isinstance(lattice, RectLattice) else RectLattice(float(lattice))


def _check_finite(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite argument")
    return z


def _scalar_or_array(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


# ---------------------------------------------------------------------------
# theta functions
# ---------------------------------------------------------------------------

# kind -> (constant term, half-integer frequencies, alternating sign, odd)
_THETA_SHAPE = {
    "00": (1.0, False, False, False),
    "10": (1.0, False, True, False),
    "01": (0.0, True, False, False),
    "11": (0.0, True, True, True),
}
# characteristic (a, b): th(z+1) = (-1)^b th(z), th(z+tau) = (-1)^a (...) th(z)
_TAG_SIGNS = {"00": (0, 0), "01": (0, 1), "10": (1, 0), "11": (1, 1)}
_DUAL_KIND = {"00": "00", "01": "10", "10": "01", "11": "11"}


def _direct_series(kind: str, z: np.ndarray, p: float, kmax: int) -> list[np.ndarray]:
    """Derivatives 0..kmax of th_kind(z) with nome exp(-p), paired into cos/sin."""
    const, half, alt, odd = _THETA_SHAPE[kind]
    nterms = int(np.ceil(1.5 + np.sqrt(60.0 / p))) + 2
    n = np.arange(1, nterms + 1, dtype=float)
    nu = n - 0.5 if half else n
    amp = np.exp(-p * nu**2)
    if alt:
        amp = amp * (-1.0) ** (n - 1 if half else n)
    if kind == "11":
        amp = amp * 1j
    omega = (2.0 * np.pi) * nu
    arg = np.multiply.outer(z, omega)
    cos_, sin_ = np.cos(arg), np.sin(arg)
    out = []
    for k in range(kmax + 1):
        fac = amp * (1j * omega) ** k
        # e^{i w z} + s (-1)^k e^{-i w z}, s = -1 for the odd kind
        sign = (-1 if odd else 1) * (-1) ** k
        basis = 2.0 * cos_ if sign == 1 else 2j * sin_
        val = basis @ fac
        if k == 0:
            val = val + const
        mags = np.abs(fac) * np.exp(np.abs(np.multiply.outer(z.imag, omega)))
        scale = np.max(mags, axis=-1) + (abs(const) if k == 0 else 0.0)
        if np.any(mags[..., -1] > 1e-17 * scale):
            raise ConvergenceError("theta series truncation too coarse for argument")
        out.append(val)
    return out


def _theta_reduced(kind: str, z: np.ndarray, K: float, kmax: int,
                   transform: bool | None = None) -> list[np.ndarray]:
    """Theta derivatives for |Re z| <= 1/2, |Im z| <= pi/(2K)."""
    if transform is None:
        transform = K > SEAM
    if not transform:
        return _direct_series(kind, z, np.pi**2 / K, kmax)
    # imaginary transformation: th(z|tau) = c sqrt(K/pi) e^{-K z^2} th'(i K z/pi | iK/pi)
    scale = 1j * K / np.pi
    inner = _direct_series(_DUAL_KIND[kind], scale * z, K, kmax)
    c = -1j if kind == "11" else 1.0
    p0 = c * np.sqrt(K / np.pi) * np.exp(-K * z**2)
    pref = [p0, -2 * K * z * p0, (4 * K**2 * z**2 - 2 * K) * p0,
            (-8 * K**3 * z**3 + 12 * K**2 * z) * p0]
    h = [scale**j * inner[j] for j in range(kmax + 1)]
    return [sum(comb(k, j) * pref[k - j] * h[j] for j in range(k + 1)) for k in range(kmax + 1)]


def theta_derivs(kind: ThetaKind, z, K: float, kmax: int = 2,
                 transform: bool | None = None) -> list:
    """Values and z-derivatives up to order kmax (<= 3) of th_kind(z | i pi/K).

    ``transform`` forces (True) or forbids (False) the imaginary
    transformation; by default it is used when K > pi.
    """
    if kind not in _THETA_SHAPE:
        raise DomainError(f"unknown theta kind {kind!r}")
    if not 0 <= kmax <= 3:
        raise DomainError("derivative order must be in 0..3")
    z = _check_finite(z)
    a, b = _TAG_SIGNS[kind]
    n1 = np.round(z.real)
    z1 = z - n1
    im_tau = np.pi / K
    m = np.round(z1.imag / im_tau)
    z0 = z1 - 1j * m * im_tau
    g = _theta_reduced(kind, z0, K, kmax, transform)
    sign = np.where((a * m + b * n1) % 2 == 0, 1.0, -1.0)
    env = sign * np.exp(-np.pi**2 * m**2 / K - 2j * np.pi * m * z1)
    lam = -2j * np.pi * m
    return [env * sum(comb(k, j) * lam ** (k - j) * g[j] for j in range(k + 1))
            for k in range(kmax + 1)]


def theta(kind: ThetaKind, z, lattice, deriv_order: int = 0):
    """Theta function of the given kind (or its z-derivative) at modulus i*pi/K."""
    if deriv_order not in (0, 1, 2):
        raise DomainError("deriv_order must be 0, 1 or 2")
    lat = _as_lattice(lattice)
    return _scalar_or_array(theta_derivs(kind, z, lat.K, deriv_order)[deriv_order])


def theta_logderiv(kind: ThetaKind, z, K: float, order: int = 1):
    """d^order/dz^order log th_kind(z), order in {1, 2}."""
    d = theta_derivs(kind, z, K, order)
    l1 = d[1] / d[0]
    if order == 1:
        return _scalar_or_array(l1)
    return _scalar_or_array(d[2] / d[0] - l1**2)


# ---------------------------------------------------------------------------
# Weierstrass functions
# ---------------------------------------------------------------------------

def zeta_ipi_ratio(lattice) -> float:
    """zeta(i pi)/(i pi) for half-periods (K, i pi); real."""
    K = _as_lattice(lattice).K
    if K > SEAM:
        s = _series_sum(lambda n: np.sinh(n * K) ** -2.0)
        return -1.0 / 12.0 + 0.5 * s
    s = _series_sum(lambda n: np.sinh(n * np.pi**2 / K) ** -2.0)
    c = np.pi**2 / (12 * K**2) - np.pi**2 / (2 * K**2) * s
    return c - 0.5 / K


def _invariants(K: float, trig: bool) -> tuple[float, float]:
    if trig:
        w1, lq = K, -2 * np.pi**2 / K
    else:
        w1, lq = 1j * np.pi, -2 * K
    s3 = _series_sum(lambda n: n**3 * np.exp(n * lq) / -np.expm1(n * lq))
    s5 = _series_sum(lambda n: n**5 * np.exp(n * lq) / -np.expm1(n * lq))
    g2 = np.pi**4 / (12 * w1**4) * (1 + 240 * s3)
    g3 = np.pi**6 / (216 * w1**6) * (1 - 504 * s5)
    return float(np.real(g2)), float(np.real(g3))


def _route_params(lat: RectLattice, route: str):
    """(omega1, log nome, zeta(omega1)/omega1) for the trig or hyperbolic route."""
    if route == "trig":
        return lat.K, -2 * np.pi**2 / lat.K, lat.zeta_K_ratio
    return 1j * np.pi, -2 * lat.K, lat.zeta_ipi_ratio


def _series_weier(kind: str, z: np.ndarray, lat: RectLattice, route: str) -> np.ndarray:
    w1, lq, e1r = _route_params(lat, route)
    nterms = int(np.ceil(80.0 / -lq)) + 4
    n = np.arange(1, nterms + 1, dtype=float)
    qn = np.exp(n * lq)
    u = np.pi * z / (2 * w1)
    if kind == "sigma":
        cz = np.cos(np.pi * z / w1)
        fac = (1 - 2 * np.multiply.outer(cz, qn) + qn**2) / (1 - qn) ** 2
        return (2 * w1 / np.pi) * np.exp(e1r * z**2 / 2) * np.sin(u) * np.prod(fac, axis=-1)
    arg = np.multiply.outer(np.pi * z / w1, n)
    lam = qn / -np.expm1(n * lq)
    if kind == "zeta":
        return e1r * z + (np.pi / (2 * w1)) / np.tan(u) + (2 * np.pi / w1) * (np.sin(arg) @ lam)
    if kind == "wp":
        return (-e1r + (np.pi**2 / (4 * w1**2)) / np.sin(u) ** 2
                - (2 * np.pi**2 / w1**2) * (np.cos(arg) @ (n * lam)))
    if kind == "wp_prime":
        return (-(np.pi**3 / (4 * w1**3)) * np.cos(u) / np.sin(u) ** 3
                + (2 * np.pi**3 / w1**3) * (np.sin(arg) @ (n**2 * lam)))
    raise DomainError(f"unknown Weierstrass kind {kind!r}")


def _theta_weier(kind: str, z: np.ndarray, lat: RectLattice) -> np.ndarray:
    K, c = lat.K, lat.zeta_K_ratio
    u = z / (2 * K)
    if kind == "sigma":
        d0 = theta_derivs("11", u, K, 0)[0]
        t1 = theta_derivs("11", 0.0, K, 1)[1]
        return 2 * K * np.exp(c * z**2 / 2) * d0 / t1
    d = theta_derivs("11", u, K, 3)
    l1 = d[1] / d[0]
    l2 = d[2] / d[0] - l1**2
    l3 = d[3] / d[0] - 3 * d[2] * d[1] / d[0] ** 2 + 2 * l1**3
    if kind == "zeta":
        return c * z + l1 / (2 * K)
    if kind == "wp":
        return -c - l2 / (4 * K**2)
    if kind == "wp_prime":
        return -l3 / (8 * K**3)
    raise DomainError(f"unknown Weierstrass kind {kind!r}")


def weier(kind: WeierKind, z, lattice, route: str | None = None):
    """Weierstrass sigma, zeta, wp or wp' with half-periods (K, i pi).

    ``route`` forces a representation: "trig", "hyp" or "theta".  By default
    the series representation is chosen by comparing K with the seam pi.
    """
    lat = _as_lattice(lattice)
    z = _check_finite(z)
    auto = route is None
    if auto:
        route = "trig" if lat.trig_branch else "hyp"
    if route not in ("trig", "hyp", "theta"):
        raise DomainError(f"unknown route {route!r}")
    K = lat.K
    m = np.round(z.real / (2 * K))
    n = np.round(z.imag / (2 * np.pi))
    z0 = z - 2 * K * m - 2j * np.pi * n
    if kind != "sigma" and np.any(np.abs(z0) < POLE_RADIUS):
        raise PoleError("argument within the pole guard radius of a lattice point")
    if auto and route == "hyp" and np.max(np.abs(z0.real)) * (np.ceil(40.0 / K) + 4) > 600:
        route = "theta"  # hyperbolic terms would overflow before the nome damps them
    if route == "theta":
        val = _theta_weier(kind, z0, lat)
    else:
        val = _series_weier(kind, z0, lat, route)
    eta_shift = 2 * m * K * lat.zeta_K_ratio + 2j * np.pi * n * lat.zeta_ipi_ratio
    if kind == "zeta":
        val = val + eta_shift
    elif kind == "sigma":
        shift = 2 * K * m + 2j * np.pi * n
        eps = np.where((m + n + m * n) % 2 == 0, 1.0, -1.0)
        val = eps * np.exp(eta_shift * (z0 + shift / 2)) * val
    return _scalar_or_array(val)


def wp_second(z, lattice):
    """wp'' from the differential equation wp'' = 6 wp^2 - g2/2."""
    lat = _as_lattice(lattice)
    return 6 * weier("wp", z, lat) ** 2 - lat.g2 / 2


def weier_dK(kind: Literal["log_sigma", "zeta", "wp"], z, lattice):
    """Derivative in K at fixed z of log sigma, zeta or wp."""
    lat = _as_lattice(lattice)
    z = _check_finite(z)
    r, g2 = lat.zeta_ipi_ratio, lat.g2
    zt = weier("zeta", z, lat)
    wp = weier("wp", z, lat)
    if kind == "log_sigma":
        return wp - zt**2 - g2 * z**2 / 12 + 2 * r * (z * zt - 1)
    wpp = weier("wp_prime", z, lat)
    if kind == "zeta":
        return wpp + 2 * zt * wp - g2 * z / 6 + 2 * r * (zt - z * wp)
    if kind == "wp":
        wp2 = 6 * wp**2 - g2 / 2
        return -wp2 + 2 * wp**2 - 2 * zt * wpp + g2 / 6 + 2 * r * (2 * wp + z * wpp)
    raise DomainError(f"unknown kind {kind!r}")


def zeta_ipi_dK(lattice) -> float:
    """d/dK of zeta(i pi), which is purely imaginary; returns the imaginary part."""
    lat = _as_lattice(lattice)
    r = lat.zeta_ipi_ratio
    val = 2 * (1j * np.pi * r) ** 2 / (1j * np.pi) - 1j * np.pi / 6 * lat.g2
    return float(val.imag)
