"""Bessel rows, discrete Bessel kernels and log Fredholm determinants log Q(t, s).

Indices i, j are half-integers.  The discrete Bessel kernel is the
projection K = B B^T with B[i, l] = J_{i+l-1/2}(2t), l >= 1, and the
completeness relation sum_{l in Z} J_{i+l-1/2} J_{j+l-1/2} = delta_ij gives
I - K = B' B'^T over l <= 0.  Both determinant modes exploit this to write
I - H as M M^T, so log det(I - H) = 2 sum log|R_kk| from a QR factorization
of M^T and no subtractive cancellation occurs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import count

import numpy as np

from .errors import ConvergenceError, DomainError, NumericalBreakdownError, PrecisionError

FERMI = "fermi_weighted"
POS_TEMP = "positive_temperature"
MODES = (FERMI, POS_TEMP)
_DECADES = 12 * math.log(10)


# ---------------------------------------------------------------------------
# Bessel values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BesselTable:
    arg: float
    max_order: int
    values: np.ndarray

    def __call__(self, m):
        """J_m for integer m (array-like), zero beyond the table."""
        m = np.asarray(m)
        am = np.abs(m)
        out = np.zeros(m.shape)
        ok = am <= self.max_order
        vals = self.values[np.where(ok, am, 0)]
        sign = np.where((m < 0) & (am % 2 == 1), -1.0, 1.0)
        out[ok] = (sign * vals)[ok]
        return out


def bessel_row(arg: float, max_order: int) -> BesselTable:
    """J_0(arg) .. J_max_order(arg) by Miller's backward recurrence."""
    if not arg >= 0 or not np.isfinite(arg):
        raise DomainError(f"Bessel argument must be nonnegative, got {arg}")
    if max_order < 0:
        raise DomainError("max_order must be nonnegative")
    if arg == 0:
        vals = np.zeros(max_order + 1)
        vals[0] = 1.0
        return BesselTable(0.0, max_order, vals)
    top = max(max_order, math.ceil(arg)) + 40
    top += top % 2  # even start keeps the normalization sum aligned
    vals = np.zeros(top + 2)
    vals[top] = 1e-300
    norm = 0.0
    for m in range(top, 0, -1):
        vals[m - 1] = 2 * m / arg * vals[m] - vals[m + 1]
        if abs(vals[m - 1]) > 1e250:
            vals[m - 1:] *= 1e-250
            norm *= 1e-250
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm += 2 * vals[m - 1]
    norm += vals[0]
    return BesselTable(float(arg), max_order, vals[: max_order + 1] / norm)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def fermi_weight(z, eta: float):
    """1/(1 + e^{-eta z}) without overflow."""
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(eta * z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _check_half_integer(*vals: float) -> None:
    for v in vals:
        if abs((v - 0.5) - round(v - 0.5)) > 1e-12:
            raise DomainError(f"index {v} is not a half-integer")


def _bessel_tail_order(t: float) -> int:
    """Order beyond which J_m(2t) is negligible in double precision."""
    return math.ceil(2 * t + 8 * t ** (1 / 3) + 30)


def discrete_bessel(i: float, j: float, t: float) -> float:
    """Discrete Bessel kernel K(i, j; t) for half-integers i, j."""
    _check_half_integer(i, j)
    if t <= 0:
        raise DomainError("t must be positive")
    ii, jj = int(round(i - 0.5)), int(round(j - 0.5))  # integer orders i - 1/2, j - 1/2
    top = max(abs(ii), abs(jj)) + _bessel_tail_order(t) + 2
    J = bessel_row(2 * t, top)
    if ii != jj:
        return float(t * (J(ii) * J(jj + 1) - J(ii + 1) * J(jj)) / (i - j))
    m = np.arange(ii + 1, max(ii + 1, _bessel_tail_order(t)) + 1)
    terms = J(m) ** 2
    return float(np.sum(terms[terms > 1e-36])) if terms.size else 0.0


def pos_temp_kernel(i: float, j: float, t: float, eta: float, offset: float = 0.0) -> float:
    """Positive-temperature kernel sum_l J_{i+l-1/2} J_{j+l-1/2} / (1 + e^{-(l - offset) eta}).

    With ``offset = 1/2`` the restriction to indices > s has Fredholm
    determinant Q(t, s).
    """
    _check_half_integer(i, j)
    if t <= 0 or eta <= 0:
        raise DomainError("t and eta must be positive")
    ii, jj = int(round(i - 0.5)), int(round(j - 0.5))
    tail = _bessel_tail_order(t)
    lmin = -max(ii, jj) - tail
    lmax = max(math.ceil(40 / eta), tail - min(ii, jj))
    ell = np.arange(lmin, lmax + 1)
    J = bessel_row(2 * t, max(abs(ii), abs(jj)) + abs(lmin) + abs(lmax) + 2)
    return float(np.sum(J(ii + ell) * J(jj + ell) * fermi_weight(ell - offset, eta)))


# ---------------------------------------------------------------------------
# Fredholm determinants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelWindow:
    lo: float
    size: int
    t: float
    s: int
    eta: float
    mode: str


@dataclass(frozen=True)
class FredholmResult:
    logQ: float
    window: KernelWindow
    tail_bound: float
    min_pivot: float


def _logdet_from_rows(M: np.ndarray) -> tuple[float, float]:
    """log det(M M^T) and its smallest pivot, via QR of M^T."""
    if M.shape[0] == 0:
        return 0.0, 1.0
    R = np.linalg.qr(M.T, mode="r")
    piv = np.abs(np.diag(R)) ** 2
    if not np.all(np.isfinite(piv)) or np.any(piv <= 0):
        raise NumericalBreakdownError("nonpositive pivot in the kernel factorization")
    return float(np.sum(np.log(piv))), float(piv.min())


def _window_matrix(t: float, s: int, eta: float, lo: int, hi: int, mode: str) -> np.ndarray:
    """Rows M with I - H = M M^T on half-integers lo + 1/2 .. hi - 1/2."""
    tail = _bessel_tail_order(t)
    if mode == FERMI:
        rows = np.arange(lo, hi) + 0.5
        orders_i = rows - 0.5
        ell = np.arange(-(hi - 1) - tail, 1)  # l <= 0 block of the completeness split
        orders = np.add.outer(orders_i.astype(int), ell)
        Bbar = bessel_row(2 * t, int(np.abs(orders).max()))(orders)
        sig = fermi_weight(rows - s, eta)
        dvec = fermi_weight(s - rows, eta)
        M = np.hstack([np.diag(np.sqrt(dvec)), np.sqrt(sig)[:, None] * Bbar])
        return M[::-1, ::-1]  # this elimination order is markedly less sensitive to roundoff
    rows = np.arange(max(lo, s), hi) + 0.5  # restriction to i > s
    orders_i = (rows - 0.5).astype(int)
    # small eigenvalues of I - K_eta live on l up to about hi - s
    lmax = max(hi - s, 0) + math.ceil(40 / eta) + 1
    lmin = -(hi - 1) - tail if rows.size == 0 else -int(orders_i.max()) - tail
    lmin = min(lmin, -int(orders_i.min()) - tail) if rows.size else lmin
    ell = np.arange(lmin, lmax + 1)
    orders = np.add.outer(orders_i, ell)
    B = bessel_row(2 * t, int(np.abs(orders).max()) if orders.size else 0)(orders)
    # Q's weight sits at half-integers xi - s, so the Fermi factor is shifted by 1/2
    return B * np.sqrt(fermi_weight(0.5 - ell, eta))[None, :]


def log_Q(t: float, s: int, eta: float, mode: str = FERMI, tol: float = 1e-10,
          max_doublings: int = 6) -> FredholmResult:
    """log Q(t, s) as a Fredholm determinant on an adaptively doubled window."""
    if not t >= 0 or not np.isfinite(t):
        raise DomainError(f"t must be nonnegative, got {t}")
    if eta <= 0:
        raise DomainError("eta must be positive")
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    if int(s) != s:
        raise DomainError("s must be an integer")
    s = int(s)
    left = math.ceil(_DECADES / eta) + 1
    right = 8 * t ** (1 / 3) + 10
    prev = None
    for _ in range(max_doublings + 1):
        hi = math.ceil(2 * t + right)
        lo = min(s - left, hi - 1)
        M = _window_matrix(t, s, eta, lo, hi, mode)
        val, pmin = _logdet_from_rows(M)
        if pmin < 1e-290:
            raise PrecisionError("pivot underflow", safe_limit=_safe_t(t, s, eta, mode, tol))
        floor = 4e-12 * max(1.0, abs(val))  # roundoff level of Bessel rows and QR
        if prev is not None and abs(val - prev) < max(tol, floor):
            win = KernelWindow(lo + 0.5, hi - lo, t, s, eta, mode)
            return FredholmResult(val, win, abs(val - prev), pmin)
        prev = val
        left *= 2
        right *= 2
    if t <= 1:
        raise ConvergenceError("window doubling did not converge")
    raise PrecisionError(
        f"log Q(t={t}, s={s}) is not resolvable in double precision at tol {tol:g}",
        safe_limit=_safe_t(t, s, eta, mode, tol))


def _safe_t(t: float, s: int, eta: float, mode: str, tol: float) -> float:
    """Largest integer t' < t at the same ratio s/t where doubling converges."""
    x = s / t
    good, bad = 0, math.ceil(t)
    while bad - good > 1:  # bisection; resolvability is monotone in t in practice
        mid = (good + bad) // 2
        try:
            log_Q(mid, round(x * mid), eta, mode, tol, max_doublings=3)
            good = mid
        except (PrecisionError, ConvergenceError):
            bad = mid
    return float(good)


def log_Q_closed_t0(s: int, eta: float) -> float:
    """log Q(0, s): the empty partition contributes prod_{i>=1} 1/(1+e^{eta(1/2-i-s)})."""
    total = 0.0
    for i in count(1):
        term = math.log1p(math.exp(eta * (0.5 - i - s))) if eta * (0.5 - i - s) < 700 else eta * (0.5 - i - s)
        total -= term
        if term < 1e-18:
            return total


# ---------------------------------------------------------------------------
# brute-force oracle over partitions
# ---------------------------------------------------------------------------

def partitions(n: int):
    """Partitions of n as nonincreasing tuples."""
    def rec(n, maxpart):
        if n == 0:
            yield ()
            return
        for p in range(min(n, maxpart), 0, -1):
            for rest in rec(n - p, p):
                yield (p,) + rest
    yield from rec(n, n)


def hook_product(lam: tuple[int, ...]) -> int:
    conj = [sum(1 for p in lam if p > j) for j in range(lam[0])] if lam else []
    prod = 1
    for i, row in enumerate(lam):
        for j in range(row):
            prod *= row - j + conj[j] - i - 1
    return prod


def log_Q_partition_sum(t: float, s: int, eta: float, max_size: int = 20) -> float:
    """log Q(t, s) by direct summation over partitions with |lambda| <= max_size."""
    total = 0.0
    for n in range(max_size + 1):
        wn = math.exp(-t * t + 2 * n * math.log(t)) if t > 0 else float(n == 0)
        if wn == 0:
            continue
        for lam in partitions(n):
            logw = 0.0
            for i in count(1):
                part = lam[i - 1] if i <= len(lam) else 0
                z = eta * (part - i + 0.5 - s)
                term = math.log1p(math.exp(z)) if z < 700 else z
                logw -= term
                if i > len(lam) and term < 1e-18:
                    break
            total += wn / hook_product(lam) ** 2 * math.exp(logw)
    return math.log(total)


# ---------------------------------------------------------------------------
# determinant-ratio observables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Observables:
    alphaHat: float
    betaHat: float
    gammaHat: float
    s: int
    x_realized: float


def observables(t: float, x: float, eta: float, dt: float | None = None,
                mode: str = FERMI, tol: float = 1e-12) -> Observables:
    """alpha-hat, beta-hat and gamma-hat at s = round(x t)."""
    if t <= 0:
        raise DomainError("t must be positive")
    s = int(round(x * t))
    dt = t * 1e-3 if dt is None else dt
    q0 = log_Q(t, s, eta, mode, tol).logQ
    qm = log_Q(t, s - 1, eta, mode, tol).logQ
    qp = log_Q(t, s + 1, eta, mode, tol).logQ
    qa = log_Q(t + dt, s, eta, mode, tol).logQ
    qb = log_Q(t - dt, s, eta, mode, tol).logQ
    alpha = -0.5 * (qa - qb) / (2 * dt)
    return Observables(alpha, math.exp(qm - q0), math.exp(qp - q0), s, s / t)
