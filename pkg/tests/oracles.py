"""Independent reference computations used by the tests."""

import math

import numpy as np

from artifact import asymptotics as asy
from artifact.elliptic import RectLattice, theta_derivs, weier


def residues_by_contour(eta, x, t, eps=0.05, nodes=200):
    """(1,1) residues of the local Airy corrections by contour integration.

    Works in the uniformizing variable w, where z(w) = U (Z0 + zeta(h+w) + zeta(h-w))
    is elliptic and every ingredient (outer parametrix, local phase) is
    single valued. A small z-circle around an endpoint is the image of a
    w-half-circle on the physical side, traversed once.
    """
    st = asy._state(eta, x)
    K, U, r = st.K, st.U, st.r
    h, ip = eta / 2, 1j * math.pi
    lat = RectLattice(K)
    tl = t * st.L

    def dz(w):
        return U * (weier("wp", h - w, lat) - weier("wp", h + w, lat))

    def chi(w):
        return asy._chi(w, K, tl)[0]

    def th(w):
        return theta_derivs("11", w / (2 * K), K, 0)[0]

    w1, w2 = h - K + ip, -h + K + ip
    c1, c2 = chi(h - w1), chi(-h - w2)

    def xi2(w):
        return (th(w) * th(w - K - ip) * th(h - K) * th(h - ip)
                / (th(w - K) * th(w - ip) * th(h) * th(h - K - ip)))

    def dphase(v, w0):
        # derivative of the local phase in z, normalized to vanish at the endpoint
        return (-2 * r * eta * (v - w0)
                - 2 * (np.log(weier("sigma", h - v, lat) / weier("sigma", h - w0, lat))
                       - np.log(weier("sigma", h + v, lat) / weier("sigma", h + w0, lat))))

    gx, gw = np.polynomial.legendre.leggauss(30)

    def phase(w, w0):
        v = w0 + (w - w0) * (gx + 1) / 2
        return (w - w0) / 2 * sum(wt * dphase(vv, w0) * dz(vv) for vv, wt in zip(v, gw))

    e = np.exp(-2j * np.pi * tl)
    table = {
        "d": (0.0, 1, (1, 6j, 6j), 0.0),
        "a": (K, -1, (-1, 6j, 6j), math.pi),
        "b": (K + ip, -1, (-1, -6j * e, -6j / e), math.pi),
        "c": (ip, -1, (-1, 6j * e, 6j / e), 0.0),
    }
    tx, tw = np.polynomial.legendre.leggauss(nodes)
    out = {}
    for name, (w0, sgn, (m11, m12, m21), th0) in table.items():
        total = 0
        for ang, wt in zip(th0 - math.pi / 2 + math.pi * (tx + 1) / 2, tw):
            w = w0 + eps * np.exp(1j * ang)
            dw = 1j * eps * np.exp(1j * ang) * math.pi / 2
            X1, X2 = chi(w - w1) / c1, chi(-w - w1) / c1
            X3, X4 = chi(w - w2) / c2, chi(-w - w2) / c2
            s2 = xi2(w)
            p2, q2, pq = (s2 + 2 + 1 / s2) / 4, -(s2 - 2 + 1 / s2) / 4, (s2 - 1 / s2) / 4j
            num = m11 * (p2 * X1 * X4 - q2 * X2 * X3) + m21 * pq * X2 * X4 + m12 * pq * X1 * X3
            f = sgn / (36 * phase(w, w0)) * num / (p2 * X1 * X4 + q2 * X2 * X3)
            total += wt * f * dz(w) * dw
        out[name] = complex(total / (2j * math.pi))
    return out


def phi_minus_grid(eta, mu, n=801):
    """Brute-force maximization of F(y) - eta/2 (mu - y)^2 on a y-grid."""
    from artifact.equilibrium import rate_function
    ys = np.linspace(mu - 4, max(2.0, mu) + 0.5, n)
    vals = [rate_function(eta, y) - eta / 2 * (mu - y) ** 2 for y in ys]
    k = int(np.argmax(vals))
    return vals[k], ys[k]
