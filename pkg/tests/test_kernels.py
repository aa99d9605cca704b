import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from artifact import kernels as kr
from artifact.errors import DomainError, PrecisionError

ETA = math.log(5)

# log Q(1, 0) at eta = log 5, from the partition sum
LOGQ_1_0 = -1.018081236456733
# log Q(30, 18) at eta = log 5, 50-digit mpmath determinant
LOGQ_30_18 = -159.5609840311295


def bessel_series(nu: float, z: float, terms: int = 40) -> float:
    """Ascending series for J_nu(z), any real order."""
    total = 0.0
    for k in range(terms):
        g = nu + k + 1
        if g <= 0 and g == int(g):
            continue
        total += (-1) ** k * (z / 2) ** (2 * k + nu) / (math.factorial(k) * math.gamma(g))
    return total


class TestBessel:
    def test_zero_argument(self):
        J = kr.bessel_row(0.0, 5)
        assert J.values[0] == 1.0
        assert np.all(J.values[1:] == 0.0)

    def test_power_series(self):
        assert kr.bessel_row(2.0, 10).values[3] == pytest.approx(bessel_series(3, 2.0), abs=1e-12)

    def test_sum_of_squares(self):
        J = kr.bessel_row(6.0, 40)
        m = np.arange(-40, 41)
        assert np.sum(J(m) ** 2) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("arg", [0.3, 5.0, 37.2, 120.0])
    def test_against_scipy(self, arg):
        J = kr.bessel_row(arg, 200)
        ref = special.jv(np.arange(201), arg)
        big = np.abs(ref) > 1e-280
        np.testing.assert_allclose(J.values[big], ref[big], rtol=1e-11, atol=1e-14)

    @pytest.mark.parametrize("arg", [1.0, 17.0, 60.0])
    def test_invariants(self, arg):
        J = kr.bessel_row(arg, 120)
        assert np.all(np.abs(J.values) <= 1)
        m = np.arange(2, 121, 2)
        assert J.values[0] + 2 * np.sum(J.values[m]) == pytest.approx(1.0, abs=1e-12)

    def test_negative_orders(self):
        J = kr.bessel_row(3.0, 10)
        assert J(-3) == pytest.approx(-J(3))
        assert J(-4) == pytest.approx(J(4))

    def test_domain(self):
        with pytest.raises(DomainError):
            kr.bessel_row(-1.0, 3)


class TestDiscreteBessel:
    def test_symmetry(self):
        assert kr.discrete_bessel(0.5, 2.5, 3.0) == pytest.approx(kr.discrete_bessel(2.5, 0.5, 3.0), abs=1e-15)

    def test_diagonal_vs_order_derivative(self):
        i, t, e = 0.5, 2.0, 1e-4

        def cd(nu_i, nu_j):
            ji, jj = bessel_series(nu_i - 0.5, 2 * t), bessel_series(nu_j - 0.5, 2 * t)
            ji1, jj1 = bessel_series(nu_i + 0.5, 2 * t), bessel_series(nu_j + 0.5, 2 * t)
            return t * (ji * jj1 - ji1 * jj) / (nu_i - nu_j)

        limit = cd(i + e, i - e)
        assert kr.discrete_bessel(i, i, t) == pytest.approx(limit, abs=1e-6)

    @settings(max_examples=10)
    @given(st.integers(-6, 6), st.floats(0.2, 4.0))
    def test_diagonal_property(self, k, t):
        # Y_n enters the order derivative at negative n, so keep the step small
        i, e = k + 0.5, 1e-6
        a, b = i + e, i - e
        num = (special.jv(a - 0.5, 2 * t) * special.jv(b + 0.5, 2 * t)
               - special.jv(a + 0.5, 2 * t) * special.jv(b - 0.5, 2 * t))
        assert kr.discrete_bessel(i, i, t) == pytest.approx(t * num / (a - b), abs=1e-6)

    @settings(max_examples=20)
    @given(st.integers(-5, 5), st.integers(1, 6), st.floats(0.1, 6.0))
    def test_christoffel_darboux(self, k, gap, t):
        i, j = k + 0.5, k + gap + 0.5
        ii, jj = k, k + gap
        m = np.arange(1, 80)
        J = kr.bessel_row(2 * t, 120)
        series = float(np.sum(J(ii + m) * J(jj + m)))
        assert kr.discrete_bessel(i, j, t) == pytest.approx(series, abs=1e-11)

    def test_small_t(self):
        assert abs(kr.discrete_bessel(1.5, 2.5, 1e-6)) < 1e-10

    def test_not_half_integer(self):
        with pytest.raises(DomainError):
            kr.discrete_bessel(1.0, 0.5, 1.0)


class TestFermi:
    def test_values(self):
        assert kr.fermi_weight(0.0, ETA) == 0.5
        assert kr.fermi_weight(3.7, ETA) + kr.fermi_weight(-3.7, ETA) == pytest.approx(1.0, abs=1e-15)
        assert kr.fermi_weight(-50.0, 1.0) < 1e-21

    def test_no_overflow(self):
        with np.errstate(over="raise"):
            assert kr.fermi_weight(-1e4, 1.0) == 0.0
            assert kr.fermi_weight(1e4, 1.0) == 1.0


class TestPosTemp:
    def test_symmetry(self):
        a = kr.pos_temp_kernel(1.5, 3.5, 2.0, ETA)
        assert a == pytest.approx(kr.pos_temp_kernel(3.5, 1.5, 2.0, ETA), abs=1e-15)

    @pytest.mark.parametrize("i,j", [(0.5, 0.5), (1.5, 3.5), (-2.5, 0.5)])
    def test_zero_temperature_limit(self, i, j):
        t = 2.0
        J = kr.bessel_row(2 * t, 60)
        half = 0.5 * J(int(i - 0.5)) * J(int(j - 0.5))
        expected = kr.discrete_bessel(i, j, t) + half
        assert kr.pos_temp_kernel(i, j, t, 40.0) == pytest.approx(expected, abs=1e-12)


class TestLogQ:
    def test_closed_form_t0(self):
        direct = -sum(math.log1p(math.exp(ETA * (0.5 - i))) for i in range(1, 200))
        assert kr.log_Q_closed_t0(0, ETA) == pytest.approx(direct, abs=1e-12)
        assert kr.log_Q(0.0, 0, ETA).logQ == pytest.approx(direct, abs=1e-12)

    def test_partition_sum(self):
        val = kr.log_Q(1.0, 0, ETA).logQ
        assert val == pytest.approx(kr.log_Q_partition_sum(1.0, 0, ETA), abs=1e-10)
        assert val == pytest.approx(LOGQ_1_0, abs=1e-10)

    @pytest.mark.parametrize("s", [-3, 0, 2])
    def test_partition_sum_other_s(self, s):
        assert kr.log_Q(0.8, s, ETA).logQ == pytest.approx(kr.log_Q_partition_sum(0.8, s, ETA), abs=1e-10)

    def test_modes_agree(self):
        a = kr.log_Q(3.0, 2, ETA, kr.FERMI).logQ
        b = kr.log_Q(3.0, 2, ETA, kr.POS_TEMP).logQ
        assert a == pytest.approx(b, rel=1e-9)

    def test_frozen_large_t(self):
        assert kr.log_Q(30.0, 18, ETA, tol=1e-10).logQ == pytest.approx(LOGQ_30_18, rel=1e-9)

    def test_result_invariants(self):
        r = kr.log_Q(4.0, 1, ETA)
        assert r.logQ <= 0
        assert r.tail_bound >= 0
        assert 0 < r.min_pivot <= 1

    def test_precision_error(self):
        with pytest.raises(PrecisionError) as exc:
            kr.log_Q(24.0, -12, ETA)
        assert 5 <= exc.value.safe_limit < 24

    @pytest.mark.parametrize("t", [0.5, 3.0, 6.0])
    def test_monotone_in_s(self, t):
        vals = [kr.log_Q(t, s, ETA).logQ for s in range(-4, 10)]
        assert np.all(np.diff(vals) >= -1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            kr.log_Q(-1.0, 0, ETA)
        with pytest.raises(DomainError):
            kr.log_Q(1.0, 0.5, ETA)
        with pytest.raises(DomainError):
            kr.log_Q(1.0, 0, ETA, mode="other")


class TestObservables:
    def test_positive(self):
        o = kr.observables(5.0, 0.4, ETA)
        assert o.betaHat > 0 and o.gammaHat > 0
        assert o.s == 2

    def test_one_cut(self):
        t, x = 10.0, -1.5
        o = kr.observables(t, x, ETA)
        assert math.log(o.betaHat) == pytest.approx(x * t * ETA - ETA / 2, abs=1e-2)
        assert o.alphaHat == pytest.approx(t * (1 - math.exp(-ETA)), abs=1e-2 * t)
