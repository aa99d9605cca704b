import math

import numpy as np
import pytest

from artifact import toda
from artifact.errors import DomainError

ETA = math.log(5)


class TestInitialData:
    @pytest.mark.parametrize("s", [-4, 0, 1, 3])
    def test_y_at_zero(self, s):
        assert toda.y_from_Q(0.0, s, ETA) == pytest.approx(float(toda.y_initial(s, ETA)), abs=1e-12)

    def test_left_tail(self):
        # y + eta s tends to eta/2 for this normalization of Q
        assert toda.y_from_Q(2.0, -20, ETA) + ETA * -20 == pytest.approx(ETA / 2, abs=1e-8)

    def test_flaschka_at_zero(self):
        st = toda.flaschka(0.0, (-3, 3), ETA)
        y = toda.y_initial(np.arange(-3, 5), ETA)
        np.testing.assert_allclose(st.a, np.exp(np.diff(y) / 2), rtol=1e-12)
        assert np.all(st.b == 0)


class TestResidual:
    def test_second_order(self):
        res = [toda.toda_residual(3.0, 1, ETA, h).residual for h in (0.04, 0.02, 0.01)]
        slopes = np.diff(np.log(res)) / math.log(0.5)
        assert np.all(np.abs(slopes - 2) < 0.1)
        assert res[-1] < 1e-5

    def test_flat_far_right(self):
        assert toda.toda_residual(2.0, 15, ETA, 1e-2).residual < 1e-8

    def test_domain(self):
        with pytest.raises(DomainError):
            toda.toda_residual(0.01, 0, ETA, 0.02)
        with pytest.raises(DomainError):
            toda.y_from_Q(-1.0, 0, ETA)


class TestIntegrator:
    def test_matches_fredholm(self):
        rng = (-25, 45)
        end = toda.integrate_flaschka(1.0, 3.0, rng, ETA, dt=1e-3)
        ref = toda.flaschka(3.0, rng, ETA)
        assert np.max(np.abs(end.a - ref.a)) < 1e-6
        assert np.max(np.abs(end.b - ref.b)) < 1e-5

    def test_step_halving(self):
        rng = (-20, 35)
        a = toda.integrate_flaschka(1.0, 2.0, rng, ETA, dt=2e-3)
        b = toda.integrate_flaschka(1.0, 2.0, rng, ETA, dt=1e-3)
        assert np.max(np.abs(a.a - b.a)) < 1e-10

    def test_flat_data_stationary(self):
        n = 12
        flat = toda.FlaschkaState(1.0, (0, n - 1), np.ones(n), np.zeros(n))
        # a = 1 everywhere but a ghost value exp(-eta/2) on the left; the far
        # right of the window is unaffected over a short time
        end = toda.integrate_flaschka(1.0, 1.2, (0, n - 1), ETA, initial=flat)
        np.testing.assert_allclose(end.a[-4:], 1.0, atol=1e-8)
        np.testing.assert_allclose(end.b[-4:], 0.0, atol=1e-8)

    def test_t0_must_be_positive(self):
        with pytest.raises(DomainError):
            toda.integrate_flaschka(0.0, 1.0, (0, 3), ETA)


class TestProfiles:
    @pytest.mark.parametrize("x,t,tol", [(-1.5, 10.0, 1e-3), (0.6, 12.0, 2e-3), (2.5, 10.0, 1e-3)])
    def test_compare(self, x, t, tol):
        c = toda.compare_profiles(ETA, x, t)
        assert c.a_error < tol
        assert c.b_error < 5 * tol
