import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erlangdiff.model import (
    ModelParams,
    ValidationError,
    departure_rate,
    derive,
    drift,
    drift_slope,
    scaled_state,
)


class TestValidation:
    def test_erlang_c_requires_stability(self):
        with pytest.raises(ValidationError):
            ModelParams(lam=6.0, mu=1.0, n=5, alpha=0.0)
        with pytest.raises(ValidationError):
            ModelParams(lam=5.0, mu=1.0, n=5, alpha=0.0)  # R == n unstable

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(lam=0.0, mu=1.0, n=5),
            dict(lam=-1.0, mu=1.0, n=5),
            dict(lam=1.0, mu=0.0, n=5),
            dict(lam=1.0, mu=1.0, n=0),
            dict(lam=1.0, mu=1.0, n=5, alpha=-0.5),
        ],
    )
    def test_rejects_bad_rates(self, kwargs):
        with pytest.raises(ValidationError):
            ModelParams(**kwargs)

    def test_rejects_fractional_servers(self):
        with pytest.raises(ValidationError):
            ModelParams(lam=1.0, mu=1.0, n=2.5)


class TestDerive:
    def test_erlang_c_example(self):
        der = derive(ModelParams(lam=3.0, mu=1.0, n=5, alpha=0.0))
        assert der.R == 3.0
        assert der.x_inf == 3.0
        assert der.zeta == pytest.approx((3.0 - 5.0) / math.sqrt(3.0), rel=1e-15)

    def test_critical_load(self):
        der = derive(ModelParams(lam=5.0, mu=1.0, n=5, alpha=1.0))
        assert der.x_inf == 5.0
        assert der.zeta == 0.0

    def test_table3_zeta(self):
        der = derive(ModelParams(lam=499.0, mu=1.0, n=500, alpha=0.0))
        assert abs(der.zeta) == pytest.approx(4.48e-2, abs=5e-4)

    def test_overloaded_equilibrium(self):
        der = derive(ModelParams(lam=12.0, mu=1.0, n=5, alpha=2.0))
        assert der.x_inf == pytest.approx(5.0 + 7.0 / 2.0, rel=1e-15)
        assert der.zeta > 0.0

    @pytest.mark.parametrize(
        "params",
        [
            ModelParams(lam=3.0, mu=1.0, n=5, alpha=0.0),
            ModelParams(lam=3.4, mu=0.7, n=5, alpha=0.0),
            ModelParams(lam=8.0, mu=1.0, n=5, alpha=0.5),
            ModelParams(lam=2.0, mu=3.0, n=4, alpha=2.0),
        ],
    )
    def test_flow_balance_identity(self, params):
        der = derive(params)
        lhs = params.lam
        rhs = min(der.x_inf, params.n) * params.mu + max(
            der.x_inf - params.n, 0.0
        ) * params.alpha
        assert lhs == pytest.approx(rhs, rel=1e-12)
        # eq form: lam - n mu = (x-n)+ alpha - (x-n)- mu
        diff = params.lam - params.n * params.mu
        alt = (
            max(der.x_inf - params.n, 0.0) * params.alpha
            - max(params.n - der.x_inf, 0.0) * params.mu
        )
        assert diff == pytest.approx(alt, rel=1e-12, abs=1e-12)

    def test_zeta_formulas_coincide(self):
        for lam, n in [(3.0, 5), (4.9, 5), (499.0, 500), (0.3, 1)]:
            der = derive(ModelParams(lam=lam, mu=1.0, n=n, alpha=0.0))
            closed = (der.R - n) / math.sqrt(der.R)
            assert der.zeta == pytest.approx(closed, rel=1e-14)


class TestDepartureRate:
    def test_empty_system(self):
        assert departure_rate(ModelParams(lam=1, mu=1, n=5, alpha=0.0), 0) == 0.0

    def test_capped_at_servers(self):
        assert departure_rate(ModelParams(lam=1, mu=1, n=5, alpha=0.0), 7) == 5.0

    def test_abandonment_term(self):
        assert departure_rate(ModelParams(lam=1, mu=1, n=5, alpha=2.0), 7) == 9.0

    def test_rejects_negative_state(self):
        with pytest.raises(ValueError):
            departure_rate(ModelParams(lam=1, mu=1, n=5), -1)

    @given(k=st.integers(min_value=0, max_value=10_000))
    def test_nondecreasing(self, k):
        params = ModelParams(lam=2.0, mu=1.3, n=7, alpha=0.4)
        assert departure_rate(params, k + 1) >= departure_rate(params, k)


class TestDrift:
    @pytest.mark.parametrize(
        "params",
        [
            ModelParams(lam=4.0, mu=1.0, n=5, alpha=0.0),
            ModelParams(lam=8.0, mu=2.0, n=5, alpha=3.0),
        ],
    )
    def test_zero_at_origin(self, params):
        assert drift(derive(params), 0.0) == 0.0

    def test_erlang_c_piecewise_form(self):
        der = derive(ModelParams(lam=4.0, mu=1.0, n=5, alpha=0.0))
        z = der.zeta
        for x in [-z + 0.3, -z + 2.0]:
            assert drift(der, x) == pytest.approx(der.mu * z, rel=1e-15)
        for x in [-z - 0.3, -3.0, 0.0]:
            assert drift(der, x) == pytest.approx(-der.mu * x, rel=1e-15, abs=1e-15)

    @pytest.mark.parametrize(
        "params",
        [
            ModelParams(lam=4.0, mu=1.0, n=5, alpha=0.0),
            ModelParams(lam=499.0, mu=1.0, n=500, alpha=0.0),
            ModelParams(lam=9.0, mu=1.0, n=5, alpha=1.5),
        ],
    )
    def test_grid_identity(self, params):
        # b(x_k) = delta * (lam - d(k))
        der = derive(params)
        ks = np.arange(0, 10 * params.n + 1)
        xs = scaled_state(der, ks)
        lhs = drift(der, xs)
        rhs = der.delta * (params.lam - departure_rate(params, ks))
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    @settings(max_examples=200)
    @given(
        x=st.floats(-50, 50, allow_nan=False),
        y=st.floats(-50, 50, allow_nan=False),
    )
    def test_lipschitz(self, x, y):
        der = derive(ModelParams(lam=6.0, mu=1.7, n=4, alpha=0.9))
        cap = max(der.mu, der.alpha)
        assert abs(drift(der, x) - drift(der, y)) <= cap * abs(x - y) * (1 + 1e-12) + 1e-12

    def test_matched_rates_give_global_linear_drift(self):
        # alpha = mu collapses both branches onto b(x) = -mu x
        der = derive(ModelParams(lam=5.0, mu=1.0, n=5, alpha=1.0))
        xs = np.linspace(-4.0, 4.0, 33)
        assert np.allclose(drift(der, xs), -der.mu * xs, rtol=0, atol=1e-15)

    def test_single_kink(self):
        der = derive(ModelParams(lam=6.0, mu=1.0, n=5, alpha=2.0))
        z = der.zeta
        assert drift_slope(der, -z - 1e-9) == -der.mu
        assert drift_slope(der, -z + 1e-9) == -der.alpha
        with pytest.raises(ValueError):
            drift_slope(der, -z)

    def test_continuous_at_kink(self):
        der = derive(ModelParams(lam=6.0, mu=1.0, n=5, alpha=2.0))
        z = der.zeta
        eps = 1e-10
        assert drift(der, -z - eps) == pytest.approx(drift(der, -z + eps), abs=1e-9)


class TestScaledState:
    def test_centering(self):
        der = derive(ModelParams(lam=3.0, mu=1.0, n=5, alpha=0.0))
        assert scaled_state(der, 3) == 0.0

    def test_derived_point(self):
        der = derive(ModelParams(lam=4.0, mu=1.0, n=5, alpha=0.0))
        assert scaled_state(der, 5) == pytest.approx(0.5, rel=1e-15)
        assert scaled_state(der, 5) == -der.zeta  # exact, bit for bit

    def test_spacing(self):
        der = derive(ModelParams(lam=7.3, mu=1.1, n=9, alpha=0.2))
        ks = np.arange(0, 200)
        xs = scaled_state(der, ks)
        assert np.allclose(np.diff(xs), der.delta, rtol=1e-12)

    def test_kink_on_grid_everywhere(self):
        for lam, n, alpha in [(4.9, 5, 0.0), (499.0, 500, 0.0), (12.0, 5, 2.0)]:
            der = derive(ModelParams(lam=lam, mu=1.0, n=n, alpha=alpha))
            assert scaled_state(der, n) == -der.zeta
