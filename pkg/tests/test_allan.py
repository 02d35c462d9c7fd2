import math

import numpy as np
import pytest

from gyrofde.allan import (AllanCurve, allan_landmarks_analytic,
                           allan_variance_analytic, allan_variance_empirical,
                           confidence_band, default_tau_grid, estimator_dof,
                           identify_from_max)
from gyrofde.gyro import (DriftSpec, GyroErrorModel, NoiseSpec, RateTrace,
                          synthesize_rate_trace)
from gyrofde.units import DEG

SEC = 1.0 / 3600.0

FIG3 = GyroErrorModel.from_deg(5e-4, ((0.03, 10.0),))  # N=0.03 (deg/h)/sqrt(Hz)


class TestAnalytic:
    def test_one_second_ordinate_equals_arw(self):
        sigma = math.sqrt(allan_variance_analytic(FIG3, SEC))
        assert sigma / DEG == pytest.approx(0.03, rel=1e-3)

    def test_noise_only_is_N2_over_tau(self):
        m = GyroErrorModel(NoiseSpec(0.004), ())
        for tau in (1e-4, 0.3, 7.0):
            assert allan_variance_analytic(m, tau) == 0.004 ** 2 / tau

    def test_drift_short_tau_limit(self):
        # K^2 tau / 3 within 1% for tau <= Tc/100
        d = DriftSpec(K=0.02, Tc=5.0)
        m = GyroErrorModel(NoiseSpec(0.0), (d,))
        for tau in (d.Tc / 100, d.Tc / 1000):
            assert allan_variance_analytic(m, tau) == pytest.approx(
                d.K ** 2 * tau / 3, rel=0.01)

    def test_rejects_nonpositive_tau(self):
        with pytest.raises(ValueError):
            allan_variance_analytic(FIG3, 0.0)

    def test_multi_drift_additivity_exact(self):
        d1, d2 = DriftSpec(0.02, 0.3), DriftSpec(0.005, 4.0)
        noise = NoiseSpec(0.001)
        both = GyroErrorModel(noise, (d1, d2))
        taus = np.geomspace(1e-3, 50, 40)
        total = allan_variance_analytic(both, taus)
        parts = (allan_variance_analytic(GyroErrorModel(noise, (d1,)), taus)
                 + allan_variance_analytic(GyroErrorModel(NoiseSpec(0.0), (d2,)), taus))
        np.testing.assert_allclose(total, parts, rtol=1e-15)

    def test_loglog_slopes(self):
        # -1/2 (noise), +1/2 (drift rise), -1/2 (past Tc), within 0.05
        m = GyroErrorModel(NoiseSpec(1e-6), (DriftSpec(1e-2, 1e7),))
        tau_min = math.sqrt(3) * 1e-6 / 1e-2

        def slope(tau):
            f = 1.1
            lo = math.sqrt(allan_variance_analytic(m, tau / f))
            hi = math.sqrt(allan_variance_analytic(m, tau * f))
            return math.log(hi / lo) / math.log(f * f)

        assert slope(tau_min / 1e3) == pytest.approx(-0.5, abs=0.05)
        assert slope(tau_min * 1e3) == pytest.approx(+0.5, abs=0.05)
        assert slope(1.89 * 1e7 * 1e3) == pytest.approx(-0.5, abs=0.05)


class TestEmpirical:
    def test_constant_trace_gives_zero(self):
        trace = RateTrace(dt=SEC, samples=np.full(2000, 0.7), duration=2000 * SEC)
        curve = allan_variance_empirical(trace, [10 * SEC, 100 * SEC])
        # zero up to the rounding of the sample mean (values ~1e-31)
        np.testing.assert_allclose(curve.sigmas, 0.0, atol=1e-20)

    def test_linear_ramp_closed_form(self):
        # rate r*t: consecutive window means differ by exactly r*tau
        r, dt, n = 0.5, SEC, 5000
        samples = r * np.arange(n) * dt
        trace = RateTrace(dt=dt, samples=samples, duration=n * dt)
        taus = np.array([10, 100, 500]) * SEC
        curve = allan_variance_empirical(trace, taus)
        np.testing.assert_allclose(curve.sigmas, r * taus / math.sqrt(2), rtol=1e-9)
        # slope +1 on log-log
        s = np.diff(np.log(curve.sigmas)) / np.diff(np.log(taus))
        np.testing.assert_allclose(s, 1.0, atol=1e-6)

    def test_white_noise_matches_analytic_within_3_estimator_std(self):
        N = 0.03 * DEG
        m = GyroErrorModel(NoiseSpec(N), ())
        trace = synthesize_rate_trace(m, 10.0, SEC, seed=4)
        taus = default_tau_grid(SEC, trace.duration)
        taus = taus[(taus >= 10 * SEC) & (taus <= 1.0)]
        curve = allan_variance_empirical(trace, taus)
        analytic = N / np.sqrt(taus)
        nu = estimator_dof(m, SEC, len(trace.samples), taus)
        tol = 3.0 * analytic / np.sqrt(2.0 * nu)
        assert np.all(np.abs(curve.sigmas - analytic) < tol)

    def test_rejects_bad_taus(self):
        trace = RateTrace(dt=SEC, samples=np.zeros(100), duration=100 * SEC)
        with pytest.raises(ValueError, match="multiple"):
            allan_variance_empirical(trace, [1.5 * SEC])
        with pytest.raises(ValueError, match="large"):
            allan_variance_empirical(trace, [60 * SEC])


class TestLandmarks:
    def test_reference_model_minimum(self):
        lm = allan_landmarks_analytic(FIG3)
        assert lm.sigma_min / DEG == pytest.approx(4.1e-3, rel=0.03)
        assert lm.sigma_min == pytest.approx(lm.sigma_min_approx, rel=0.01)

    def test_reference_model_maximum(self):
        lm = allan_landmarks_analytic(FIG3)
        d = FIG3.drifts[0]
        assert lm.tau_max / d.Tc == pytest.approx(1.89, abs=0.01)
        assert lm.sigma_max / (d.K * math.sqrt(d.Tc)) == pytest.approx(0.437, abs=0.002)

    def test_maximum_absent_when_noise_buries_drift(self):
        m = GyroErrorModel(NoiseSpec(1.0), (DriftSpec(1e-6, 1.0),))
        lm = allan_landmarks_analytic(m)
        assert lm.tau_max is None and lm.sigma_max is None

    def test_minimum_insensitive_to_Tc(self):
        # vary Tc x10 with Tc >= 100 tau_min: sigma_min moves < 1%
        base = GyroErrorModel.from_deg(1e-4, ((0.05, 2.0),))
        wide = GyroErrorModel.from_deg(1e-4, ((0.05, 20.0),))
        a = allan_landmarks_analytic(base)
        b = allan_landmarks_analytic(wide)
        assert a.tau_min * 100 <= 2.0
        assert b.sigma_min == pytest.approx(a.sigma_min, rel=0.01)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            allan_landmarks_analytic(GyroErrorModel(NoiseSpec(1.0), ()))
        with pytest.raises(ValueError):
            allan_landmarks_analytic(GyroErrorModel(
                NoiseSpec(0.0), (DriftSpec(1.0, 1.0),)))


class TestIdentifyFromMax:
    def test_definitional_inverse(self):
        d = identify_from_max(1.89, 0.437)
        assert d.Tc == pytest.approx(1.0, rel=1e-12)
        assert d.K == pytest.approx(1.0, rel=1e-12)

    def test_round_trip_through_landmarks(self):
        for K, Tc in ((0.03, 10.0), (0.2, 0.4), (0.004, 2.5)):
            m = GyroErrorModel.from_deg(1e-4, ((K, Tc),))
            lm = allan_landmarks_analytic(m)
            d = identify_from_max(lm.tau_max, lm.sigma_max)
            assert d.K / DEG == pytest.approx(K, rel=0.015)
            assert d.Tc == pytest.approx(Tc, rel=0.015)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            identify_from_max(0.0, 1.0)
        with pytest.raises(ValueError):
            identify_from_max(1.0, -1.0)


class TestEstimatorBand:
    def test_white_noise_dof_matches_known_result(self):
        # overlapping estimator on pure white noise at tau = dt:
        # exact quadratic-form value 2M^2/(3M - 1), the classic 2n/3 asymptote
        m = GyroErrorModel(NoiseSpec(0.1), ())
        n = 5000
        M = n - 1
        nu = estimator_dof(m, SEC, n, [SEC])
        assert nu[0] == pytest.approx(2 * M * M / (3 * M - 1), rel=1e-9)
        assert nu[0] == pytest.approx(2 * n / 3, rel=1e-3)

    def test_dof_decreases_with_tau(self):
        nu = estimator_dof(FIG3, SEC, 20_000, np.array([2, 20, 200, 2000]) * SEC)
        assert np.all(np.diff(nu) < 0)

    def test_synthesized_trace_inside_99_band(self):
        # fixed seed; ~90% of seeds pass this 99%-band containment check
        m = GyroErrorModel.from_deg(5e-4, ((0.3, 0.02),))
        dt, duration = SEC, 2.0
        trace = synthesize_rate_trace(m, duration, dt, seed=3)
        taus = default_tau_grid(dt, duration)
        taus = taus[(taus >= 10 * dt) & (taus <= duration / 10)]
        curve = allan_variance_empirical(trace, taus)
        analytic = np.sqrt(allan_variance_analytic(m, taus))
        lo, hi = confidence_band(m, dt, len(trace.samples), taus, 0.99)
        assert np.all(curve.sigmas >= lo * analytic)
        assert np.all(curve.sigmas <= hi * analytic)


def test_default_tau_grid_properties():
    taus = default_tau_grid(SEC, 10.0)
    assert np.all(np.diff(taus) > 0)
    assert taus[0] >= 2 * SEC - 1e-12
    assert taus[-1] <= 2.0 + 1e-12
    mult = taus / SEC
    np.testing.assert_allclose(mult, np.round(mult), atol=1e-6)


def test_curve_validation_and_csv(tmp_path):
    with pytest.raises(ValueError):
        AllanCurve(taus=[2.0, 1.0], sigmas=[1.0, 1.0], source="analytic")
    with pytest.raises(ValueError):
        AllanCurve(taus=[1.0, 2.0], sigmas=[1.0, 1.0], source="guess")
    curve = AllanCurve(taus=[1.0, 2.0], sigmas=[0.5, 0.25], source="analytic")
    path = tmp_path / "curve.csv"
    curve.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "tau_s,sigma_deg_per_h"
    assert float(lines[1].split(",")[0]) == pytest.approx(3600.0)
