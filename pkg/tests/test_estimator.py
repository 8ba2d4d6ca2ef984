import math

import numpy as np
import pytest

from mfctrl.errors import (
    InsufficientDataError,
    NonFiniteValueError,
    OutOfOrderSampleError,
    UndefinedScaleError,
)
from mfctrl.estimator import (
    FEstimate,
    LoopSample,
    Sample,
    SlidingWindow,
    UltraLocalConfig,
    estimate_f_closed_loop,
    estimate_f_integral,
    push_sample,
    suggest_alpha,
)


def fill_window(tau, dt, y_fn, u_fn, t_end=None, t0=0.0):
    t_end = tau if t_end is None else t_end
    w = SlidingWindow(tau)
    for k in range(int(round((t_end - t0) / dt)) + 1):
        t = t0 + k * dt
        w.push(Sample(t, u_fn(t), y_fn(t)))
    return w


class TestSlidingWindow:
    def test_push_base_case(self):
        w = SlidingWindow(0.05)
        push_sample(w, Sample(0.0, 0.0, 0.0))
        assert len(w) == 1

    def test_eviction(self):
        # window spanning [0, 0.05] at dt=0.01; pushing t=0.06 evicts t < 0.01
        w = SlidingWindow(0.05)
        for k in range(6):
            w.push(Sample(0.01 * k, 0.0, 0.0))
        assert len(w) == 6
        w.push(Sample(0.06, 0.0, 0.0))
        assert len(w) == 6
        assert w.samples[0].t == pytest.approx(0.01)

    def test_out_of_order_rejected(self):
        w = SlidingWindow(0.05)
        w.push(Sample(0.05, 0.0, 0.0))
        with pytest.raises(OutOfOrderSampleError):
            w.push(Sample(0.04, 0.0, 0.0))
        with pytest.raises(OutOfOrderSampleError):
            w.push(Sample(0.05, 0.0, 0.0))

    def test_non_finite_rejected(self):
        w = SlidingWindow(0.05)
        with pytest.raises(NonFiniteValueError):
            w.push(Sample(0.0, math.nan, 0.0))
        with pytest.raises(NonFiniteValueError):
            w.push(Sample(0.0, 0.0, math.inf))

    def test_negative_time_rejected(self):
        w = SlidingWindow(0.05)
        with pytest.raises(ValueError):
            w.push(Sample(-1.0, 0.0, 0.0))


class TestUltraLocalConfig:
    @pytest.mark.parametrize("alpha,tau,n", [(0.0, 0.1, 1), (1.0, 0.0, 1), (1.0, 0.1, 2)])
    def test_invalid(self, alpha, tau, n):
        with pytest.raises(ValueError):
            UltraLocalConfig(alpha, tau, n)


class TestIntegralEstimator:
    def test_zero_data_gives_zero(self):
        w = fill_window(0.05, 1e-3, lambda t: 0.0, lambda t: 0.0)
        est = estimate_f_integral(w, UltraLocalConfig(1.0, 0.05))
        assert est.value == pytest.approx(0.0, abs=1e-15)
        assert est.window_span == pytest.approx(0.05)

    def test_affine_example(self):
        # ydot = 3 = F + alpha*u = F + 1, so F = 2 exactly
        w = fill_window(0.05, 1e-4, lambda t: 3.0 * t, lambda t: 1.0)
        est = estimate_f_integral(w, UltraLocalConfig(1.0, 0.05))
        assert est.value == pytest.approx(2.0, abs=1e-8)

    def test_affine_example_small_alpha(self):
        # ydot = 0.5 = F + 0.001*100, so F = 0.4
        w = fill_window(0.05, 1e-4, lambda t: 0.5 * t, lambda t: 100.0)
        est = estimate_f_integral(w, UltraLocalConfig(0.001, 0.05))
        assert est.value == pytest.approx(0.4, abs=1e-8)

    def test_exact_on_model_class(self):
        # property: y = y0 + (F + alpha*u0) t  ->  estimate == F
        rng = np.random.default_rng(42)
        for _ in range(30):
            F = rng.uniform(-5, 5)
            alpha = float(rng.choice([-1.0, 1.0])) * 10 ** rng.uniform(-3, 1)
            u0 = rng.uniform(-50, 50)
            y0 = rng.uniform(-2, 2)
            w = fill_window(0.05, 1e-4, lambda t: y0 + (F + alpha * u0) * t, lambda t: u0)
            est = estimate_f_integral(w, UltraLocalConfig(alpha, 0.05))
            assert abs(est.value - F) < 1e-8

    def test_window_start_independence(self):
        tau, dt = 0.05, 1e-4
        w0 = fill_window(tau, dt, lambda t: 0.5 + 3.0 * t, lambda t: 1.0)
        cfg = UltraLocalConfig(1.0, tau)
        ref = estimate_f_integral(w0, cfg).value
        for shift in (0.731, 12.0, 4001.7):
            w = SlidingWindow(tau)
            for s in w0.samples:
                w.push(Sample(s.t + shift, s.u, s.y))
            shifted = estimate_f_integral(w, cfg).value
            assert shifted == pytest.approx(ref, rel=1e-9, abs=1e-9)

    def test_linearity(self):
        tau, dt, alpha = 0.05, 2e-4, 0.7
        cfg = UltraLocalConfig(alpha, tau)
        y1, u1 = lambda t: 0.2 + 1.5 * t + math.sin(20 * t), lambda t: math.cos(7 * t)
        y2, u2 = lambda t: -0.4 + 0.3 * t * t, lambda t: 2.0 * t
        e1 = estimate_f_integral(fill_window(tau, dt, y1, u1), cfg).value
        e2 = estimate_f_integral(fill_window(tau, dt, y2, u2), cfg).value
        e12 = estimate_f_integral(
            fill_window(tau, dt, lambda t: y1(t) + y2(t), lambda t: u1(t) + u2(t)), cfg
        ).value
        assert e12 == pytest.approx(e1 + e2, rel=1e-10, abs=1e-12)

    def test_quadrature_second_order(self):
        # Continuous-limit oracle from term-by-term symbolic integration of the
        # weighted polynomials: for y = A + B s + C s^2, u = P + Q s + R s^2
        # over local time s in [0, T],
        #   F_cont = B + C T - alpha (P + Q T / 2 + 3 R T^2 / 10).
        tau, alpha = 0.05, 2.0
        yc, uc = (0.3, 1.2, 7.0), (2.0, -10.0, 60.0)
        f_cont = yc[1] + yc[2] * tau - alpha * (uc[0] + uc[1] * tau / 2 + 3 * uc[2] * tau**2 / 10)
        errs = []
        for dt in (4e-4, 2e-4, 1e-4, 5e-5):
            w = fill_window(tau, dt,
                            lambda t: yc[0] + yc[1] * t + yc[2] * t * t,
                            lambda t: uc[0] + uc[1] * t + uc[2] * t * t)
            errs.append(abs(estimate_f_integral(w, UltraLocalConfig(alpha, tau)).value - f_cont))
        for e0, e1 in zip(errs, errs[1:]):
            assert 3.5 <= e0 / e1 <= 4.5

    def test_noise_attenuation_vs_finite_difference(self):
        # quick-fluctuation rejection: f*tau >= 20
        A, f, tau, dt = 0.05, 400.0, 0.05, 1e-4
        alpha, F, u0, y0 = 1.0, 2.0, 1.0, 0.5
        cfg = UltraLocalConfig(alpha, tau)
        wc, wn = SlidingWindow(tau), SlidingWindow(tau)
        d_f, d_fd = [], []
        prev = None
        n_warm = int(round(tau / dt))
        for k in range(n_warm + 300):
            t = k * dt
            yc = y0 + (F + alpha * u0) * t
            yn = yc + A * math.sin(2 * math.pi * f * t)
            wc.push(Sample(t, u0, yc))
            wn.push(Sample(t, u0, yn))
            if k > n_warm:
                d_f.append(
                    estimate_f_integral(wn, cfg).value - estimate_f_integral(wc, cfg).value
                )
                d_fd.append((yn - prev[1]) / dt - (yc - prev[0]) / dt)
            prev = (yc, yn)
        assert max(map(abs, d_f)) <= max(map(abs, d_fd)) / 10.0

    def test_truncates_to_tau_when_window_longer(self):
        # capacity 0.2 but tau 0.05: only the trailing horizon is integrated
        w = SlidingWindow(0.2)
        F, alpha, u0 = 1.5, 1.0, 2.0
        for k in range(2001):
            t = k * 1e-4
            y = 7.0 if t < 0.1 else 7.0 + (F + alpha * u0) * (t - 0.1)
            w.push(Sample(t, u0, y))
        est = estimate_f_integral(w, UltraLocalConfig(alpha, 0.05))
        assert est.window_span == pytest.approx(0.05)
        assert est.value == pytest.approx(F, abs=1e-8)

    def test_insufficient_data(self):
        w = SlidingWindow(0.05)
        w.push(Sample(0.0, 0.0, 0.0))
        with pytest.raises(InsufficientDataError):
            estimate_f_integral(w, UltraLocalConfig(1.0, 0.05))


class TestClosedLoopEstimator:
    def test_zero_integrand(self):
        w = SlidingWindow(0.1)
        for k in range(11):
            w.push(LoopSample(0.01 * k, 0.0, 0.0, 0.0))
        est = estimate_f_closed_loop(w, UltraLocalConfig(1.0, 0.1), kp=2.0)
        assert est.value == 0.0

    def test_constant_integrand(self):
        # ydot* = 1, alpha*u = 0.5, kp*e = 0.2  ->  mean = 0.3
        w = SlidingWindow(0.1)
        for k in range(11):
            w.push(LoopSample(0.01 * k, 1.0, 0.5, 0.1))
        est = estimate_f_closed_loop(w, UltraLocalConfig(1.0, 0.1), kp=2.0)
        assert est.value == pytest.approx(0.3, abs=1e-12)

    def test_recovers_constant_f_from_converged_loop(self):
        # Loop driven by the integral estimator on ydot = F0 + alpha*u;
        # the closed-loop formula evaluated on the logged signals must
        # converge to the plant's known F0.
        from mfctrl.controller import IpChannel, Setpoint, ip_control
        from mfctrl.plants import FirstOrderPlant

        F0, alpha, kp, tau, dt = 1.0, 1.0, 5.0, 0.1, 0.01
        plant = FirstOrderPlant(a=0.0, b=alpha, d=F0)
        ch = IpChannel(UltraLocalConfig(alpha, tau), kp, "integral", dt)
        cl_win = SlidingWindow(tau)
        sp = Setpoint(0.0, 0.0)
        last = None
        for k in range(500):
            t = k * dt
            y = plant.outputs()[0]
            u_prev = ch.u_prev
            u = ip_control(ch, sp, y, t)
            cl_win.push(LoopSample(t, sp.y_star_dot, u_prev, y - sp.y_star))
            if t >= 2.0:
                last = estimate_f_closed_loop(cl_win, ch.cfg, kp)
            plant.step((u,), dt)
        assert last is not None
        assert last.value == pytest.approx(F0, abs=1e-3)


class TestSuggestAlpha:
    def test_matches_rate_scale(self):
        t = np.arange(0, 1.0, 0.01)
        assert suggest_alpha(np.ones_like(t), 2.0 * t, 0.01) == pytest.approx(2.0)

    def test_sign_from_correlation(self):
        t = np.arange(0, 1.0, 0.01)
        assert suggest_alpha(-np.ones_like(t), 2.0 * t, 0.01) == pytest.approx(-2.0)

    def test_degenerate_output_rejected(self):
        u = np.ones(100)
        with pytest.raises(UndefinedScaleError):
            suggest_alpha(u, np.zeros(100), 0.01)

    def test_all_zero_input_rejected(self):
        t = np.arange(0, 1.0, 0.01)
        with pytest.raises(UndefinedScaleError):
            suggest_alpha(np.zeros_like(t), 2.0 * t, 0.01)

    def test_noisy_scale_close(self):
        rng = np.random.default_rng(3)
        t = np.arange(0, 2.0, 0.01)
        u = np.sin(2 * np.pi * 0.7 * t) + 0.5
        y = np.cumsum(3.0 * u) * 0.01 + 0.002 * rng.standard_normal(t.size)
        a = suggest_alpha(u, y, 0.01)
        assert 1.0 < a < 9.0
