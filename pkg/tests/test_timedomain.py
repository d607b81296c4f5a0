"""Time-domain integrator against the frequency-domain closed forms."""
import math

import numpy as np
import pytest

from twoport_cmt import (
    Background,
    DriveSpec,
    ModelParams,
    SteadyStateNotConvergedError,
    integrate,
    joint_absorbance,
    oracle_scattering,
    scattering_matrix,
)
from twoport_cmt.timedomain import _demodulated_tail, settling_time, suggested_time_step
from conftest import random_passive_params


class TestSetupHelpers:
    def test_suggested_step_resolves_fastest_scale(self, headline_params):
        d = DriveSpec(omega=130.0)
        dt = suggested_time_step(headline_params, d)
        assert dt == pytest.approx(0.04 / 130.0)

    def test_settling_time_uses_slowest_pole(self, headline_params):
        # headline poles both decay at Im = (gamma_c + gamma_m) / 2 = 4
        assert settling_time(headline_params) == pytest.approx(20.0 / 4.0)
        # overdamped splitting: horizon follows the slower of the two rates
        p = ModelParams(124.5, 3.0, 0.0, 20.0, 8.0)
        slow = (23.0 - math.sqrt(23.0**2 - 4 * (60.0 + 64.0))) / 2.0
        assert settling_time(p) == pytest.approx(20.0 / slow)

    def test_settling_time_undamped_raises(self):
        p = ModelParams(100.0, 0.0, 0.0, 0.0, 8.0)
        with pytest.raises(ValueError):
            settling_time(p)


class TestIntegrate:
    def test_free_decay_matches_modal_solution(self, default_bg):
        # no drive: da/dt etc. is linear; compare against expm of the 2x2
        from scipy.linalg import expm
        p = ModelParams(100.0, 2.0, 1.0, 4.0, 6.0)
        drive = DriveSpec(omega=100.0, amp1=0.0, amp2=0.0)
        t_end = 1.0
        dt = suggested_time_step(p, drive)
        traj = integrate(p, default_bg, drive, t_end, dt / 5,
                         a0=1.0 + 0j, b0=0.3j)
        m = np.array([[1j * p.omega0 - p.gamma_c, 1j * p.omega_rabi],
                      [1j * p.omega_rabi, 1j * p.omega_m - p.gamma_m]])
        v0 = np.array([1.0 + 0j, 0.3j])
        for idx in (len(traj.times) // 2, len(traj.times) - 1):
            vt = expm(m * traj.times[idx]) @ v0
            assert abs(traj.a_t[idx] - vt[0]) < 1e-9
            assert abs(traj.b_t[idx] - vt[1]) < 1e-9

    def test_step_guard(self, headline_params, default_bg):
        drive = DriveSpec(omega=124.5)
        with pytest.raises(ValueError):
            integrate(headline_params, default_bg, drive, 1.0, 0.01)

    def test_undamped_drive_warns(self, default_bg):
        p = ModelParams(100.0, 0.0, 0.0, 0.0, 8.0)
        drive = DriveSpec(omega=100.0)
        with pytest.warns(RuntimeWarning):
            integrate(p, default_bg, drive, 0.1,
                      suggested_time_step(p, drive))

    def test_energy_conservation_outputs(self, default_bg):
        # lossless cavity: steady outputs return all the input power
        p = ModelParams(124.5, 3.0, 0.0, 0.0, 0.0)
        drive = DriveSpec(omega=124.0)
        res = oracle_scattering(p, default_bg, drive)
        assert res.a_joint == pytest.approx(0.0, abs=1e-6)

    def test_convergence_order_is_four(self, headline_params, default_bg):
        # demodulated error must shrink 16x per step halving
        drive = DriveSpec(omega=120.0, phi=0.7)
        # long horizon keeps transient residue below the finest-step error
        t_end = 20.0
        dt0 = suggested_time_step(headline_params, drive)
        vals = []
        for dt in (dt0, dt0 / 2, dt0 / 4):
            traj = integrate(headline_params, default_bg, drive, t_end, dt)
            z1, _ = _demodulated_tail(headline_params, default_bg, drive, traj)
            vals.append(z1)
        S = scattering_matrix(headline_params, default_bg, 120.0)
        exact = S.s11 + S.s12 * np.exp(1j * 0.7)
        e0, e1, e2 = (abs(v - exact) for v in vals)
        assert e0 / e1 == pytest.approx(16.0, rel=0.05)
        assert e1 / e2 == pytest.approx(16.0, rel=0.2)


class TestDemodulation:
    def test_transient_contamination_raises(self, headline_params, default_bg):
        drive = DriveSpec(omega=124.5)
        dt = suggested_time_step(headline_params, drive)
        traj = integrate(headline_params, default_bg, drive, 2.0, dt)
        with pytest.raises(SteadyStateNotConvergedError):
            _demodulated_tail(headline_params, default_bg, drive, traj)


class TestOracleVsClosedForm:
    def test_headline_grid(self, headline_params, default_bg):
        for w in (112.0, 117.65, 124.5, 131.5):
            for phi in (0.0, 1.3, -2.0):
                drive = DriveSpec(omega=w, phi=phi)
                res = oracle_scattering(headline_params, default_bg, drive)
                S = scattering_matrix(headline_params, default_bg, w)
                a, out1, out2 = joint_absorbance(S, phi)
                assert res.out1 == pytest.approx(out1, abs=1e-6)
                assert res.out2 == pytest.approx(out2, abs=1e-6)
                assert res.a_joint == pytest.approx(a, abs=1e-6)

    def test_random_params(self, default_bg):
        rng = np.random.default_rng(23)
        for _ in range(5):
            p = random_passive_params(rng, rate_lo=0.5, rate_hi=6.0)
            w = p.omega0 + float(rng.uniform(-10, 10))
            phi = float(rng.uniform(-math.pi, math.pi))
            drive = DriveSpec(omega=w, phi=phi)
            res = oracle_scattering(p, default_bg, drive)
            a, out1, out2 = joint_absorbance(
                scattering_matrix(p, default_bg, w), phi)
            assert res.out1 == pytest.approx(out1, abs=1e-6)
            assert res.out2 == pytest.approx(out2, abs=1e-6)

    def test_nontrivial_background(self, headline_params):
        bg = Background(0.8, 0.4)
        drive = DriveSpec(omega=121.0, phi=0.5)
        res = oracle_scattering(headline_params, bg, drive)
        a, out1, out2 = joint_absorbance(
            scattering_matrix(headline_params, bg, 121.0), 0.5)
        assert res.out1 == pytest.approx(out1, abs=1e-6)
        assert res.out2 == pytest.approx(out2, abs=1e-6)

    def test_cpa_dark_state(self, default_bg):
        # strong-critical model driven at the spectral zero absorbs everything
        p = ModelParams(124.5, 5.0, 0.0, 5.0, 8.0)
        w = 124.5 + math.sqrt(39.0)
        res = oracle_scattering(p, default_bg, DriveSpec(omega=w, phi=0.0))
        assert res.out1 < 1e-10
        assert res.out2 < 1e-10
        assert res.a_joint == pytest.approx(1.0, abs=1e-10)

    def test_cpt_bright_state(self, default_bg):
        # anti-phased inputs at the same frequency are fully released
        p = ModelParams(124.5, 5.0, 0.0, 5.0, 8.0)
        w = 124.5 + math.sqrt(39.0)
        res = oracle_scattering(p, default_bg, DriveSpec(omega=w, phi=math.pi))
        assert res.a_joint == pytest.approx(0.0, abs=1e-9)

    def test_unequal_amplitudes(self, headline_params, default_bg):
        drive = DriveSpec(omega=118.0, phi=0.9, amp1=1.0, amp2=0.4)
        res = oracle_scattering(headline_params, default_bg, drive)
        S = scattering_matrix(headline_params, default_bg, 118.0)
        in2 = 0.4 * np.exp(1j * 0.9)
        out1 = abs(S.s11 + S.s12 * in2) ** 2
        out2 = abs(S.s21 + S.s22 * in2) ** 2
        assert res.out1 == pytest.approx(float(out1), abs=1e-6)
        assert res.out2 == pytest.approx(float(out2), abs=1e-6)
