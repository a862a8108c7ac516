"""Frequency-resolved and spatio-temporal fidelity oracles.

The degenerate-daughter (u_s = u_i) preset is the physically interesting
branch: the spectral fidelity genuinely depends on t0 through the single
ratio t0/tau with tau = (L/2)(1/u_p - 1/u_s), while the spatio-temporal
fidelity is exactly independent of both t0 and L (the pump-weight integral
of the shifted line overlap telescopes; the odd part of the cumulative
weight cancels against even integrands).  The non-degenerate branch
factorizes completely and reproduces the super-Gaussian-shaped line overlap
(2 pi a)^(1/4) Erf(1/(2 sqrt(a))) at every pulse duration.
"""
import math

import numpy as np
import pytest

from sincgauss import (
    CrystalOptics,
    PumpSpec,
    QuadSpec,
    fidelity_spectral_oracle,
    fidelity_spatiotemporal_oracle,
    load_preset,
    optimize_factors,
    pump_dominated_t0,
    sinc_dominated_t0,
    sweep,
)

OPT, PUMP = load_preset("typical-ppktp-like")
TAU = 0.5 * OPT.length * abs(1 / OPT.u_pump - 1 / OPT.u_signal)


def pump_at(R):
    """Pump with pulse duration t0 = R * tau."""
    return PumpSpec(waist=PUMP.waist, t0=R * TAU)


def line_overlap(alpha):
    return (2 * math.pi * alpha) ** 0.25 * math.erf(1 / (2 * math.sqrt(alpha)))


class TestSpectralDegenerate:
    def test_sinc_dominated_frozen_value(self):
        rep = fidelity_spectral_oracle(0.25, OPT, pump_at(0.02))
        assert rep.fidelity == pytest.approx(0.94711074, abs=1e-6)

    def test_pump_dominated_approaches_unity(self):
        rep = fidelity_spectral_oracle(0.25, OPT, PumpSpec(waist=PUMP.waist,
                                                           t0=2 * pump_dominated_t0(OPT)))
        assert rep.fidelity >= 1 - 1e-3

    def test_argmax_in_sinc_dominated_regime(self):
        res = optimize_factors("gaussian", "spectral", OPT, pump_at(0.02))
        assert res.argmax[0] == pytest.approx(0.25, abs=0.01)
        assert res.argmax[0] == pytest.approx(0.2550, abs=2e-3)
        assert res.value == pytest.approx(0.9471453, abs=2e-4)

    def test_argmax_stable_deep_in_regime(self):
        a1 = optimize_factors("gaussian", "spectral", OPT, pump_at(0.02)).argmax[0]
        a2 = optimize_factors("gaussian", "spectral", OPT, pump_at(0.04)).argmax[0]
        assert abs(a1 - a2) <= 1e-3

    def test_argmax_drifts_to_one_sixth_when_pump_dominates(self):
        # with the pump envelope much narrower than the sinc, maximizing the
        # overlap matches the curvatures: sinc(x) ~ 1 - x^2/6, so the true
        # argmax tends to 1/6, far from 0.25 (the fidelity is ~1 regardless).
        res = optimize_factors("gaussian", "spectral", OPT, pump_at(20.0))
        assert res.argmax[0] == pytest.approx(1 / 6, abs=0.01)
        assert res.value >= 1 - 1e-6

    def test_fidelity_monotone_in_t0_at_fixed_alpha(self):
        pts = sweep("gaussian", "spectral", [TAU * r for r in (0.05, 0.3, 1.0, 5.0, 40.0)],
                    variable="t0", alpha=0.25, opt=OPT, pump=PUMP)
        fids = [p.report.fidelity for p in pts]
        assert all(b >= a - 1e-12 for a, b in zip(fids, fids[1:]))

    def test_L_scaling_invariance_deep_in_sinc_regime(self):
        # exact only in the t0 -> 0 limit; deep in the regime the residual
        # t0/tau dependence is linear and tiny
        t0 = 1e-4 * TAU
        opt2 = CrystalOptics(2 * OPT.length, OPT.k_pump, OPT.u_pump,
                             OPT.u_signal, OPT.u_idler)
        f1 = fidelity_spectral_oracle(0.25, OPT, PumpSpec(waist=PUMP.waist, t0=t0)).fidelity
        f2 = fidelity_spectral_oracle(0.25, opt2, PumpSpec(waist=PUMP.waist, t0=t0)).fidelity
        assert abs(f1 - f2) <= 5e-5

    def test_no_group_velocity_mismatch_edge(self):
        opt0 = CrystalOptics(OPT.length, OPT.k_pump, OPT.u_signal,
                             OPT.u_signal, OPT.u_signal)
        rep = fidelity_spectral_oracle(0.25, opt0, PUMP)
        assert rep.fidelity == 1.0


class TestSpectralNonDegenerate:
    def test_factorizes_to_line_overlap(self):
        opt = CrystalOptics(OPT.length, OPT.k_pump, OPT.u_pump,
                            OPT.u_signal, OPT.u_signal * 1.05)
        for alpha in (0.15, 0.25, 0.4):
            rep = fidelity_spectral_oracle(alpha, opt, PUMP)
            assert rep.fidelity == pytest.approx(line_overlap(alpha), abs=1e-8)

    def test_t0_independent(self):
        opt = CrystalOptics(OPT.length, OPT.k_pump, OPT.u_pump,
                            OPT.u_signal, OPT.u_signal * 1.05)
        f = [fidelity_spectral_oracle(0.25, opt, pump_at(r)).fidelity
             for r in (0.05, 1.0, 30.0)]
        assert max(f) - min(f) <= 1e-9


class TestSpatioTemporal:
    def test_sinc_dominated_value(self):
        t0 = 0.5 * sinc_dominated_t0(OPT)
        rep = fidelity_spatiotemporal_oracle(0.25, OPT, PumpSpec(waist=PUMP.waist, t0=t0))
        assert rep.fidelity == pytest.approx(0.94, abs=0.01)
        assert rep.fidelity == pytest.approx(0.9434162919, abs=1e-7)

    def test_exactly_t0_independent(self):
        # the paper expected growth with t0; the exact even-odd cancellation
        # makes the degenerate-branch fidelity independent of the pulse
        # duration (see the module docstring); tenfold t0 leaves it unchanged
        t0 = 0.3 * sinc_dominated_t0(OPT)
        f1 = fidelity_spatiotemporal_oracle(0.25, OPT, PumpSpec(waist=PUMP.waist, t0=t0)).fidelity
        f2 = fidelity_spatiotemporal_oracle(0.25, OPT, PumpSpec(waist=PUMP.waist, t0=10 * t0)).fidelity
        assert f1 == pytest.approx(f2, abs=5e-9)

    def test_L_doubling_invariance(self):
        t0 = 0.5 * sinc_dominated_t0(OPT)
        p = PumpSpec(waist=PUMP.waist, t0=t0)
        opt2 = CrystalOptics(2 * OPT.length, OPT.k_pump, OPT.u_pump,
                             OPT.u_signal, OPT.u_idler)
        f1 = fidelity_spatiotemporal_oracle(0.25, OPT, p).fidelity
        f2 = fidelity_spatiotemporal_oracle(0.25, opt2, p).fidelity
        assert abs(f1 - f2) <= 2e-9

    def test_matches_line_overlap_closed_form(self):
        t0 = 0.5 * sinc_dominated_t0(OPT)
        rep = fidelity_spatiotemporal_oracle(0.3, OPT, PumpSpec(waist=PUMP.waist, t0=t0))
        assert rep.fidelity == pytest.approx(line_overlap(0.3), abs=1e-7)

    def test_nondegenerate_branch_same_constant(self):
        opt = CrystalOptics(OPT.length, OPT.k_pump, OPT.u_pump,
                            OPT.u_signal, OPT.u_signal * 1.07)
        rep = fidelity_spatiotemporal_oracle(0.25, opt, PUMP)
        assert rep.fidelity == pytest.approx(line_overlap(0.25), abs=1e-8)

    def test_argmax(self):
        t0 = 0.5 * sinc_dominated_t0(OPT)
        res = optimize_factors("gaussian", "spatio-temporal", OPT,
                               PumpSpec(waist=PUMP.waist, t0=t0),
                               spec=QuadSpec(rel_tol=1e-8, abs_tol=1e-11))
        assert res.argmax[0] == pytest.approx(0.2551, abs=2e-3)
        assert res.value == pytest.approx(0.94345, abs=1e-4)

    def test_invalid_alpha(self):
        with pytest.raises(ValueError):
            fidelity_spatiotemporal_oracle(-0.1, OPT, PUMP)
