"""Difference-flow experiments, growth fits, Miura pipeline, frame shift."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import kdvlab as kl
from kdvlab.normal_form import lin_comb
from _oracles import random_supported_field


def test_difference_vanishes_at_zero_time():
    g = kl.random_sobolev_data(0.0, 32, seed=3, amplitude=0.1)
    rep = kl.nonlinear_minus_linear(g, kl.PotentialSpec.zero(),
                                    kl.SolverConfig(dt=1e-3), [0.9, 1.1],
                                    [0.0, 0.5])
    for s1 in (0.9, 1.1):
        assert rep.norms_diff[s1][0] == 0.0
        assert rep.norms_diff[s1][1] > 0.0


def test_smooth_datum_difference_matches_double_resolution():
    cfg = kl.SolverConfig(dt=5e-4)
    reps = {}
    for N in (16, 32):
        g = kl.cosine_field(N)
        reps[N] = kl.nonlinear_minus_linear(g, kl.PotentialSpec.zero(), cfg,
                                            [1.0], [1.0, 2.0])
    for i in range(2):
        a = reps[16].norms_diff[1.0][i]
        b = reps[32].norms_diff[1.0][i]
        assert abs(a - b) / b < 0.01


def test_triangle_inequality_guard_active():
    g = kl.random_sobolev_data(0.0, 16, seed=1, amplitude=0.05)
    rep = kl.nonlinear_minus_linear(g, kl.PotentialSpec.zero(),
                                    kl.SolverConfig(dt=1e-3), [0.9], [1.0])
    s1 = 0.9
    assert rep.norms_diff[s1][0] <= rep.norms_u[s1][0] + rep.data_norm[s1] + 1e-9


def test_ladder_study_verdict_small_case():
    cfg = kl.SolverConfig(dt=5e-4, scheme="RESONANT")
    study = kl.resolution_stability_study(0.0, (0.9,), [64, 128], 21, cfg,
                                          [0.5], amplitude=0.01)
    assert study.verdicts[0.9] is True
    assert study.sizes == (64, 128)


def test_ladder_study_threads_match_serial():
    cfg = kl.SolverConfig(dt=1e-3, scheme="RESONANT")
    a = kl.resolution_stability_study(0.0, (0.9,), [16, 32], 5, cfg, [0.5],
                                      amplitude=0.01, threads=1)
    b = kl.resolution_stability_study(0.0, (0.9,), [16, 32], 5, cfg, [0.5],
                                      amplitude=0.01, threads=2)
    for N in (16, 32):
        assert a.reports[N].norms_diff[0.9] == b.reports[N].norms_diff[0.9]


def test_growth_fit_recovers_polynomial():
    t = np.linspace(0.5, 40, 24)
    fit = kl.growth_fit(t, 3.0 * (1 + t) ** 2)
    assert fit.p == pytest.approx(2.0, abs=0.01)
    flat = kl.growth_fit(t, np.full_like(t, 5.0))
    assert abs(flat.p) < 1e-12


def test_growth_fit_validation():
    t = np.linspace(0.5, 40, 24)
    with pytest.raises(ValueError, match="8 samples"):
        kl.growth_fit(t[:5], np.ones(5))
    with pytest.raises(ValueError, match="decade"):
        kl.growth_fit(np.linspace(1, 2, 12), np.ones(12))
    with pytest.raises(ValueError, match="nonpositive"):
        kl.growth_fit(t, np.zeros_like(t))


def test_paired_growth_fits_consistent_with_bound():
    """Long-horizon rough run: the fitted growth exponent of the difference
    norm is checked against 1 + 6*alpha with alpha fitted from the same
    run's H^0 norm -- a consistency check of the two fits, not a
    reproduction of the analytic bound."""
    g = kl.random_sobolev_data(0.0, 64, seed=42, amplitude=0.05)
    times = list(np.linspace(0.5, 30.0, 16))
    cfg = kl.SolverConfig(dt=4e-4, scheme="RESONANT")
    traj = kl.evolve(g, kl.PotentialSpec.zero(), cfg, times)
    diff_norms, u_norms = [], []
    for s in traj:
        lin = kl.airy_evolve(g, s.t)
        d = kl.FourierField(s.state.coeffs - lin.coeffs, real=False, mean_zero=True)
        diff_norms.append(kl.sobolev_norm(d, 0.9))
        u_norms.append(s.l2)
    fit_diff = kl.growth_fit(times, diff_norms)
    fit_u = kl.growth_fit(times, u_norms)
    bound = 1.0 + 6.0 * max(fit_u.p, 0.0)
    assert fit_diff.p <= bound + 3.0 * fit_diff.stderr + 0.1


class TestMiura:
    def test_cos_closed_form(self):
        m = kl.miura(kl.cosine_field(4))
        assert_allclose(m.coeff(1), 0.5j, atol=1e-16)
        assert_allclose(m.coeff(-1), -0.5j, atol=1e-16)
        assert_allclose(m.coeff(2), 0.25, atol=1e-16)
        assert m.coeff(0) == 0

    def test_zero(self):
        assert np.all(kl.miura(kl.zero_field(4)).coeffs == 0)

    def test_inverse_roundtrip_cos(self):
        u = kl.miura(kl.cosine_field(8))
        inv = kl.miura_inverse(u, tol=1e-12)
        assert inv.converged
        w = kl.pad_to(kl.cosine_field(8), inv.field.N)
        assert np.max(np.abs(inv.field.coeffs - w.coeffs)) < 1e-10

    def test_inverse_of_zero(self):
        inv = kl.miura_inverse(kl.zero_field(8))
        assert inv.converged and np.all(inv.field.coeffs == 0)

    def test_roundtrip_small_random_ensemble(self):
        for seed in range(10):
            w = kl.random_sobolev_data(1.0, 24, seed=seed, amplitude=0.05)
            u = kl.miura(w)
            inv = kl.miura_inverse(u, tol=1e-12)
            assert inv.converged
            back = inv.field.coeffs[inv.field.N - 24: inv.field.N + 25]
            assert np.max(np.abs(back - w.coeffs)) < 1e-10

    def test_intertwines_flows_fourth_order(self):
        w0 = kl.pad_to(lin_comb((1.0, kl.cosine_field(2, 1, 0.4)),
                                (1.0, kl.sine_field(2, 2, 0.2))), 24)
        errs = kl.miura_kdv_residual(w0, [8e-4, 4e-4], horizon=0.5)
        assert errs[0] / errs[1] > 12.0


class TestFrameShift:
    def test_static_cos_profile(self):
        v = kl.cosine_field(4)
        w = kl.galilean_shift_field(v, t=0.7, mu=1.0)
        grid = kl.GridSpec.for_quadratic(4)
        assert_allclose(kl.synthesize(w, grid), np.cos(grid.x - 6 * 0.7), atol=1e-14)

    def test_zero_shift_identity(self):
        v = random_supported_field(8, 8, seed=2)
        w = kl.galilean_shift_field(v, t=0.9, mu=0.0)
        assert np.array_equal(w.coeffs, v.coeffs)

    def test_norms_invariant(self):
        v = random_supported_field(16, 16, seed=3)
        w = kl.galilean_shift_field(v, t=2.3, mu=0.77)
        for s in (0.0, 0.9, 1.8):
            assert_allclose(kl.sobolev_norm(w, s), kl.sobolev_norm(v, s), rtol=1e-14)

    def test_trajectory_shift(self):
        g = random_supported_field(8, 4, seed=4, scale=0.3)
        traj = kl.evolve_mkdv(g, kl.SolverConfig(dt=1e-3), [0.5, 1.0])
        shifted = kl.galilean_shift(traj, mu=kl.mean_square(g))
        assert len(shifted) == 2
        for a, b in zip(traj, shifted):
            assert a.l2 == b.l2
            assert abs(kl.sobolev_norm(b.state, 0.0) - a.l2) < 1e-12


class TestMkdvSmoothing:
    def test_mu_and_transport_recorded(self):
        g = kl.cosine_field(16)
        rep = kl.mkdv_smoothing(g, kl.SolverConfig(dt=1e-3), [1.8], [0.2])
        assert rep.mu == pytest.approx(0.5, rel=1e-12)
        assert rep.c == pytest.approx(3.0, rel=1e-12)

    def test_zero_difference_at_zero_time(self):
        g = kl.random_sobolev_data(1.0, 16, seed=6, amplitude=0.1)
        rep = kl.mkdv_smoothing(g, kl.SolverConfig(dt=1e-3), [1.8], [0.0, 0.2])
        assert rep.norms_diff[1.8][0] == 0.0

    def test_transport_sign_matches_frame_shift(self):
        """The recorded linear comparison must be the frame-shifted free flow;
        with the opposite shift the difference is as large as the state."""
        g = kl.random_sobolev_data(1.0, 48, seed=11, amplitude=0.3)
        mu = kl.mean_square(g)
        t = 0.5
        v = kl.evolve_mkdv(g, kl.SolverConfig(dt=2e-4), [t])[0].state
        right = kl.sobolev_norm(kl.FourierField(
            v.coeffs - kl.airy_evolve(g, t, 6 * mu).coeffs, real=False,
            mean_zero=True), 1.8)
        wrong = kl.sobolev_norm(kl.FourierField(
            v.coeffs - kl.airy_evolve(g, t, -6 * mu).coeffs, real=False,
            mean_zero=True), 1.8)
        assert right < 0.2 * wrong

    def test_miura_route_matches_direct_at_small_size(self):
        """State-level agreement of the two computational routes (the
        truncation families differ only at the boundary modes, so the
        comparison is on the fields, in the frame-shifted picture)."""
        g = kl.random_sobolev_data(1.0, 32, seed=11, amplitude=0.1)
        t = 0.5
        direct = kl.evolve_mkdv(g, kl.SolverConfig(dt=5e-5), [t],
                                mean_free=True)[0].state
        u0 = kl.crop_to(kl.miura(g), 32)
        u = kl.evolve(u0, kl.PotentialSpec.zero(),
                      kl.SolverConfig(dt=5e-5, beta=-6.0, scheme="RESONANT"),
                      [t])[0].state
        inv = kl.miura_inverse(u, tol=1e-11)
        assert inv.converged
        d = inv.field.coeffs - direct.coeffs
        assert np.linalg.norm(d) < 0.01 * np.linalg.norm(direct.coeffs)
        lo = slice(32 - 16, 32 + 17)
        assert np.linalg.norm(d[lo]) < 0.005 * np.linalg.norm(direct.coeffs[lo])
