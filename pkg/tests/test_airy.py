"""Linear propagator: exact phases, group property, revival, jump metrics."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import kdvlab as kl
from _oracles import random_supported_field, rational_time_reference


def test_cos_translates():
    t = 0.731
    out = kl.airy_evolve(kl.cosine_field(2), t)
    grid = kl.GridSpec.for_quadratic(2)
    assert_allclose(kl.synthesize(out, grid), np.cos(grid.x + t), atol=1e-14)


def test_single_mode_phases():
    f = kl.field_from_modes(2, {2: 1.0}, real=False)
    out = kl.airy_evolve(f, 0.5)
    assert abs(out.coeff(2) - np.exp(1j * 8 * 0.5)) < 1e-14
    g = kl.field_from_modes(1, {1: 1.0}, real=False)
    out2 = kl.airy_evolve(g, 0.3, kl.LinearOp(1.0))
    assert abs(out2.coeff(1) - np.exp(2j * 0.3)) < 1e-14


def test_unitarity_all_norms():
    f = random_supported_field(32, 32, seed=4)
    out = kl.airy_evolve(f, 1.37)
    for s in (-0.5, 0.0, 0.9, 2.0):
        assert_allclose(kl.sobolev_norm(out, s), kl.sobolev_norm(f, s), rtol=1e-13)


def test_group_property():
    f = random_supported_field(8, 8, seed=6)
    a = kl.airy_evolve(f, 0.6 + 0.9)
    b = kl.airy_evolve(kl.airy_evolve(f, 0.6), 0.9)
    scale = np.max(np.abs(f.coeffs))
    assert np.max(np.abs(a.coeffs - b.coeffs)) < 1e-12 * scale


@pytest.mark.parametrize("c", [0.0, 1.0, -3.0])
def test_revival_exact_for_integer_transport(c):
    g = kl.square_wave(256)
    out = kl.airy_evolve(g, 2 * np.pi, kl.LinearOp(c))
    assert np.array_equal(out.coeffs, g.coeffs)


def test_reality_bitwise_invariant():
    f = random_supported_field(16, 16, seed=8)
    out = kl.airy_evolve(f, 2 * np.pi * (np.sqrt(2) - 1))
    n = out.N
    assert np.array_equal(out.coeffs[:n], np.conj(out.coeffs[n + 1:][::-1]))


def test_talbot_profile_against_rational_oracle():
    N = 512
    g = kl.square_wave(N)
    grid = kl.GridSpec.for_quadratic(N)
    prof = kl.talbot_profile(g, 2 * np.pi / 3, grid)
    ref = rational_time_reference(g, 1, 3, grid)
    assert np.max(np.abs(prof - ref)) < 1e-8  # truncation-level agreement only


def test_talbot_identity_at_zero():
    g = kl.square_wave(64)
    grid = kl.GridSpec.for_quadratic(64)
    assert_allclose(kl.talbot_profile(g, 0.0, grid), kl.synthesize(g, grid), atol=0)


def test_jump_metric_step_vs_smooth():
    M = 4096
    x = 2 * np.pi * np.arange(M) / M
    step = np.where(x < np.pi, 1.0, 0.0)
    jm = kl.jump_metric(step, [512, 1024, 2048])
    assert all(abs(v - 1.0) < 1e-12 for v in jm.values())
    smooth = np.cos(x)
    js = kl.jump_metric(smooth, [512, 1024, 2048])
    assert_allclose(js[512], 2 * np.pi / 512, rtol=0.01)
    assert_allclose(js[1024] / js[2048], 2.0, rtol=0.01)


def test_jump_metric_validation():
    with pytest.raises(ValueError, match="empty"):
        kl.jump_metric(np.zeros(16), [])
    with pytest.raises(ValueError, match="increasing"):
        kl.jump_metric(np.zeros(16), [8, 4])
    with pytest.raises(ValueError, match="divide"):
        kl.jump_metric(np.zeros(16), [5])
