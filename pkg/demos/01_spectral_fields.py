"""Fields, transforms, Sobolev norms, convolution, rough data.

Walks through the coefficient representation every other capability builds
on: synthesis/analysis round trips, the homogeneous |k|^s norms, exact
convolution, and the seeded power-law data used by the smoothing runs.
"""

import numpy as np

import kdvlab as kl

# a real mean-zero trigonometric polynomial and its samples
f = kl.cosine_field(8)
grid = kl.GridSpec.for_quadratic(8)
samples = kl.synthesize(f, grid)
print("cos x sampled on", grid.M, "points; max error vs numpy:",
      np.max(np.abs(samples - np.cos(grid.x))))

back = kl.analyze(samples, 8)
print("analysis round trip error:", np.max(np.abs(back.coeffs - f.coeffs)))

# Sobolev norms: cos x has |u_{+-1}| = 1/2, so every homogeneous norm is 1/sqrt(2)
for s in (-1.0, 0.0, 1.5):
    print(f"||cos x||_H^{s:+.1f} =", kl.sobolev_norm(f, s))

# exact convolution: cos^2 x = 1/2 + cos(2x)/2
c = kl.convolve(f, f)
print("cos*cos coefficients: k=0 ->", c.coeff(0), " k=2 ->", c.coeff(2))

# rough data: |g_k| = amplitude * |k|^(-s-1/2-margin), nested across truncations
g256 = kl.random_sobolev_data(0.0, 256, seed=42, amplitude=0.1)
g512 = kl.random_sobolev_data(0.0, 512, seed=42, amplitude=0.1)
shared = np.array_equal(g256.coeffs[g256.N + 1:], g512.coeffs[g512.N + 1:g512.N + 257])
print("first 256 modes of the N=512 datum match the N=256 datum:", shared)
k = np.arange(1, 257)
slope = np.polyfit(np.log(k), np.log(np.abs(g256.coeffs[g256.N + 1:])), 1)[0]
print("coefficient decay slope:", slope, "(target -(s+1/2+margin) = -0.51)")

# norms of the same rough function at the two truncations: L2 converges,
# H^0.9 keeps growing -- the signature the resolution ladders exploit
for s in (0.0, 0.9):
    print(f"H^{s:.1f}: N=256 -> {kl.sobolev_norm(g256, s):.4f}, "
          f"N=512 -> {kl.sobolev_norm(g512, s):.4f}")
