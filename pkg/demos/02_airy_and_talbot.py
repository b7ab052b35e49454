"""The exact linear flow and the dispersive-quantization probe.

The propagator is diagonal with multiplier e^{i(k^3+ck)t}.  At t = 2pi the
flow revives the data exactly; at rational fractions of 2pi a square wave
evolves into a step-like profile (the jump metric stays pinned), while at
an irrational time the profile is continuous and the metric decays.
"""

import numpy as np

import kdvlab as kl

N = 4096
g = kl.square_wave(N)
grid = kl.GridSpec(N, 16384)

# full revival, exact to the last bit for integer transport
revived = kl.airy_evolve(g, 2 * np.pi)
print("revival at t=2pi is bitwise exact:", np.array_equal(revived.coeffs, g.coeffs))

# unitarity of the flow in every Sobolev norm
out = kl.airy_evolve(g, 0.337)
print("H^0 norm before/after:", kl.sobolev_norm(g, 0.0), kl.sobolev_norm(out, 0.0))

ladder = [512, 1024, 2048]
for label, t in (("rational t = 2pi/3", 2 * np.pi / 3),
                 ("irrational t = 2pi(sqrt2-1)", 2 * np.pi * (np.sqrt(2) - 1))):
    prof = kl.talbot_profile(g, t, grid)
    jm = kl.jump_metric(prof, ladder)
    print(f"{label}: max adjacent gap per resolution "
          + ", ".join(f"M={m}: {v:.3f}" for m, v in jm.items()))
print("-> the rational-time profile keeps genuine jumps (stable gap);")
print("   the irrational-time profile is continuous (decaying gap).")
