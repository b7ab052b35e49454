"""The headline experiment: the nonlinear-minus-linear flow is smoother.

Rough H^0 data is evolved and the exactly-computed linear evolution
subtracted.  Across a doubling of the spectral truncation the solution's
H^0.9 norm keeps growing (the datum is not in H^0.9), while the difference's
H^0.9 norm is truncation-stable: the difference lives one derivative higher
than the data.  Above the smoothing range the difference norm itself
diverges.  Sizes here are half the acceptance run's for speed.
"""

import time

import kdvlab as kl

cfg = kl.SolverConfig(dt=2e-4, scheme="RESONANT")
t0 = time.time()
study = kl.resolution_stability_study(
    s=0.0, s1=(0.9, 1.5), N_ladder=[128, 256], seed=42, cfg=cfg,
    sample_times=[1.0, 2.0, 3.0], amplitude=1e-3)
print(f"ladder N=128 -> 256 evolved in {time.time() - t0:.1f} s\n")

for s1 in study.s1_list:
    print(f"s1 = {s1}:")
    for N in study.sizes:
        rep = study.reports[N]
        print(f"  N={N}: ||u||  " + "  ".join(f"{v:9.4f}" for v in rep.norms_u[s1]))
        print(f"        ||N(t)||" + "  ".join(f"{v:9.5f}" for v in rep.norms_diff[s1]))
    pair = (study.sizes[0], study.sizes[1])
    print("  relative change of ||N(t)||:",
          ", ".join(f"{c:.3f}" for c in study.diff_changes[s1][pair]))
    print("  relative change of ||u(t)||:",
          ", ".join(f"{c:.3f}" for c in study.u_changes[s1][pair]))
    print("  smoothing-consistent:", study.verdicts[s1], "\n")

print("verdicts: stable difference below the range boundary s1 < min(3s+1, s+1) = 1,")
print("divergent difference above it -- the numerical signature of the smoothing gain.")
