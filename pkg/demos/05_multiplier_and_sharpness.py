"""Brute-force verification of the smoothing estimates.

The quadrilinear multiplier stays bounded over the frequency lattice exactly
when the smoothing index obeys s1 < min(3s+1, s+1); outside that range the
lattice maximum grows without bound.  The diagonal resonant term's truncation
ladder exposes the same threshold through its growth exponent s1 - 3s - 1.
"""

import kdvlab as kl

print("multiplier scan at s = 0, eps = 0.01:")
for s1 in (0.9, 1.2):
    row = []
    for K in (10, 20, 40, 80):
        row.append(kl.multiplier_scan(0.0, s1, 0.01, K))
    vals = ", ".join(f"K={r.K}: {r.max_ratio:.4f}" for r in row)
    verdict = "bounded" if s1 < 1 else "growing (outside the range)"
    print(f"  s1={s1}: {vals}  -> {verdict}")
    print(f"    argmax at K=80: {row[-1].argmax}")

print("\nbilinear boundary-form ensemble (s=0, s1=1):")
for N in (64, 128):
    r = kl.bilinear_ratio_ensemble(0.0, 1.0, trials=10, N=N, seed=3)
    print(f"  N={N}: max ||B(u,v)|| / (||u|| ||v||) = {r:.4f}")

print("\nresonant-term sharpness ladder (s=0):")
for s1 in (0.5, 1.0, 1.5):
    lad = kl.resonant_sharpness(0.0, s1, [64, 128, 256, 512])
    note = {0.5: "below threshold: flat", 1.0: "endpoint: logarithmic",
            1.5: "above: slope s1-3s-1 = 0.5"}[s1]
    print(f"  s1={s1}: norms " + ", ".join(f"{v:.3f}" for v in lad.norms)
          + f"  slope {lad.slope:.4f}  ({note})")
