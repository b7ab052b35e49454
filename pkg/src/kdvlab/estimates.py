"""Brute-force and ensemble verification of the smoothing estimates.

Three probes:

  * an exhaustive frequency-lattice scan of the quadrilinear smoothing
    multiplier, whose boundedness encodes the gain s1 < min(3s+1, s+1);
  * a random-data ensemble for the bilinear boundary form's H^s x H^s ->
    H^{s1} bound (valid for s > -1/2, s1 <= s+1);
  * a truncation ladder for the diagonal resonant term, whose growth
    exponent s1 - 3s - 1 marks the sharpness of the smoothing range.

Lattice arithmetic is exact (int64); only the final fractional powers are
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import FourierField, _hermitize, random_sobolev_data, sobolev_norm
from .normal_form import boundary_bilinear

__all__ = [
    "MultiplierScanResult",
    "bilinear_ratio_ensemble",
    "multiplier_scan",
    "resonant_sharpness",
    "resonant_term",
    "sharpness_datum",
]


@dataclass(frozen=True)
class MultiplierScanResult:
    max_ratio: float
    argmax: tuple[int, int, int, int]
    K: int
    s: float
    s1: float
    eps: float
    evaluated: int


def multiplier_scan(s: float, s1: float, eps: float = 0.01, K: int = 40) -> MultiplierScanResult:
    """Max of the smoothing multiplier over the admissible lattice |k_i| <= K.

    The enumerand is |k1 k2 k3|^{-s} |k4|^{s1} divided by
    |k1| (|k1+k2||k1+k3||k2+k3|)^{1/2-7eps} |k1 k2 k3 k4|^{-eps}, over
    zero-sum quadruples of nonzero frequencies with all three pairwise sums
    nonzero.  The ratio is symmetric under swapping the second and third
    frequencies, so only ordered pairs k2 <= k3 are enumerated.
    """
    if K < 2:
        raise ValueError("need K >= 2")
    rng = np.arange(-K, K + 1, dtype=np.int64)
    rng = rng[rng != 0]
    K2, K3 = np.meshgrid(rng, rng, indexing="ij")
    upper = K2 <= K3  # k2 <-> k3 symmetry halving
    best = -np.inf
    arg = (0, 0, 0, 0)
    evaluated = 0
    for k1 in rng:
        k4 = -(k1 + K2 + K3)
        valid = (
            upper
            & (k4 != 0)
            & (np.abs(k4) <= K)
            & (k1 + K2 != 0)
            & (k1 + K3 != 0)
            & (K2 + K3 != 0)
        )
        if not valid.any():
            continue
        k2v = K2[valid].astype(float)
        k3v = K3[valid].astype(float)
        k4v = k4[valid].astype(float)
        k1f = float(k1)
        evaluated += k2v.size
        num = np.abs(k1f * k2v * k3v) ** (-s) * np.abs(k4v) ** s1
        den = (
            abs(k1f)
            * (np.abs((k1 + K2)[valid] * (k1 + K3)[valid] * (K2 + K3)[valid]).astype(float))
            ** (0.5 - 7.0 * eps)
            * np.abs(k1f * k2v * k3v * k4v) ** (-eps)
        )
        ratios = num / den
        i = int(np.argmax(ratios))
        if ratios[i] > best:
            best = float(ratios[i])
            arg = (int(k1), int(k2v[i]), int(k3v[i]), int(k4v[i]))
    return MultiplierScanResult(best, arg, K, s, s1, eps, evaluated)


def bilinear_ratio_ensemble(s: float, s1: float, trials: int, N: int,
                            seed: int, amplitude: float = 1.0) -> float:
    """Max over random rough-data pairs of ||B(u,v)||_{H^{s1}} / (||u|| ||v||).

    Finite and stable in N for s > -1/2 and s1 <= s+1; the ratio is invariant
    under rescaling either argument.
    """
    if s <= -0.5:
        raise ValueError("the bilinear bound needs s > -1/2")
    best = 0.0
    for i in range(trials):
        u = random_sobolev_data(s, N, seed + 2 * i, amplitude)
        v = random_sobolev_data(s, N, seed + 2 * i + 1, amplitude)
        num = sobolev_norm(boundary_bilinear(u, v, modulated=False), s1)
        den = sobolev_norm(u, s) * sobolev_norm(v, s)
        best = max(best, num / den)
    return best


def sharpness_datum(s: float, N: int) -> FourierField:
    """Extremal profile for the resonant-term ladder.

    |g_k| = |k|^{-s-1/6}: the cube of the H^s-weighted coefficients then sits
    exactly at the square-summability borderline, so the resonant term's
    H^{s1} ladder converges for s1 < 3s+1, diverges like N^{s1-3s-1} above,
    and picks up only a logarithm at equality.
    """
    coeffs = np.zeros(2 * N + 1, dtype=complex)
    k = np.arange(1, N + 1, dtype=float)
    coeffs[N + 1 :] = k ** (-s - 1.0 / 6.0)
    return FourierField(_hermitize(coeffs), real=True, mean_zero=True)


def resonant_term(u: FourierField) -> FourierField:
    """Diagonal cubic term -(2i/3) u_k |u_k|^2 / k left after the reduction."""
    if not u.mean_zero:
        raise ValueError("resonant term needs a mean-zero field")
    k = u.wavenumbers
    out = np.zeros_like(u.coeffs)
    nz = k != 0
    out[nz] = (-2j / 3.0) * u.coeffs[nz] * np.abs(u.coeffs[nz]) ** 2 / k[nz]
    if u.real:
        out = _hermitize(out)
    return FourierField(out, real=u.real, mean_zero=True)


@dataclass(frozen=True)
class SharpnessLadder:
    s: float
    s1: float
    sizes: tuple[int, ...]
    norms: tuple[float, ...]
    slope: float


def resonant_sharpness(s: float, s1: float, N_ladder: list[int]) -> SharpnessLadder:
    """H^{s1} norm of the resonant term of the extremal datum, per truncation.

    The fitted log-log slope of the ladder approaches max(0, s1 - 3s - 1); at
    the equality endpoint s1 = 3s+1 the divergence is logarithmic and the
    slope is reported without any pass/fail meaning.
    """
    if len(N_ladder) < 2:
        raise ValueError("need at least two ladder entries to fit a slope")
    norms = []
    for N in N_ladder:
        norms.append(sobolev_norm(resonant_term(sharpness_datum(s, N)), s1))
    slope = float(np.polyfit(np.log(N_ladder), np.log(norms), 1)[0])
    return SharpnessLadder(s, s1, tuple(int(n) for n in N_ladder), tuple(norms), slope)
