"""Exact evolution under L = -d^3/dx^3 + c d/dx and dispersive-quantization probes.

The flow is diagonal in Fourier: (e^{tL}g)_k = e^{i(k^3 + ck)t} g_k.  Phase
angles are reduced modulo 2pi in extended precision so that large wavenumbers
keep accurate phases; when t is the float 2pi times an integer and c is an
integer, the reduction is exact and the revival e^{2pi L}g = g holds to the
last bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import FourierField, GridSpec, _hermitize, synthesize

__all__ = ["LinearOp", "airy_evolve", "airy_phases", "jump_metric", "talbot_profile"]

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class LinearOp:
    """Transport coefficient c of the linear operator -d^3/dx^3 + c d/dx."""

    c: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.c):
            raise ValueError("transport coefficient must be finite")


def airy_phases(k: np.ndarray, t: float, c: float = 0.0) -> np.ndarray:
    """e^{i(k^3 + ck)t} for an integer wavenumber array k.

    The angle (k^3 + ck) * t is reduced as 2pi * frac(m * t / 2pi) with the
    product taken in longdouble; for integer m and integer t / 2pi the
    fractional part vanishes identically, making full revivals exact.
    """
    k = np.asarray(k)
    tau = np.longdouble(t / _TWO_PI)
    if float(c).is_integer():
        m = k.astype(np.int64) ** 3 + np.int64(c) * k.astype(np.int64)
        frac = np.mod(m.astype(np.longdouble) * tau, 1.0)
    else:
        m = k.astype(np.longdouble) ** 3 + np.longdouble(c) * k
        frac = np.mod(m * tau, 1.0)
    return np.exp(2j * np.pi * frac.astype(float))


def airy_evolve(g: FourierField, t: float, op: LinearOp | float = 0.0) -> FourierField:
    """Apply the linear propagator; norm-preserving in every H^s."""
    c = op.c if isinstance(op, LinearOp) else float(op)
    k = g.wavenumbers
    phases = airy_phases(k, t, c)
    coeffs = g.coeffs * phases
    if g.real:
        # phases at -k are exact conjugates only up to rounding in the mod
        # reduction; re-mirror so reality stays a bitwise invariant.
        coeffs = _hermitize(coeffs)
    return FourierField(coeffs, real=g.real, mean_zero=g.mean_zero)


def talbot_profile(
    g: FourierField, t: float, grid: GridSpec, op: LinearOp | float = 0.0
) -> np.ndarray:
    """Physical samples of e^{tL}g at resolution grid.M."""
    if not g.real:
        raise ValueError("talbot_profile expects real data")
    return synthesize(airy_evolve(g, t, op), grid)


def jump_metric(samples: np.ndarray, ladder: list[int]) -> dict[int, float]:
    """Max adjacent gap of the profile resampled at each resolution.

    For each M in the (increasing) ladder the fine sample vector is strided
    down to M points and max_j |f(x_{j+1}) - f(x_j)| is taken around the
    circle.  A genuine jump keeps the gap pinned near the jump height as M
    grows; a continuous profile lets it decay.
    """
    samples = np.asarray(samples)
    if len(ladder) == 0:
        raise ValueError("empty resolution ladder")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("resolution ladder must be increasing")
    out: dict[int, float] = {}
    for M in ladder:
        if len(samples) % M != 0:
            raise ValueError(f"resolution {M} does not divide sample count {len(samples)}")
        sub = samples[:: len(samples) // M]
        gaps = np.abs(np.diff(np.concatenate([sub, sub[:1]])))
        out[int(M)] = float(np.max(gaps))
    return out
