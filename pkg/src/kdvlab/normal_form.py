"""Differentiation-by-parts reduction of the Fourier-side KdV system.

Integrating the oscillatory phase e^{-3i k k1 k2 t} by parts trades the
derivative in the quadratic nonlinearity for a cubic nonlinearity plus
resonant terms.  This module implements the three operators produced by that
reduction -- a bilinear boundary term, a diagonal resonant cubic term, and a
nonresonant trilinear remainder -- together with the resonance-set algebra,
machine-precision verification of the reduction identity, and the exact
integer identities the phase bookkeeping rests on.

All operators return exact (untruncated) outputs: a bilinear form applied to
inputs supported on |k| <= N returns every generated mode up to 2N, so no
spurious truncation residual can enter the identity checks.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

import numpy as np

from .airy import airy_phases
from .evolve import PotentialSpec, TrajectorySample
from .fields import FourierField, _hermitize, pad_to, sobolev_norm

__all__ = [
    "ResonanceClass",
    "bilinear_phase_identity",
    "boundary_bilinear",
    "cubic_sum_identity",
    "duhamel_residual",
    "inner_pair_identity",
    "interaction_rhs",
    "lin_comb",
    "nonresonant_trilinear",
    "normal_form_residual",
    "resonance_partition",
    "resonant_cubic",
    "resonant_set_sum",
    "sweep_bilinear_identity",
    "sweep_cubic_sum_identity",
]


def _require_mean_zero(*fields: FourierField) -> None:
    for f in fields:
        if not f.mean_zero:
            raise ValueError("operator inputs must be mean-zero")


def lin_comb(*terms: tuple[complex, FourierField]) -> FourierField:
    """Linear combination of fields, padded to the widest truncation."""
    N = max(f.N for _, f in terms)
    out = np.zeros(2 * N + 1, dtype=complex)
    real = True
    mean_zero = True
    for a, f in terms:
        g = pad_to(f, N)
        out += a * g.coeffs
        real = real and f.real and float(np.imag(a)) == 0.0
        mean_zero = mean_zero and f.mean_zero
    if real:
        out = _hermitize(out)
    return FourierField(out, real=real, mean_zero=mean_zero and bool(out[N] == 0.0))


# ----------------------------------------------------------------------
# the three reduction operators
# ----------------------------------------------------------------------


def boundary_bilinear(u: FourierField, v: FourierField, t: float = 0.0,
                      modulated: bool = True) -> FourierField:
    """Bilinear boundary term of the by-parts reduction.

    out_k = -(1/3) sum_{k1+k2=k} e^{-3i k k1 k2 t} u_{k1} v_{k2} / (k1 k2),
    with out_0 = 0.  ``modulated=False`` drops the phase (the original-variable
    form that enters the time-integrated identity).
    """
    _require_mean_zero(u, v)
    n_out = u.N + v.N
    k_out = np.arange(-n_out, n_out + 1)
    k1 = np.arange(-u.N, u.N + 1)
    K = k_out[:, None].astype(np.int64)
    K1 = k1[None, :].astype(np.int64)
    K2 = K - K1
    valid = (K1 != 0) & (K2 != 0) & (np.abs(K2) <= v.N) & (K != 0)
    U = np.broadcast_to(u.coeffs[None, :], K1.shape)
    V = v.coeffs[np.clip(K2 + v.N, 0, 2 * v.N)]
    denom = np.where(valid, K1 * K2, 1).astype(float)
    terms = np.where(valid, U * V, 0.0) / denom
    if modulated and t != 0.0:
        terms = terms * np.exp(-3j * t * (K * K1 * K2).astype(float))
        terms = np.where(valid, terms, 0.0)
    out = -(1.0 / 3.0) * terms.sum(axis=1)
    real = u.real and v.real
    if real:
        out = _hermitize(out)
    out[n_out] = 0.0
    return FourierField(out, real=real, mean_zero=True)


def interaction_rhs(v: FourierField, lam: FourierField, t: float) -> FourierField:
    """Time derivative of the interaction-picture variables:

    dv_k/dt = -ik sum_{k1+k2=k} e^{-3i k k1 k2 t} (v_{k1} + lam_{k1}) v_{k2}.
    """
    _require_mean_zero(v, lam)
    a = lin_comb((1.0, v), (1.0, lam))
    n_out = a.N + v.N
    k_out = np.arange(-n_out, n_out + 1)
    k1 = np.arange(-a.N, a.N + 1)
    K = k_out[:, None].astype(np.int64)
    K1 = k1[None, :].astype(np.int64)
    K2 = K - K1
    valid = (np.abs(K2) <= v.N) & (K != 0)
    A = np.broadcast_to(a.coeffs[None, :], K1.shape)
    V = v.coeffs[np.clip(K2 + v.N, 0, 2 * v.N)]
    terms = np.where(valid, A * V, 0.0)
    if t != 0.0:
        terms = terms * np.exp(-3j * t * (K * K1 * K2).astype(float))
        terms = np.where(valid, terms, 0.0)
    out = -1j * k_out * terms.sum(axis=1)
    if v.real and lam.real:
        out = _hermitize(out)
    return FourierField(out, real=v.real and lam.real, mean_zero=True)


def resonant_cubic(u: FourierField, lam: FourierField) -> FourierField:
    """Diagonal resonant term produced by the reduction.

    out_k = (i/3) lam_k sum_{|j| != |k|} lam_j conj(u_j) / j
          - (i/3) (conj(lam_k) + 2 conj(u_k)) (lam_k + u_k) u_k / k,
    out_0 = 0.  The same formula serves the interaction-picture and the
    original variables (the phases cancel on the diagonal).
    """
    _require_mean_zero(u, lam)
    N = max(u.N, lam.N)
    uu = pad_to(u, N).coeffs
    ll = pad_to(lam, N).coeffs
    k = np.arange(-N, N + 1)
    nz = k != 0
    contrib = np.zeros_like(uu)
    contrib[nz] = ll[nz] * np.conj(uu[nz]) / k[nz]
    total = contrib.sum()
    # remove j = k and j = -k from the lattice sum
    excl = total - contrib - contrib[::-1]
    out = np.zeros_like(uu)
    out[nz] = (1j / 3.0) * ll[nz] * excl[nz] - (1j / 3.0) * (
        np.conj(ll[nz]) + 2.0 * np.conj(uu[nz])
    ) * (ll[nz] + uu[nz]) * uu[nz] / k[nz]
    if u.real and lam.real:
        out = _hermitize(out)
    return FourierField(out, real=u.real and lam.real, mean_zero=True)


def nonresonant_trilinear(u: FourierField, v: FourierField, w: FourierField,
                          t: float = 0.0, modulated: bool = True) -> FourierField:
    """Trilinear remainder over frequency triples with nonvanishing phase.

    out_k = (i/3) sum_{k1+k2+k3=k} e^{-3it(k1+k2)(k2+k3)(k3+k1)}
            u_{k1} v_{k2} w_{k3} / k1,
    restricted to (k1+k2)(k1+k3)(k2+k3) != 0, with out_0 = 0.  The triple sum
    is evaluated directly (the resonance exclusion and the phase live on the
    factored frequencies, so no transform shortcut applies); cost O(N^4).
    """
    _require_mean_zero(u, v, w)
    n_out = u.N + v.N + w.N
    out = np.zeros(2 * n_out + 1, dtype=complex)
    k2 = np.arange(-v.N, v.N + 1, dtype=np.int64)
    k3 = np.arange(-w.N, w.N + 1, dtype=np.int64)
    K2 = k2[:, None]
    K3 = k3[None, :]
    V = v.coeffs[:, None]
    W = w.coeffs[None, :]
    pair23 = K2 + K3
    for i1, k1 in enumerate(range(-u.N, u.N + 1)):
        if k1 == 0 or u.coeffs[i1] == 0.0:
            continue
        mask = ((k1 + K2) != 0) & ((k1 + K3) != 0) & (pair23 != 0) & (K2 != 0) & (K3 != 0)
        terms = np.where(mask, V * W, 0.0) * (u.coeffs[i1] / k1)
        if modulated and t != 0.0:
            phase = np.exp(-3j * t * ((k1 + K2) * pair23 * (K3 + k1)).astype(float))
            terms = np.where(mask, terms * phase, 0.0)
        idx = (k1 + K2 + K3) + n_out
        np.add.at(out, idx.ravel(), terms.ravel())
    out *= 1j / 3.0
    real = u.real and v.real and w.real
    if real:
        out = _hermitize(out)
    out[n_out] = 0.0
    return FourierField(out, real=real, mean_zero=True)


# ----------------------------------------------------------------------
# resonance-set algebra
# ----------------------------------------------------------------------


class ResonanceClass(Enum):
    """Where the reduction phase (k1+k2)(k2+k3)(k3+k1) vanishes."""

    BOTH_PAIRS = "first+second and first+third vanish"
    PAIR_FIRST_SECOND = "only first+second vanishes"
    PAIR_FIRST_THIRD = "only first+third vanishes"
    EXCLUDED_LAST_PAIR = "second+third vanishes (dropped from the trilinear sum)"
    NONRESONANT = "no pairwise sum vanishes"


def resonance_partition(k1: int, k2: int, k3: int) -> ResonanceClass:
    """Classify a nonzero frequency triple by its vanishing pairwise sums.

    The three resonant families are disjoint; triples whose last pair cancels
    fall outside all of them and are flagged separately, since the trilinear
    remainder excludes them by construction.
    """
    if k1 == 0 or k2 == 0 or k3 == 0:
        raise ValueError("resonance classes are defined for nonzero frequencies")
    s12 = k1 + k2 == 0
    s13 = k1 + k3 == 0
    s23 = k2 + k3 == 0
    if s12 and s13:
        return ResonanceClass.BOTH_PAIRS
    if s12 and not s23:
        return ResonanceClass.PAIR_FIRST_SECOND
    if s13 and not s23:
        return ResonanceClass.PAIR_FIRST_THIRD
    if s23:
        return ResonanceClass.EXCLUDED_LAST_PAIR
    return ResonanceClass.NONRESONANT


def resonant_set_sum(v: FourierField, lam: FourierField) -> FourierField:
    """Brute-force sum of (lam+2v)(lam+v)v / k1 over the resonant families.

    Enumerates every nonzero triple of the truncated lattice, keeps those in
    one of the three resonant families, and accumulates the summand at
    k = k1+k2+k3.  Against :func:`resonant_cubic` this checks the cancellation
    that collapses the resonant contribution to its diagonal form: the result
    equals 3 rho_k / i within round-off for real fields.
    """
    _require_mean_zero(v, lam)
    N = max(v.N, lam.N)
    vv = pad_to(v, N).coeffs
    ll = pad_to(lam, N).coeffs
    a = ll + 2.0 * vv   # first slot
    b = ll + vv         # second slot
    k = np.arange(-N, N + 1, dtype=np.int64)
    K1 = k[:, None, None]
    K2 = k[None, :, None]
    K3 = k[None, None, :]
    nz = (K1 != 0) & (K2 != 0) & (K3 != 0)
    s12 = (K1 + K2 == 0) & nz
    s13 = (K1 + K3 == 0) & nz
    s23 = (K2 + K3 == 0) & nz
    resonant = (s12 & s13) | (s12 & ~s13 & ~s23) | (s13 & ~s12 & ~s23)
    terms = np.where(
        resonant,
        a[:, None, None] * b[None, :, None] * vv[None, None, :],
        0.0,
    ) / np.where(K1 != 0, K1, 1).astype(float)
    out = np.zeros(2 * N + 1, dtype=complex)
    # every resonant triple sums to a frequency inside the truncation
    idx = np.where(resonant, K1 + K2 + K3, 0) + N
    np.add.at(out, idx.ravel(), terms.ravel())
    out[N] = 0.0
    return FourierField(out, real=False, mean_zero=True)


# ----------------------------------------------------------------------
# identity verification
# ----------------------------------------------------------------------


def normal_form_residual(v: FourierField, lam: FourierField,
                         dlam: FourierField | None = None,
                         t: float = 0.0) -> tuple[float, float]:
    """Both sides of the reduction identity, evaluated independently.

    Left side: the product-rule expansion of d/dt [v + B(lam+v, v)] with the
    interaction-picture time derivative substituted for dv/dt and the
    potential's time derivative supplied analytically.  Right side: the
    resonant cubic term plus B(dlam, v) plus the nonresonant trilinear
    remainder.  Returns (max_k |lhs_k - rhs_k|, scale of the largest term);
    the identity is algebraic, so the residual is round-off only.
    """
    if dlam is None:
        dlam = FourierField(np.zeros(2 * lam.N + 1, dtype=complex), real=True, mean_zero=True)
    dv = interaction_rhs(v, lam, t)
    b_dlam = boundary_bilinear(dlam, v, t)
    b_dv_v = boundary_bilinear(dv, v, t)
    b_a_dv = boundary_bilinear(lin_comb((1.0, lam), (1.0, v)), dv, t)
    lhs = lin_comb((1.0, b_dlam), (1.0, b_dv_v), (1.0, b_a_dv))

    rho = resonant_cubic(v, lam)
    rem = nonresonant_trilinear(
        lin_comb((1.0, lam), (2.0, v)), lin_comb((1.0, lam), (1.0, v)), v, t
    )
    rhs = lin_comb((1.0, rho), (1.0, b_dlam), (1.0, rem))

    N = max(lhs.N, rhs.N)
    diff = pad_to(lhs, N).coeffs - pad_to(rhs, N).coeffs
    residual = float(np.max(np.abs(diff)))
    scale = max(
        float(np.max(np.abs(f.coeffs))) for f in (b_dv_v, b_a_dv, rho, rem, b_dlam)
    )
    return residual, max(scale, np.finfo(float).tiny)


# ----------------------------------------------------------------------
# time-integrated identity (Duhamel form)
# ----------------------------------------------------------------------


def _simpson_weights(n: int, h: float) -> np.ndarray:
    if n % 2 != 0 or n < 2:
        raise ValueError("composite Simpson needs an even, positive interval count")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def duhamel_residual(traj: Sequence[TrajectorySample], pot: PotentialSpec,
                     quadrature_dt: float, s1: float = 1.0,
                     eval_times: Sequence[float] | None = None) -> list[tuple[float, float]]:
    """H^{s1} defect of the time-integrated reduction identity.

    The identity expresses u(t) - e^{ik^3 t} g through boundary bilinear
    terms plus time integrals of the potential coupling, the resonant cubic
    term, and the nonresonant trilinear remainder, each weighted by
    e^{ik^3 (t-r)}.  The integrals are approximated by composite Simpson
    quadrature on the trajectory samples; the returned residual decays at
    the quadrature's fourth order until the integrator's own error floor.
    """
    if len(traj) < 3:
        raise ValueError("need a densely sampled trajectory")
    times = np.array([s.t for s in traj])
    dt_s = times[1] - times[0]
    if not np.allclose(np.diff(times), dt_s, rtol=1e-9, atol=1e-12):
        raise ValueError("trajectory samples must be uniformly spaced")
    if traj[0].t != 0.0:
        raise ValueError("trajectory must start at t = 0")
    stride = quadrature_dt / dt_s
    if stride < 1.0 - 1e-9:
        raise ValueError("sampling too coarse: quadrature_dt below trajectory spacing")
    if abs(stride - round(stride)) > 1e-9:
        raise ValueError("quadrature_dt must be an integer multiple of the sample spacing")
    stride = int(round(stride))

    nodes = list(range(0, len(traj), stride))
    node_times = times[nodes]
    N = traj[0].state.N
    k = np.arange(-N, N + 1)
    g = traj[0].state

    def crop(f: FourierField) -> np.ndarray:
        if f.N < N:
            return pad_to(f, N).coeffs
        return f.coeffs[f.N - N : f.N + N + 1]

    def lam_field(r: float) -> FourierField:
        return FourierField(pot.coeffs(r, N), real=True, mean_zero=True)

    def lam_drive(r: float) -> FourierField:
        # coefficientwise lam_k'(r) - i k^3 lam_k(r): the potential seen
        # through the linear flow, fed into the bilinear boundary form
        coeffs = pot.dcoeffs(r, N) - 1j * k.astype(float) ** 3 * pot.coeffs(r, N)
        return FourierField(coeffs, real=False, mean_zero=True)

    # integrand pieces at the quadrature nodes, de-weighted (phase applied later)
    F_nodes: list[np.ndarray] = []
    for i in nodes:
        u = traj[i].state
        r = float(times[i])
        lam = lam_field(r)
        F = crop(resonant_cubic(u, lam))
        F = F + crop(
            nonresonant_trilinear(
                lin_comb((1.0, lam), (2.0, u)), lin_comb((1.0, lam), (1.0, u)), u,
                modulated=False,
            )
        )
        if not pot.is_zero:
            F = F + crop(boundary_bilinear(lam_drive(r), u, modulated=False))
        F_nodes.append(F)

    if eval_times is None:
        eval_times = [float(node_times[-1])]
    out: list[tuple[float, float]] = []
    for t_eval in eval_times:
        pos = np.nonzero(np.isclose(node_times, t_eval, rtol=0, atol=1e-9))[0]
        if len(pos) != 1:
            raise ValueError(f"evaluation time {t_eval} is not a quadrature node")
        j = int(pos[0])
        if t_eval == 0.0:
            u_t = traj[0].state
            rhs = np.zeros(2 * N + 1, dtype=complex)
        else:
            w = _simpson_weights(j, float(node_times[1] - node_times[0]))
            rhs = np.zeros(2 * N + 1, dtype=complex)
            for i in range(j + 1):
                phase = airy_phases(k, t_eval - float(node_times[i]))
                rhs += w[i] * phase * F_nodes[i]
            idx_t = nodes[j]
            u_t = traj[idx_t].state
            lam_t = lam_field(float(node_times[j]))
            rhs -= crop(boundary_bilinear(lin_comb((1.0, lam_t), (1.0, u_t)), u_t,
                                          modulated=False))
            rhs += airy_phases(k, t_eval) * crop(
                boundary_bilinear(lin_comb((1.0, lam_field(0.0)), (1.0, g)), g,
                                  modulated=False)
            )
        defect = u_t.coeffs - airy_phases(k, t_eval) * g.coeffs - rhs
        defect_field = FourierField(defect, real=False, mean_zero=bool(defect[N] == 0.0))
        out.append((float(t_eval), sobolev_norm(defect_field, s1)))
    return out


# ----------------------------------------------------------------------
# exact integer identities behind the phase bookkeeping
# ----------------------------------------------------------------------


def cubic_sum_identity(k1: int, k2: int, k3: int, k4: int) -> tuple[int, int]:
    """For k1+k2+k3+k4 = 0: both sides of
    -(k1^3+k2^3+k3^3+k4^3) = 3 (k1+k2)(k1+k3)(k2+k3), in exact integers."""
    if k1 + k2 + k3 + k4 != 0:
        raise ValueError("frequencies must sum to zero")
    lhs = -(k1 ** 3 + k2 ** 3 + k3 ** 3 + k4 ** 3)
    rhs = 3 * (k1 + k2) * (k1 + k3) * (k2 + k3)
    assert lhs == rhs
    return lhs, rhs


def bilinear_phase_identity(k1: int, k2: int) -> tuple[int, int]:
    """(k1+k2)^3 - k1^3 - k2^3 = 3 (k1+k2) k1 k2, in exact integers."""
    lhs = (k1 + k2) ** 3 - k1 ** 3 - k2 ** 3
    rhs = 3 * (k1 + k2) * k1 * k2
    assert lhs == rhs
    return lhs, rhs


def inner_pair_identity(k2: int, mu: int, nu: int) -> tuple[int, int]:
    """With k = k2+mu+nu:  k*k2 + mu*nu = (k2+mu)(k2+nu), in exact integers."""
    k = k2 + mu + nu
    lhs = k * k2 + mu * nu
    rhs = (k2 + mu) * (k2 + nu)
    assert lhs == rhs
    return lhs, rhs


def sweep_cubic_sum_identity(bound: int) -> tuple[int, bool]:
    """Exhaustive check of the four-frequency identity on |k_i| <= bound.

    Returns (number of zero-sum quadruples checked, all_equal).  Vectorized
    in int64; the largest intermediate is 3*(2*bound)^3, far from overflow
    for desk-scale bounds.
    """
    r = np.arange(-bound, bound + 1, dtype=np.int64)
    K1, K2, K3 = np.meshgrid(r, r, r, indexing="ij")
    K4 = -(K1 + K2 + K3)
    sel = np.abs(K4) <= bound
    k1, k2, k3, k4 = (K[sel] for K in (K1, K2, K3, K4))
    lhs = -(k1 ** 3 + k2 ** 3 + k3 ** 3 + k4 ** 3)
    rhs = 3 * (k1 + k2) * (k1 + k3) * (k2 + k3)
    return int(sel.sum()), bool(np.array_equal(lhs, rhs))


def sweep_bilinear_identity(bound: int) -> tuple[int, bool]:
    """Exhaustive check of the quadratic phase identity on |k1|,|k2| <= bound."""
    r = np.arange(-bound, bound + 1, dtype=np.int64)
    K1, K2 = np.meshgrid(r, r, indexing="ij")
    lhs = (K1 + K2) ** 3 - K1 ** 3 - K2 ** 3
    rhs = 3 * (K1 + K2) * K1 * K2
    return int(K1.size), bool(np.array_equal(lhs, rhs))
