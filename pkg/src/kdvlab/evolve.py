"""Fourier-side time evolution of the KdV family with conservation diagnostics.

Equations handled (all on the 2pi torus, mean-zero states):

  * u_t + u_xxx + beta*u*u_x + (lambda*u)_x = 0   -- KdV with an optional
    smooth mean-zero space-time potential lambda(x, t); beta = 2 is the
    quadratic convention used by the smoothing experiments, beta = -6 the
    convention of the modified-KdV pipeline's target equation.
  * v_t + v_xxx = 6 v^2 v_x                       -- modified KdV.
  * w_t + w_xxx = 6 (w^2 - <w^2>) w_x             -- mean-field-free branch.

Time stepping is integrating-factor RK4 in the interaction variables
v_k = u_k e^{-ik^3 t}: the stiff dispersive phase is applied exactly, the
nonlinearity pseudospectrally on a zero-padded grid (alias-free: M >= 3N+1
for the quadratic term, M >= 4N+1 for the cubic one).  Reality and the
vanishing k = 0 mode are exact invariants of every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .airy import LinearOp, airy_phases
from .fields import FourierField, GridSpec, _hermitize, _next_pow2, sobolev_norm

__all__ = [
    "ConservationReport",
    "PotentialMode",
    "PotentialSpec",
    "SCHEMES",
    "SolverConfig",
    "SolverInstability",
    "TrajectorySample",
    "conservation_report",
    "evolve",
    "evolve_mkdv",
    "gauge_mean",
    "rhs_fourier",
    "rhs_mkdv",
]

INSTABILITY_THRESHOLD = 1e8


class SolverInstability(RuntimeError):
    """Raised when a coefficient exceeds the runaway threshold mid-run."""

    def __init__(self, t: float, max_coeff: float):
        super().__init__(
            f"instability detected at t={t:.6g}: max |u_k| = {max_coeff:.3g} "
            f"exceeds {INSTABILITY_THRESHOLD:.0e}"
        )
        self.t = t
        self.max_coeff = max_coeff


# ----------------------------------------------------------------------
# potentials
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialMode:
    """One positive-wavenumber mode of the potential; the conjugate mirror
    mode at -k is implied.  ``dcoef`` is the analytic time derivative."""

    k: int
    coef: Callable[[float], complex]
    dcoef: Callable[[float], complex]

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("potential modes are stored for k > 0 only")


@dataclass(frozen=True)
class PotentialSpec:
    """Smooth mean-zero potential lambda(x,t) as a finite Fourier sum.

    ``sup_dx``, when given, returns the exact sup-norm of lambda_x(., t);
    otherwise it is estimated on a dense grid.  Mean-zero by construction
    (no k = 0 mode can be stored).
    """

    modes: tuple[PotentialMode, ...] = ()
    sup_dx: Callable[[float], float] | None = None

    @staticmethod
    def zero() -> "PotentialSpec":
        return PotentialSpec()

    @staticmethod
    def traveling_cosine(amplitude: float, k: int = 1, speed: float = 1.0) -> "PotentialSpec":
        """lambda(x,t) = amplitude * cos(k x - speed t)."""
        half = 0.5 * amplitude

        def coef(t: float, _h=half, _s=speed) -> complex:
            return _h * np.exp(-1j * _s * t)

        def dcoef(t: float, _h=half, _s=speed) -> complex:
            return -1j * _s * _h * np.exp(-1j * _s * t)

        return PotentialSpec(
            modes=(PotentialMode(k, coef, dcoef),),
            sup_dx=lambda t, _a=abs(amplitude) * k: _a,
        )

    @property
    def is_zero(self) -> bool:
        return len(self.modes) == 0

    def max_mode(self) -> int:
        return max((m.k for m in self.modes), default=0)

    def coeffs(self, t: float, N: int) -> np.ndarray:
        """lambda_k(t) on |k| <= N with the Hermitian mirror filled in."""
        out = np.zeros(2 * N + 1, dtype=complex)
        for m in self.modes:
            if m.k > N:
                raise ValueError(f"potential mode {m.k} outside truncation N={N}")
            val = complex(m.coef(t))
            out[N + m.k] = val
            out[N - m.k] = np.conj(val)
        return out

    def dcoeffs(self, t: float, N: int) -> np.ndarray:
        out = np.zeros(2 * N + 1, dtype=complex)
        for m in self.modes:
            val = complex(m.dcoef(t))
            out[N + m.k] = val
            out[N - m.k] = np.conj(val)
        return out

    def sup_derivative(self, t: float, grid_points: int = 4096) -> float:
        if self.is_zero:
            return 0.0
        if self.sup_dx is not None:
            return float(self.sup_dx(t))
        N = self.max_mode()
        lam = self.coeffs(t, N)
        k = np.arange(-N, N + 1)
        spec = np.zeros(grid_points, dtype=complex)
        spec[k % grid_points] = lam * (1j * k)
        return float(np.max(np.abs((np.fft.ifft(spec) * grid_points).real)))


# ----------------------------------------------------------------------
# solver configuration and samples
# ----------------------------------------------------------------------


SCHEMES = ("IFRK4", "STRANG", "RESONANT")


@dataclass(frozen=True)
class SolverConfig:
    """Step size, horizon, nonlinearity coefficient and dealiasing policy.

    ``beta`` is explicit because the two KdV conventions in use differ:
    u_t + u_xxx + 2uu_x = 0 for the potential/smoothing experiments, and
    u_t + u_xxx = 6uu_x (beta = -6 here) as the target of the Miura map.

    Schemes: IFRK4 (integrating-factor RK4 in the interaction variables) is
    fourth order and the default; it requires the triad phase modulation to
    be resolved, which for data with energetic high modes means dt ~ N^{-2}
    and in practice restricts it to smooth data at moderate truncations.
    STRANG composes the exact dispersive flow with an RK4-advanced nonlinear
    substep; second order, amplitude-stable, but its phase sampling still
    decoheres energetic high modes.  RESONANT (quadratic branch, no
    potential) freezes the state over the step and integrates every triad
    oscillation in closed form through the antiderivative product identity;
    first order in the slow dynamics with wavenumber-uniform phase accuracy,
    it is the scheme for rough-data resolution ladders.
    """

    dt: float
    t_end: float = 0.0
    beta: float = 2.0
    scheme: str = "IFRK4"
    dealias: bool = True
    hs_norms: tuple[float, ...] = ()
    M: int | None = None  # physical grid override; must keep products alias-free

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    state: FourierField
    momentum: float
    l2: float
    hs: dict[float, float] = field(default_factory=dict)


# ----------------------------------------------------------------------
# right-hand sides
# ----------------------------------------------------------------------


def _grid_for(N: int, cubic: bool, dealias: bool, M: int | None = None) -> int:
    if M is not None:
        need = (4 * N + 1) if cubic else (3 * N + 1)
        if M < need:
            raise ValueError(f"grid too small for alias-free products: M={M} < {need}")
        return M
    if dealias:
        return (GridSpec.for_cubic(N) if cubic else GridSpec.for_quadratic(N)).M
    return _next_pow2(2 * N + 2)


def _to_phys(coeffs: np.ndarray, N: int, M: int) -> np.ndarray:
    spec = np.zeros(M, dtype=complex)
    spec[np.arange(-N, N + 1) % M] = coeffs
    return (np.fft.ifft(spec) * M).real


def _from_phys(phys: np.ndarray, N: int) -> np.ndarray:
    spec = np.fft.fft(phys) / len(phys)
    return _hermitize(spec[np.arange(-N, N + 1) % len(phys)])


def _kdv_nonlinear(coeffs: np.ndarray, t: float, N: int, M: int, beta: float,
                   pot: PotentialSpec) -> np.ndarray:
    """-ik [ (beta/2)(u^2)_k + (lambda u)_k ], evaluated alias-free."""
    u_phys = _to_phys(coeffs, N, M)
    prod = (0.5 * beta) * u_phys * u_phys
    if not pot.is_zero:
        prod += _to_phys(pot.coeffs(t, N), N, M) * u_phys
    k = np.arange(-N, N + 1)
    return (-1j * k) * _from_phys(prod, N)


def _mkdv_nonlinear(coeffs: np.ndarray, t: float, N: int, M: int,
                    mean_free: bool) -> np.ndarray:
    """2ik (v^3)_k, minus the mean-field transport for the shifted branch."""
    v_phys = _to_phys(coeffs, N, M)
    k = np.arange(-N, N + 1)
    out = (2j * k) * _from_phys(v_phys ** 3, N)
    if mean_free:
        mu = float(np.sum(np.abs(coeffs) ** 2))
        out -= (6j * mu) * (k * coeffs)
    return out


def rhs_fourier(u: FourierField, pot: PotentialSpec, t: float, beta: float) -> FourierField:
    """Full time derivative ik^3 u_k - ik sum (lambda_{k1} + (beta/2) u_{k1}) u_{k2}."""
    if not (u.real and u.mean_zero):
        raise ValueError("rhs expects a real mean-zero state")
    N = u.N
    M = _grid_for(N, cubic=False, dealias=True)
    k = u.wavenumbers
    nl = _kdv_nonlinear(u.coeffs, t, N, M, beta, pot)
    coeffs = 1j * k.astype(float) ** 3 * u.coeffs + nl
    return FourierField(_hermitize(coeffs), real=True, mean_zero=True)


def rhs_mkdv(v: FourierField, t: float = 0.0, mean_free: bool = False) -> FourierField:
    """Cubic branch: ik^3 v_k + 2ik (v^3)_k (optionally mean-field-free)."""
    if not (v.real and v.mean_zero):
        raise ValueError("rhs expects a real mean-zero state")
    N = v.N
    M = _grid_for(N, cubic=True, dealias=True)
    k = v.wavenumbers
    nl = _mkdv_nonlinear(v.coeffs, t, N, M, mean_free)
    coeffs = 1j * k.astype(float) ** 3 * v.coeffs + nl
    return FourierField(_hermitize(coeffs), real=True, mean_zero=True)


# ----------------------------------------------------------------------
# integrating-factor RK4 marching
# ----------------------------------------------------------------------


def _if_phases(k: np.ndarray, h: float) -> tuple[np.ndarray, ...]:
    e_half = airy_phases(k, 0.5 * h)
    e_full = airy_phases(k, h)
    return e_half, e_full, np.conj(e_half), np.conj(e_full)


def _ifrk4_step(c: np.ndarray, t: float, h: float, nonlinear, phases) -> np.ndarray:
    """One step of RK4 in the interaction picture; dispersive phase exact."""
    e_half, e_full, eb_half, eb_full = phases
    k1 = nonlinear(c, t)
    k2 = eb_half * nonlinear(e_half * (c + 0.5 * h * k1), t + 0.5 * h)
    k3 = eb_half * nonlinear(e_half * (c + 0.5 * h * k2), t + 0.5 * h)
    k4 = eb_full * nonlinear(e_full * (c + h * k3), t + h)
    return e_full * (c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def _resonant_step_factory(N: int, M: int, beta: float):
    """Exponential step with exact triad phases for u_t + u_xxx + beta*u*u_x = 0.

    Freezing the state over [t, t+h] makes each interaction-picture mode a
    sum of pure oscillations e^{-3i k k1 k2 s}, whose integrals collapse via
    (k1+k2)^3 - k1^3 - k2^3 = 3(k1+k2)k1k2 to squares of the antiderivative:

        u^{n+1} = E u^n + (beta/6) [ (D E u^n)^2 - E (D u^n)^2 ]_k,

    with E the exact dispersive propagator over h and (D f)_k = f_k / k.
    No oscillation is ever sampled, so phase accuracy is uniform in k; the
    O(h^2) defect is the frozen-coefficient error of the slow dynamics.
    """
    k = np.arange(-N, N + 1)
    inv_ik = np.zeros(2 * N + 1, dtype=complex)
    inv_ik[k != 0] = 1.0 / (1j * k[k != 0])

    def antideriv_sq(coeffs: np.ndarray) -> np.ndarray:
        # coeffs/(ik) is a real field for real mean-zero input
        phys = _to_phys(inv_ik * coeffs, N, M)
        return _from_phys(phys * phys, N)

    def step(c: np.ndarray, t: float, h: float, e_full: np.ndarray) -> np.ndarray:
        ec = e_full * c
        out = ec - (beta / 6.0) * (antideriv_sq(ec) - e_full * antideriv_sq(c))
        out[N] = 0.0
        return _hermitize(out)

    return step


def _strang_step(c: np.ndarray, t: float, h: float, nonlinear, phases) -> np.ndarray:
    """Exact dispersive half-step, RK4 nonlinear substep, dispersive half-step.

    The nonlinear substep freezes explicit time dependence at the interval
    midpoint, preserving the composition's second order.
    """
    e_half = phases[0]
    tm = t + 0.5 * h
    c = e_half * c
    k1 = nonlinear(c, tm)
    k2 = nonlinear(c + 0.5 * h * k1, tm)
    k3 = nonlinear(c + 0.5 * h * k2, tm)
    k4 = nonlinear(c + h * k3, tm)
    c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return e_half * c


def _march(g: FourierField, cfg: SolverConfig, sample_times: Sequence[float],
           stepper, t0: float, hs_norms: tuple[float, ...]) -> list[TrajectorySample]:
    if not (g.real and g.mean_zero):
        raise ValueError("initial data must be real and mean-zero (gauge the mean away first)")
    times = [float(t) for t in sample_times]
    forward = (not times) or times[-1] >= t0
    ordered = all(b >= a for a, b in zip(times, times[1:])) if forward else all(
        b <= a for a, b in zip(times, times[1:])
    )
    if not ordered:
        raise ValueError("sample times must be monotone in the direction of travel")
    if any((t - t0) * (1 if forward else -1) < -1e-12 for t in times):
        raise ValueError("sample times must lie on one side of the start time")

    k = g.wavenumbers
    h_nominal = cfg.dt if forward else -cfg.dt
    phase_cache: dict[float, tuple[np.ndarray, ...]] = {}

    def phases_for(h: float):
        if h not in phase_cache:
            phase_cache[h] = _if_phases(k, h)
        return phase_cache[h]

    c = g.coeffs.copy()
    t = t0
    samples: list[TrajectorySample] = []

    def emit(t_now: float, coeffs: np.ndarray):
        state = FourierField(_hermitize(coeffs), real=True, mean_zero=True)
        hs = {s: sobolev_norm(state, s) for s in hs_norms}
        samples.append(
            TrajectorySample(
                t=t_now,
                state=state,
                momentum=float(abs(coeffs[g.N])),
                l2=sobolev_norm(state, 0.0),
                hs=hs,
            )
        )

    for target in times:
        remaining = target - t
        nsteps = int(np.floor(abs(remaining) / cfg.dt + 1e-12))
        for _ in range(nsteps):
            c = stepper(c, t, h_nominal, phases_for(h_nominal))
            t += h_nominal
            peak = np.max(np.abs(c))
            if peak > INSTABILITY_THRESHOLD:
                raise SolverInstability(t, float(peak))
        rem = target - t
        if abs(rem) > 1e-12 * max(1.0, abs(target)):
            c = stepper(c, t, rem, phases_for(rem))
            peak = np.max(np.abs(c))
            if peak > INSTABILITY_THRESHOLD:
                raise SolverInstability(target, float(peak))
        t = target
        emit(t, c)
    return samples


def _make_stepper(scheme: str, nonlinear, N: int, M: int, beta: float,
                  resonant_ok: bool):
    if scheme == "IFRK4":
        return lambda c, t, h, phases: _ifrk4_step(c, t, h, nonlinear, phases)
    if scheme == "STRANG":
        return lambda c, t, h, phases: _strang_step(c, t, h, nonlinear, phases)
    if scheme == "RESONANT":
        if not resonant_ok:
            raise ValueError("RESONANT scheme covers the free quadratic branch only")
        inner = _resonant_step_factory(N, M, beta)
        return lambda c, t, h, phases: inner(c, t, h, phases[1])
    raise ValueError(f"unknown scheme {scheme!r}")


def evolve(g: FourierField, pot: PotentialSpec, cfg: SolverConfig,
           sample_times: Sequence[float], t0: float = 0.0) -> list[TrajectorySample]:
    """Integrate the KdV-with-potential system, sampling at the given times.

    Deterministic; aborts with :class:`SolverInstability` if any coefficient
    exceeds 1e8.  States are real and mean-zero at every accepted step.
    """
    N = g.N
    M = _grid_for(N, cubic=False, dealias=cfg.dealias, M=cfg.M)

    def nonlinear(c, t):
        return _kdv_nonlinear(c, t, N, M, cfg.beta, pot)

    stepper = _make_stepper(cfg.scheme, nonlinear, N, M, cfg.beta,
                            resonant_ok=pot.is_zero)
    return _march(g, cfg, sample_times, stepper, t0, cfg.hs_norms)


def evolve_mkdv(g: FourierField, cfg: SolverConfig, sample_times: Sequence[float],
                mean_free: bool = False, t0: float = 0.0) -> list[TrajectorySample]:
    """Integrate the cubic branch (plain or mean-field-free form)."""
    N = g.N
    M = _grid_for(N, cubic=True, dealias=cfg.dealias, M=cfg.M)

    def nonlinear(c, t):
        return _mkdv_nonlinear(c, t, N, M, mean_free)

    stepper = _make_stepper(cfg.scheme, nonlinear, N, M, 0.0, resonant_ok=False)
    return _march(g, cfg, sample_times, stepper, t0, cfg.hs_norms)


# ----------------------------------------------------------------------
# gauging and conservation diagnostics
# ----------------------------------------------------------------------


def gauge_mean(g: FourierField) -> tuple[FourierField, LinearOp]:
    """Split data into mean and mean-zero part.

    The removed mean is returned as the transport coefficient of the linear
    operator, matching the operator form quoted by the growth bounds.  The
    caller evolves the mean-zero part and compares against that flow.
    """
    coeffs = g.coeffs.copy()
    mean = coeffs[g.N]
    if g.real:
        mean = mean.real
    coeffs[g.N] = 0.0
    return FourierField(coeffs, real=g.real, mean_zero=True), LinearOp(float(np.real(mean)))


@dataclass(frozen=True)
class ConservationReport:
    momentum_max: float
    l2_initial: float
    l2_rel_drift: float
    gronwall_ok: bool | None
    gronwall_min_margin: float | None


def _integral_sup_dx(pot: PotentialSpec, t: float, n: int = 256) -> float:
    """Composite-Simpson quadrature of int_0^t sup_x |lambda_x(., r)| dr."""
    if t == 0.0:
        return 0.0
    if n % 2 == 1:
        n += 1
    r = np.linspace(0.0, t, n + 1)
    vals = np.array([pot.sup_derivative(ri) for ri in r])
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((t / n) / 3.0 * np.sum(w * vals))


def conservation_report(traj: Sequence[TrajectorySample], pot: PotentialSpec) -> ConservationReport:
    """Momentum/L2 drift for free runs; the exponential L2 bound otherwise.

    Free runs (no potential) conserve momentum exactly and L2 up to the
    integrator's O(dt^4) drift.  With a potential, the L2 norm is checked
    against ||g||_2 * exp(int_0^t sup|lambda_x|) at every sample.
    """
    if not traj:
        raise ValueError("empty trajectory")
    momentum_max = max(s.momentum for s in traj)
    l2_0 = traj[0].l2
    drift = max(abs(s.l2 - l2_0) for s in traj) / max(l2_0, np.finfo(float).tiny)
    gronwall_ok: bool | None = None
    min_margin: float | None = None
    if not pot.is_zero:
        gronwall_ok = True
        min_margin = np.inf
        for s in traj:
            bound = l2_0 * np.exp(_integral_sup_dx(pot, s.t))
            margin = bound - s.l2
            min_margin = min(min_margin, margin)
            if s.l2 > bound * (1.0 + 1e-12):
                gronwall_ok = False
        min_margin = float(min_margin)
    return ConservationReport(
        momentum_max=momentum_max,
        l2_initial=l2_0,
        l2_rel_drift=float(drift),
        gronwall_ok=gronwall_ok,
        gronwall_min_margin=min_margin,
    )
