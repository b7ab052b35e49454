"""Truncated Fourier representation of real 2pi-periodic functions.

Conventions (used by every module in the package):

    u(x) = sum_k u_k e^{ikx},      u_k = (1/2pi) int_0^{2pi} u(x) e^{-ikx} dx.

A field stores the coefficients u_k for |k| <= N in a single complex array
indexed by k + N.  Real fields carry exact Hermitian symmetry
u_{-k} = conj(u_k); mean-zero fields carry u_0 = 0 exactly.  Both are
enforced by construction, never by tolerance.

Sobolev norms default to the homogeneous weight |k|^s, which on mean-zero
fields is equivalent to the inhomogeneous (1+|k|)^s weight.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DECAY_MARGIN",
    "FourierField",
    "GridSpec",
    "SobolevIndex",
    "analyze",
    "convolve",
    "cosine_field",
    "crop_to",
    "derivative",
    "dump_coefficients",
    "field_from_modes",
    "load_coefficients",
    "mean_square",
    "pad_to",
    "project_mean_zero",
    "random_sobolev_data",
    "sine_field",
    "sobolev_norm",
    "square_wave",
    "synthesize",
    "zero_field",
]

# Extra coefficient decay beyond the square-summability borderline, so that
# synthesized rough data sits in H^s but in no H^{s+delta} for delta > margin.
DECAY_MARGIN = 0.01


def _hermitize(coeffs: np.ndarray) -> np.ndarray:
    """Force exact Hermitian symmetry, keeping k >= 0 entries canonical."""
    n = (len(coeffs) - 1) // 2
    out = np.asarray(coeffs, dtype=complex).copy()
    out[n] = out[n].real
    out[:n] = np.conj(out[n + 1 :][::-1])
    return out


@dataclass(frozen=True)
class FourierField:
    """Coefficients u_k for |k| <= N of a 2pi-periodic function.

    ``coeffs[k + N]`` holds u_k.  ``real`` asserts exact Hermitian symmetry,
    ``mean_zero`` asserts u_0 == 0 exactly; both are validated on creation.
    """

    coeffs: np.ndarray
    real: bool = True
    mean_zero: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 == 0:
            raise ValueError("coefficient array must be 1-d with odd length 2N+1")
        if not np.all(np.isfinite(c.view(float))):
            raise ValueError("non-finite Fourier coefficient")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        n = self.N
        if self.real:
            if not (np.array_equal(c[:n], np.conj(c[n + 1 :][::-1])) and c[n].imag == 0.0):
                raise ValueError("field flagged real but coefficients are not Hermitian")
        if self.mean_zero and c[n] != 0.0:
            raise ValueError("field flagged mean-zero but u_0 != 0")

    @property
    def N(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def coeff(self, k: int) -> complex:
        if abs(k) > self.N:
            return 0.0 + 0.0j
        return complex(self.coeffs[k + self.N])

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def support(self) -> int:
        """Largest |k| with a nonzero coefficient (0 for the zero field)."""
        nz = np.nonzero(self.coeffs)[0]
        if len(nz) == 0:
            return 0
        return int(max(abs(nz - self.N)))


def _make(coeffs: np.ndarray, real: bool, mean_zero: bool) -> FourierField:
    """Internal constructor: repairs symmetry/mean exactly before validating."""
    c = np.asarray(coeffs, dtype=complex)
    if real:
        c = _hermitize(c)
    if mean_zero:
        c = c.copy()
        c[(len(c) - 1) // 2] = 0.0
    return FourierField(c, real=real, mean_zero=mean_zero)


def field_from_modes(N: int, modes: dict[int, complex], real: bool = True) -> FourierField:
    """Build a field from {k: u_k} entries.

    For real fields only k >= 0 entries need to be given; negative modes are
    mirrored.  Supplying both k and -k for a real field is rejected unless
    they are exact conjugates.
    """
    coeffs = np.zeros(2 * N + 1, dtype=complex)
    for k, val in modes.items():
        if abs(k) > N:
            raise ValueError(f"mode {k} outside truncation N={N}")
        coeffs[k + N] = val
    if real:
        for k, val in modes.items():
            if k < 0 and -k in modes and modes[-k] != np.conj(val):
                raise ValueError(f"modes {k}/{-k} are not conjugate")
            if k < 0 and -k not in modes:
                coeffs[-k + N] = np.conj(val)
        coeffs = _hermitize(coeffs)
    mean_zero = coeffs[N] == 0.0
    return FourierField(coeffs, real=real, mean_zero=bool(mean_zero))


def zero_field(N: int) -> FourierField:
    return FourierField(np.zeros(2 * N + 1, dtype=complex))


def cosine_field(N: int, k: int = 1, amplitude: float = 1.0) -> FourierField:
    """amplitude * cos(kx)."""
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    return field_from_modes(N, {k: amplitude / 2.0})


def sine_field(N: int, k: int = 1, amplitude: float = 1.0) -> FourierField:
    """amplitude * sin(kx)."""
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    return field_from_modes(N, {k: -0.5j * amplitude})


def square_wave(N: int) -> FourierField:
    """sign(sin x) projected to |k| <= N: mean-zero, bounded variation."""
    coeffs = np.zeros(2 * N + 1, dtype=complex)
    for k in range(1, N + 1, 2):
        coeffs[k + N] = -2j / (np.pi * k)
    return _make(coeffs, real=True, mean_zero=True)


def pad_to(f: FourierField, N: int) -> FourierField:
    """Embed a field into a larger truncation (zero padding)."""
    if N < f.N:
        raise ValueError("pad_to cannot shrink a field; crop explicitly")
    if N == f.N:
        return f
    coeffs = np.zeros(2 * N + 1, dtype=complex)
    coeffs[N - f.N : N + f.N + 1] = f.coeffs
    return FourierField(coeffs, real=f.real, mean_zero=f.mean_zero)


def crop_to(f: FourierField, N: int) -> FourierField:
    """Restrict a field to |k| <= N (drops the outer modes)."""
    if N >= f.N:
        return pad_to(f, N)
    coeffs = f.coeffs[f.N - N : f.N + N + 1]
    return FourierField(coeffs, real=f.real, mean_zero=bool(coeffs[N] == 0.0))


# ----------------------------------------------------------------------
# grids and transforms
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Spectral truncation N and physical sample count M on [0, 2pi).

    M >= 3N+1 guarantees alias-free quadratic products under the 2/3-style
    zero-padding rule.  Factory methods round M up to a power of two, which
    keeps the FFTs fast and the layout predictable.
    """

    N: int
    M: int

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if self.M < 3 * self.N + 1:
            raise ValueError(f"grid too small: M={self.M} < 3N+1={3 * self.N + 1}")

    @staticmethod
    def for_quadratic(N: int) -> "GridSpec":
        return GridSpec(N, _next_pow2(3 * N + 1))

    @staticmethod
    def for_cubic(N: int) -> "GridSpec":
        """Cubic products need the wider M >= 4N+1 margin."""
        return GridSpec(N, _next_pow2(4 * N + 1))

    @property
    def x(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.M) / self.M


def _next_pow2(n: int) -> int:
    m = 1
    while m < n:
        m *= 2
    return m


def synthesize(f: FourierField, grid: GridSpec) -> np.ndarray:
    """Physical samples of the field at x_j = 2pi j / M.

    Real fields return a float array; complex fields a complex one.
    """
    if grid.N < f.N:
        raise ValueError(f"grid too small for field: grid N={grid.N} < field N={f.N}")
    spec = np.zeros(grid.M, dtype=complex)
    ks = np.arange(-f.N, f.N + 1)
    spec[ks % grid.M] = f.coeffs
    samples = np.fft.ifft(spec) * grid.M
    if f.real:
        return samples.real
    return samples


def analyze(samples: np.ndarray, N: int, real: bool | None = None) -> FourierField:
    """Recover coefficients u_k, |k| <= N, from M equispaced samples."""
    samples = np.asarray(samples)
    M = len(samples)
    if M < 2 * N + 1:
        raise ValueError(f"grid too small for field: M={M} < 2N+1={2 * N + 1}")
    if real is None:
        real = not np.iscomplexobj(samples)
    spec = np.fft.fft(samples) / M
    ks = np.arange(-N, N + 1)
    coeffs = spec[ks % M]
    mean_zero = bool(coeffs[N] == 0.0)
    return _make(coeffs, real=real, mean_zero=mean_zero)


# ----------------------------------------------------------------------
# norms
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SobolevIndex:
    """Regularity index s, with |k|^s (homogeneous) or (1+|k|)^s weights."""

    s: float
    homogeneous: bool = True

    def __post_init__(self):
        if not np.isfinite(self.s):
            raise ValueError("Sobolev index must be finite")


def sobolev_norm(f: FourierField, idx: SobolevIndex | float, homogeneous: bool = True) -> float:
    """(sum_k w(k)^{2s} |u_k|^2)^{1/2} with w = |k| or 1+|k|.

    The homogeneous weight skips k = 0 and therefore requires a mean-zero
    field; on such fields the two weights give equivalent norms.
    """
    if not isinstance(idx, SobolevIndex):
        idx = SobolevIndex(float(idx), homogeneous)
    k = f.wavenumbers
    if idx.homogeneous:
        if not f.mean_zero:
            raise ValueError("homogeneous norm requested on a field without mean_zero")
        mask = k != 0
        w = np.abs(k[mask]).astype(float) ** idx.s
        return float(np.sqrt(np.sum((w * np.abs(f.coeffs[mask])) ** 2)))
    w = (1.0 + np.abs(k)) ** idx.s
    return float(np.sqrt(np.sum((w * np.abs(f.coeffs)) ** 2)))


def mean_square(f: FourierField) -> float:
    """Spatial average of u^2 for a real field: sum_k |u_k|^2."""
    if not f.real:
        raise ValueError("mean_square is defined for real fields")
    return float(np.sum(np.abs(f.coeffs) ** 2))


# ----------------------------------------------------------------------
# products and calculus
# ----------------------------------------------------------------------


def convolve(u: FourierField, v: FourierField, out_N: int | None = None) -> FourierField:
    """Exact coefficient convolution (uv)_k = sum_{m+n=k} u_m v_n.

    The full product is computed (support N_u + N_v), so no aliasing can
    occur; pass ``out_N`` to crop or pad the result.
    """
    full = np.convolve(u.coeffs, v.coeffs)
    n_full = u.N + v.N
    real = u.real and v.real
    if real:
        full = _hermitize(full)
    res = FourierField(full, real=real, mean_zero=bool(full[n_full] == 0.0))
    if out_N is None or out_N == n_full:
        return res
    if out_N > n_full:
        return pad_to(res, out_N)
    crop = full[n_full - out_N : n_full + out_N + 1]
    return FourierField(crop, real=real, mean_zero=bool(crop[out_N] == 0.0))


def derivative(f: FourierField, order: int = 1) -> FourierField:
    """Spectral derivative: multiply u_k by (ik)^order."""
    k = f.wavenumbers
    coeffs = f.coeffs * (1j * k) ** order
    real = f.real  # (ik)^order maps Hermitian to Hermitian
    return _make(coeffs, real=real, mean_zero=True)


def project_mean_zero(f: FourierField) -> tuple[FourierField, float | complex]:
    """Split off the mean: returns (mean-zero field, removed mean u_0)."""
    mean = f.coeffs[f.N]
    if f.real:
        mean = float(mean.real)
    else:
        mean = complex(mean)
    coeffs = f.coeffs.copy()
    coeffs[f.N] = 0.0
    return FourierField(coeffs, real=f.real, mean_zero=True), mean


# ----------------------------------------------------------------------
# rough data synthesis
# ----------------------------------------------------------------------


def random_sobolev_data(
    s: float, N: int, seed: int, amplitude: float = 1.0
) -> FourierField:
    """Real mean-zero field with |g_k| = amplitude * |k|^{-s-1/2-margin}.

    Phases are independent uniforms drawn one per wavenumber in increasing
    order, so truncations with the same seed are nested: the first N modes
    of the N' > N field coincide with the N-mode field.  Deterministic in
    ``seed``.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=N)
    k = np.arange(1, N + 1, dtype=float)
    mags = amplitude * k ** (-s - 0.5 - DECAY_MARGIN)
    coeffs = np.zeros(2 * N + 1, dtype=complex)
    coeffs[N + 1 :] = mags * np.exp(1j * phases)
    return _make(coeffs, real=True, mean_zero=True)


# ----------------------------------------------------------------------
# coefficient dump format: text lines "k re im", sorted by k
# ----------------------------------------------------------------------


def dump_coefficients(f: FourierField, fh) -> None:
    """Write coefficients as "k re im" lines with 17 significant digits."""
    own = isinstance(fh, str)
    stream = open(fh, "w") if own else fh
    try:
        for k in range(-f.N, f.N + 1):
            c = f.coeffs[k + f.N]
            stream.write(f"{k} {c.real:.17g} {c.imag:.17g}\n")
    finally:
        if own:
            stream.close()


def dumps_coefficients(f: FourierField) -> str:
    buf = io.StringIO()
    dump_coefficients(f, buf)
    return buf.getvalue()


def load_coefficients(fh) -> FourierField:
    """Read a coefficient dump back into a field (flags inferred)."""
    own = isinstance(fh, str)
    stream = open(fh) if own else fh
    try:
        entries = {}
        for line in stream:
            line = line.strip()
            if not line:
                continue
            k_s, re_s, im_s = line.split()
            entries[int(k_s)] = float(re_s) + 1j * float(im_s)
    finally:
        if own:
            stream.close()
    if not entries:
        raise ValueError("empty coefficient dump")
    N = max(abs(k) for k in entries)
    coeffs = np.zeros(2 * N + 1, dtype=complex)
    for k, val in entries.items():
        coeffs[k + N] = val
    herm = np.array_equal(coeffs[:N], np.conj(coeffs[N + 1 :][::-1])) and coeffs[N].imag == 0.0
    return FourierField(coeffs, real=bool(herm), mean_zero=bool(coeffs[N] == 0.0))
