"""
Periodic grids, sampled fields and Fourier-multiplier operators.

Conventions
-----------
* Nodes are ``alpha_j = j L / N`` and wavenumbers ``xi_k = 2 pi k / L`` for
  ``k = -N/2 .. N/2-1``.
* Mode coefficients are normalised so that ``f(alpha_j) = sum_k fhat_k
  exp(i xi_k alpha_j)``, i.e. ``fhat = fft(f) / N``.  Consequently
  ``||f||_2^2 = (L/N) sum_j |f_j|^2 = L sum_k |fhat_k|^2``.
* The Hilbert transform has symbol ``-sgn(xi)`` and annihilates the mean.
  Functions whose boundary values extend holomorphically into the fluid
  (lower half-plane) carry only non-positive frequencies and are fixed by it.
* The Nyquist mode ``k = -N/2`` has no definite sign of frequency on a real
  grid.  Odd multipliers (``hilbert``, ``derivative``) and ``|d|^s`` with
  ``s > 0`` annihilate it, exactly like the mean, so that real fields map to
  real (or purely imaginary) fields without residue.

Array-level helpers live on :class:`Grid` (``grid.hilbert(u)``,
``grid.deriv(u)``, ...) and operate on raw complex ndarrays; the public
functions of this module wrap them for :class:`Field` values.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from numbers import Number

import numpy as np
import scipy.fft as sfft

DEFAULT_DEALIAS = 2.0 / 3.0


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid of ``N`` points on ``[0, L)``."""

    N: int
    L: float = 2 * np.pi

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ValueError(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))
        if self.N < 16 or not _is_power_of_two(self.N):
            raise ValueError(f"N must be a power of two >= 16, got {self.N}")
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")

    # -- geometry -----------------------------------------------------------
    @cached_property
    def dx(self) -> float:
        return self.L / self.N

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N) * self.dx

    @cached_property
    def k(self) -> np.ndarray:
        """Integer mode numbers in FFT order (0, 1, ..., N/2-1, -N/2, ..., -1)."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(np.int64)

    @cached_property
    def xi(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2 * np.pi * self.k / self.L

    @cached_property
    def nyquist(self) -> np.ndarray:
        return self.k == -self.N // 2

    @property
    def xi_max(self) -> float:
        return 2 * np.pi * (self.N // 2 - 1) / self.L

    # -- transforms ---------------------------------------------------------
    def fft(self, u) -> np.ndarray:
        return sfft.fft(u) / self.N

    def ifft(self, uh) -> np.ndarray:
        return sfft.ifft(uh) * self.N

    def apply(self, symbol, u) -> np.ndarray:
        return sfft.ifft(symbol * sfft.fft(u))

    # -- symbols ------------------------------------------------------------
    @cached_property
    def sym_hilbert(self) -> np.ndarray:
        s = -np.sign(self.k).astype(float)
        s[self.nyquist] = 0.0
        return s

    @cached_property
    def sym_deriv(self) -> np.ndarray:
        s = 1j * self.xi
        s[self.nyquist] = 0.0
        return s

    @cached_property
    def sym_abs(self) -> np.ndarray:
        s = np.abs(self.xi)
        s[self.nyquist] = 0.0
        return s

    @cached_property
    def sym_holo(self) -> np.ndarray:
        return 0.5 * (1.0 + self.sym_hilbert)

    @cached_property
    def sym_antiholo(self) -> np.ndarray:
        return 0.5 * (1.0 - self.sym_hilbert)

    def sym_fractional(self, s: float) -> np.ndarray:
        if s == 0:
            return np.ones(self.N)
        return self.sym_abs ** s

    def dealias_mask(self, fraction: float = DEFAULT_DEALIAS) -> np.ndarray:
        if not (0 < fraction <= 1):
            raise ValueError(f"dealias fraction must lie in (0, 1], got {fraction}")
        return (np.abs(self.k) <= fraction * (self.N // 2)).astype(float)

    # -- array-level operators ---------------------------------------------
    def hilbert(self, u) -> np.ndarray:
        return self.apply(self.sym_hilbert, u)

    def deriv(self, u) -> np.ndarray:
        return self.apply(self.sym_deriv, u)

    def absderiv(self, u, s: float = 1.0) -> np.ndarray:
        if s == 0:
            return np.array(u, copy=True)
        return self.apply(self.sym_fractional(s), u)

    def holo(self, u) -> np.ndarray:
        return self.apply(self.sym_holo, u)

    def antiholo(self, u) -> np.ndarray:
        return self.apply(self.sym_antiholo, u)

    def dealias(self, u, fraction: float = DEFAULT_DEALIAS) -> np.ndarray:
        if fraction == 1:
            return np.asarray(u, dtype=complex)
        return self.apply(self.dealias_mask(fraction), u)

    def mean(self, u) -> complex:
        return np.mean(u)


def make_grid(N: int, L: float = 2 * np.pi) -> Grid:
    """Build a periodic grid; rejects non-power-of-two ``N`` and ``L <= 0``."""
    return Grid(N, L)


def _real_tol(values: np.ndarray) -> float:
    return 1e-12 * (1.0 + float(np.max(np.abs(values), initial=0.0)))


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a periodic function on ``grid``.

    ``real=True`` marks a field that is real by contract; its imaginary
    residue must be below ``1e-12 (1 + max|f|)`` and is discarded.
    """

    grid: Grid
    values: np.ndarray = dc_field(repr=False)
    real: bool = False

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field has non-finite samples")
        if self.real:
            if np.iscomplexobj(v):
                resid = float(np.max(np.abs(v.imag), initial=0.0))
                if resid > _real_tol(v):
                    raise ValueError(f"real-flagged field has imaginary residue {resid:.3e}")
                v = v.real
            v = np.array(v, dtype=float)
        else:
            v = np.array(v, dtype=complex)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_function(cls, grid: Grid, fn, real: bool = False) -> "Field":
        return cls(grid, fn(grid.nodes), real)

    @classmethod
    def from_modes(cls, grid: Grid, coeffs, real: bool = False) -> "Field":
        """Build from mode coefficients given in FFT order."""
        vals = grid.ifft(np.asarray(coeffs, dtype=complex))
        if real:
            vals = vals.real
        return cls(grid, vals, real)

    @classmethod
    def constant(cls, grid: Grid, value: complex) -> "Field":
        real = np.isrealobj(value) or np.imag(value) == 0
        return cls(grid, np.full(grid.N, value if not real else np.real(value)), real)

    # -- inspection ---------------------------------------------------------
    def modes(self) -> np.ndarray:
        """Mode coefficients in FFT order."""
        return self.grid.fft(self.values)

    def mode(self, k: int) -> complex:
        return self.modes()[int(k) % self.grid.N]

    def mean(self) -> complex:
        m = np.mean(self.values)
        return float(m) if self.real else complex(m)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def imag_residue(self) -> float:
        return 0.0 if self.real else float(np.max(np.abs(self.values.imag)))

    # -- pointwise algebra --------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values, other.real
        if isinstance(other, Number):
            return other, not isinstance(other, complex) or other.imag == 0
        if isinstance(other, np.ndarray) and other.shape == (self.grid.N,):
            return other, np.isrealobj(other)
        return NotImplemented, False

    def _binary(self, other, op):
        vals, real = self._coerce(other)
        if vals is NotImplemented:
            return NotImplemented
        return Field(self.grid, op(self.values, vals), self.real and real)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __radd__(self, other):
        return self._binary(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return Field(self.grid, -self.values, self.real)

    def conj(self) -> "Field":
        return Field(self.grid, np.conj(self.values), self.real)

    def re(self) -> "Field":
        return Field(self.grid, self.values.real, True)

    def im(self) -> "Field":
        return Field(self.grid, np.imag(self.values), True)

    def abs(self) -> "Field":
        return Field(self.grid, np.abs(self.values), True)

    def as_real(self) -> "Field":
        """Re-flag as real, checking the imaginary residue."""
        return Field(self.grid, self.values, True)

    def allclose(self, other, rtol=1e-12, atol=0.0) -> bool:
        other_vals = other.values if isinstance(other, Field) else other
        return bool(np.allclose(self.values, other_vals, rtol=rtol, atol=atol))


def _wrap(f: Field, vals: np.ndarray, real: bool) -> Field:
    return Field(f.grid, vals.real if real else vals, real)


def derivative(f: Field) -> Field:
    """``d/dalpha`` via the multiplier ``i xi``; the result has zero mean."""
    return _wrap(f, f.grid.deriv(f.values), f.real)


def hilbert(f: Field) -> Field:
    """Hilbert transform, symbol ``-sgn(xi)`` with ``sgn(0) = 0``."""
    return _wrap(f, f.grid.hilbert(f.values), False)


def fractional_deriv(f: Field, s: float) -> Field:
    """``|d|^s`` with symbol ``|xi|^s``; identity for ``s = 0``."""
    if s < 0:
        raise ValueError(f"order must be >= 0, got {s}")
    return _wrap(f, f.grid.absderiv(f.values, s), f.real)


def project_holo(f: Field) -> Field:
    """``(I + H)/2``: keeps negative modes and half of the mean."""
    return _wrap(f, f.grid.holo(f.values), False)


def project_antiholo(f: Field) -> Field:
    """``(I - H)/2``: keeps positive modes and half of the mean."""
    return _wrap(f, f.grid.antiholo(f.values), False)


def poisson_smooth(f: Field, eps: float) -> Field:
    """Convolution with the half-plane Poisson kernel: symbol ``exp(-eps |xi|)``."""
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if eps == 0:
        return f
    sym = np.exp(-eps * np.abs(f.grid.xi))
    return _wrap(f, f.grid.apply(sym, f.values), f.real)


def mollify(f: Field, delta: float) -> Field:
    """Gaussian mollifier ``J_delta``: symbol ``exp(-(delta xi)^2 / 2)``."""
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    if delta == 0:
        return f
    sym = np.exp(-0.5 * (delta * f.grid.xi) ** 2)
    return _wrap(f, f.grid.apply(sym, f.values), f.real)


def dealias(f: Field, fraction: float = DEFAULT_DEALIAS) -> Field:
    """Zero every mode with ``|k| > fraction * N/2``."""
    mask = f.grid.dealias_mask(fraction)
    return _wrap(f, f.grid.apply(mask, f.values), f.real)


def l2_norm(f: Field) -> float:
    """``||f||_2`` on the torus of length ``L``."""
    return float(np.sqrt(f.grid.dx * np.sum(np.abs(f.values) ** 2)))


def random_band_limited(grid: Grid, kmax: int, rng=None, real: bool = True,
                        decay: float = 1.0) -> Field:
    """Random field with modes ``|k| <= kmax`` and amplitudes ~ ``(1+|k|)^-decay``."""
    rng = np.random.default_rng(rng)
    k = grid.k
    mask = (np.abs(k) <= kmax) & ~grid.nyquist
    coeffs = np.zeros(grid.N, dtype=complex)
    coeffs[mask] = (rng.standard_normal(mask.sum()) + 1j * rng.standard_normal(mask.sum()))
    coeffs[mask] /= (1.0 + np.abs(k[mask])) ** decay
    f = Field.from_modes(grid, coeffs)
    return f.re() if real else f
