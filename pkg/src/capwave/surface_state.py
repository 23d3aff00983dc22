"""
Phase-space state (g, v), its algebraic closure, and conformal variables.

``g`` is the interface angle written in conformal coordinates and
``v = Im(omega * conj(Z_t))``.  From (g, v) everything else is algebraic:

    c  = exp(-i H g) = 1/|Z_a|          omega = exp(i g) = Z_a/|Z_a|
    b  = 2i H(c v) + i [c^2, H](v/c)    a     = i c H(v/c)
    d  = -i omega c (I - H)(v/c) = Z_t
    A1 = 1 - Im [d, H] d(conj d)
    Theta = (I + H)(c dg)               kappa = c dg = Re Theta
    e2 = gamma Re(omega) - (A1 - 1 + gamma) c + sigma Im([c, H] d Theta)

``gamma`` is the gravity flag.  The constant 1 inside ``A1`` is the
gravitational acceleration itself, so ``gamma`` scales it too: the
coefficient actually used in the dynamics is ``A1 - 1 + gamma`` (available
as ``DerivedFields.A1_eff``), while ``A1`` is always reported in its
unit-gravity form, which satisfies ``A1 >= 1``.

Every pointwise product is dealiased with the 2/3 rule; the pointwise
exponentials ``c``, ``omega`` and ``Z_a`` are evaluated exactly at the nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .brackets import comm_h, comm_h_deriv
from .spectral_ops import DEFAULT_DEALIAS, Field, Grid

ZAP_DYNAMIC_RANGE = 1e8


class StateError(ValueError):
    """A state cannot be used: non-real data, overflow, nonzero winding, ..."""


@dataclass(frozen=True)
class SurfaceState:
    t: float
    g: Field
    v: Field

    def __post_init__(self):
        if self.g.grid != self.v.grid:
            raise StateError("g and v live on different grids")
        if not (self.g.real and self.v.real):
            raise StateError("g and v must be real fields")
        object.__setattr__(self, "t", float(self.t))

    @property
    def grid(self) -> Grid:
        return self.g.grid

    @classmethod
    def from_arrays(cls, grid: Grid, g, v, t: float = 0.0) -> "SurfaceState":
        g = np.asarray(g)
        v = np.asarray(v)
        return cls(t, Field(grid, g, True), Field(grid, v, True))

    @classmethod
    def flat(cls, grid: Grid, t: float = 0.0) -> "SurfaceState":
        return cls.from_arrays(grid, np.zeros(grid.N), np.zeros(grid.N), t)

    def angle_in_chart(self) -> bool:
        """Diagnostic: ``||g||_inf < pi``."""
        return self.g.max_abs() < np.pi


@dataclass(frozen=True)
class DerivedFields:
    c: Field
    omega: Field
    b: Field
    a: Field
    d: Field
    A1: Field
    e2: Field
    Theta: Field
    A1_eff: Field
    kappa: Field


@dataclass(frozen=True)
class ConformalState:
    Zap: Field
    Zt: Field
    t: float = 0.0


@dataclass(frozen=True)
class CrestSpec:
    """Angled-crest generator parameters; interior angle ``nu * pi``."""

    nu: float
    eta: float
    alpha0: float = 0.0

    def __post_init__(self):
        if not (0 < self.nu < 0.5):
            raise ValueError(f"crest exponent nu must lie in (0, 1/2), got {self.nu}")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")


# -- closure -------------------------------------------------------------------

def _check_real(name: str, u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    scale = 1.0 + float(np.max(np.abs(u), initial=0.0))
    resid = float(np.max(np.abs(u.imag), initial=0.0))
    if resid > tol * scale:
        raise StateError(f"{name} has imaginary residue {resid:.3e}")
    return u.real


def derive_arrays(grid: Grid, g, v, sigma: float, gravity: int = 1,
                  fraction: float = DEFAULT_DEALIAS) -> dict:
    """Closure of the (g, v) system on raw arrays.

    Returns a dict of arrays (real ones as float) including the helper
    products ``cdg = c dg`` and ``cdv = c dv`` that the evolution reuses.
    """
    D = lambda x: grid.dealias(x, fraction)
    H = grid.hilbert
    g = np.asarray(g, dtype=float)
    v = np.asarray(v, dtype=float)

    Hg = H(g)
    expo = (-1j * Hg).real  # c = exp(-iHg) and -iHg is real for real g
    if np.max(np.abs(expo)) > 700:
        raise StateError("c = exp(-iHg) over/underflows; |Hg| is too large")
    c = np.exp(expo)
    omega = np.exp(1j * g)
    c2 = D(c * c)
    v_c = D(v / c)

    b = 2j * H(D(c * v)) + 1j * comm_h(grid, c2, v_c, fraction)
    a = 1j * D(c * H(v_c))
    # omega * c = exp(i (I - H) g)
    d = -1j * D(omega * c * (v_c - H(v_c)))
    im_comm = np.imag(comm_h_deriv(grid, d, np.conj(d), fraction))
    A1 = 1.0 - im_comm
    A1_eff = gravity - im_comm

    dg = grid.deriv(g)
    cdg = _check_real("c dg", D(c * dg))
    Theta = cdg + H(cdg)
    e2 = (gravity * omega.real - D(A1_eff * c)
          + sigma * np.imag(comm_h_deriv(grid, c, Theta, fraction)))

    return {
        "c": c,
        "omega": omega,
        "b": _check_real("b", b),
        "a": _check_real("a", a),
        "d": d,
        "A1": A1,
        "A1_eff": A1_eff,
        "e2": _check_real("e2", e2),
        "Theta": Theta,
        "kappa": cdg,
        "cdv": _check_real("c dv", D(c * grid.deriv(v))),
        "dg": dg.real,
    }


def derive(state: SurfaceState, sigma: float, gravity: int = 1,
           fraction: float = DEFAULT_DEALIAS) -> DerivedFields:
    """Algebraic closure (c, omega, b, a, d, A1, e2, Theta) of a state."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    grid = state.grid
    r = derive_arrays(grid, state.g.values, state.v.values, sigma, gravity, fraction)
    F = lambda key, real=False: Field(grid, r[key], real)
    return DerivedFields(
        c=F("c", True), omega=F("omega"), b=F("b", True), a=F("a", True),
        d=F("d"), A1=F("A1", True), e2=F("e2", True), Theta=F("Theta"),
        A1_eff=F("A1_eff", True), kappa=F("kappa", True),
    )


# -- conformal variables -------------------------------------------------------

def zap_power(state: SurfaceState, p: float) -> Field:
    """``Z_a^p = exp(p i (I + H) g)``, the branch that tends to 1 at depth."""
    grid = state.grid
    g = state.g.values
    return Field(grid, np.exp(1j * p * (g + grid.hilbert(g))))


def to_conformal(state: SurfaceState, fraction: float = DEFAULT_DEALIAS) -> ConformalState:
    """``Z_a = exp(i (I + H) g)`` and ``Z_t = d``."""
    grid = state.grid
    g, v = state.g.values, state.v.values
    H = grid.hilbert
    Hg = H(g)
    c = np.exp((-1j * Hg).real)
    v_c = grid.dealias(v / c, fraction)
    d = -1j * grid.dealias(np.exp(1j * (g - Hg)) * (v_c - H(v_c)), fraction)
    return ConformalState(Field(grid, np.exp(1j * (g + Hg))), Field(grid, d), state.t)


def winding_number(z: np.ndarray) -> int:
    ph = np.angle(z)
    steps = np.angle(np.exp(1j * np.diff(np.append(ph, ph[0]))))
    return int(np.rint(np.sum(steps) / (2 * np.pi)))


def from_conformal(cs: ConformalState) -> SurfaceState:
    """``g = Im log Z_a`` (unwrapped, mean in (-pi, pi]) and ``v = Im(omega conj Z_t)``."""
    zap = cs.Zap.values
    if np.min(np.abs(zap)) == 0:
        raise StateError("Z_a vanishes on the grid")
    if winding_number(zap) != 0:
        raise StateError("Z_a winds around 0; log Z_a has no periodic branch")
    g = np.unwrap(np.angle(zap))
    g -= 2 * np.pi * np.round(np.mean(g) / (2 * np.pi))
    omega = zap / np.abs(zap)
    v = np.imag(omega * np.conj(cs.Zt.values))
    grid = cs.Zap.grid
    return SurfaceState.from_arrays(grid, g, v, cs.t)


# -- initial data --------------------------------------------------------------

def crest_log_coefficients(spec: CrestSpec, grid: Grid) -> np.ndarray:
    """FFT-ordered coefficients of ``log Z_a = (nu-1) log(1 - q e^{-i(a - a0)})``.

    ``q = exp(-eta)``; mode ``-n`` carries ``(1 - nu) q^n e^{i n a0} / n``.
    Modes up to ``N/2 - 1`` are kept.
    """
    n = np.arange(1, grid.N // 2)
    coeffs = np.zeros(grid.N, dtype=complex)
    coeffs[-n] = (1 - spec.nu) * np.exp(-spec.eta * n) * np.exp(1j * n * spec.alpha0) / n
    return coeffs


def crest_zap_coefficients(spec: CrestSpec, grid: Grid) -> np.ndarray:
    """FFT-ordered coefficients of ``Z_a = (1 - q e^{-i(a - a0)})^(nu - 1)``.

    Binomial series: mode ``-n`` carries ``c_n q^n e^{i n a0}`` with
    ``c_0 = 1`` and ``c_n = c_{n-1} (n - nu)/n``; kept up to ``N/2 - 1``.
    """
    n = np.arange(1, grid.N // 2)
    cn = np.cumprod((n - spec.nu) / n)
    coeffs = np.zeros(grid.N, dtype=complex)
    coeffs[0] = 1.0
    coeffs[-n] = cn * np.exp(-spec.eta * n) * np.exp(1j * n * spec.alpha0)
    return coeffs


def crest_max_curvature(spec: CrestSpec) -> float:
    """Closed-form ``max |kappa| = (1 - nu) q (1 - q)^(-nu)``, ``q = e^{-eta}``."""
    q = np.exp(-spec.eta)
    return (1 - spec.nu) * q * (1 - q) ** (-spec.nu)


def gen_crest(spec: CrestSpec, grid: Grid, zap_max: float = ZAP_DYNAMIC_RANGE) -> SurfaceState:
    """Angled-crest interface at rest, ``Z_a = (1 - e^{-eta} e^{-i(a - a0)})^(nu-1)``.

    ``g = Im log Z_a`` is built from the exact log series, so the state is
    holomorphic by construction and ``Z_a`` has mean 1 up to truncation.
    """
    logz = grid.ifft(crest_log_coefficients(spec, grid))
    zmax = float(np.max(np.exp(logz.real)))
    if not np.isfinite(zmax) or zmax > zap_max:
        raise StateError(f"|Z_a| reaches {zmax:.3e} > {zap_max:.1e}; increase eta")
    return SurfaceState.from_arrays(grid, logz.imag, np.zeros(grid.N))


def gen_wave(A: float, k: int, grid: Grid, fraction: float = DEFAULT_DEALIAS) -> SurfaceState:
    """Standing-wave seed ``g = A cos(k a)``, ``v = 0``."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    kmax = fraction * (grid.N // 2)
    if k > kmax:
        raise ValueError(f"mode {k} lies outside the dealiased band |k| <= {kmax:.1f}")
    xi = 2 * np.pi * k / grid.L
    return SurfaceState.from_arrays(grid, A * np.cos(xi * grid.nodes), np.zeros(grid.N))


def mollify_state(state: SurfaceState, eps: float) -> SurfaceState:
    """Poisson-smooth ``Z_a - 1`` and ``Z_t`` by ``eps`` and convert back."""
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if eps == 0:
        return state
    grid = state.grid
    cs = to_conformal(state)
    sym = np.exp(-eps * np.abs(grid.xi))
    zap = 1.0 + grid.apply(sym, cs.Zap.values - 1.0)
    zt = grid.apply(sym, cs.Zt.values)
    return from_conformal(ConformalState(Field(grid, zap), Field(grid, zt), state.t))


# -- geometry ------------------------------------------------------------------

def curvature(state: SurfaceState, fraction: float = DEFAULT_DEALIAS) -> Field:
    """``kappa = c dg`` (equal to ``Re Theta``)."""
    grid = state.grid
    g = state.g.values
    c = np.exp((-1j * grid.hilbert(g)).real)
    return Field(grid, grid.dealias(c * grid.deriv(g), fraction), True)


def curvature_conformal(state: SurfaceState) -> Field:
    """Independent route: ``kappa = -Im(omega d(1/Z_a))`` from conformal variables."""
    grid = state.grid
    zap = to_conformal(state).Zap.values
    omega = zap / np.abs(zap)
    return Field(grid, -np.imag(omega * grid.deriv(1.0 / zap)), True)


def theta_conformal(state: SurfaceState) -> Field:
    """``Theta = i w - i Re (I - H) w`` with ``w = omega d(1/Z_a)``."""
    grid = state.grid
    zap = to_conformal(state).Zap.values
    w = (zap / np.abs(zap)) * grid.deriv(1.0 / zap)
    return Field(grid, 1j * w - 1j * np.real(w - grid.hilbert(w)))


def a1_sigma(state: SurfaceState, sigma: float, gravity: int = 1) -> Field:
    """``A1 + sigma d H D_a(omega)`` with ``D_a = (1/Z_a) d``, from conformal variables.

    Uses the gravity-scaled coefficient ``A1 - 1 + gravity``.
    """
    grid = state.grid
    zap = to_conformal(state).Zap.values
    omega = zap / np.abs(zap)
    Da_omega = grid.deriv(omega) / zap
    A1_eff = derive(state, sigma, gravity).A1_eff.values
    out = A1_eff + sigma * grid.deriv(grid.hilbert(Da_omega))
    return Field(grid, _check_real("A1_sigma", out), True)


def scale_state(state: SurfaceState, lam: int):
    """Rescale ``g(a) -> g(lam a)``, ``v(a) -> v(lam a)/lam`` on a ``lam N`` grid.

    Returns ``(scaled_state, sigma_map)`` where ``sigma_map(s) = s / lam^3``.
    Integer ``lam`` keeps the torus period; the grid is refined by ``lam`` so
    that the scaled state is resolved exactly (mode k moves to mode lam k).
    """
    if isinstance(lam, bool) or int(lam) != lam or lam < 1:
        raise ValueError(f"scaling factor must be a positive integer, got {lam}")
    lam = int(lam)
    grid = state.grid
    fine = Grid(grid.N * lam, grid.L)
    g = np.tile(state.g.values, lam)
    v = np.tile(state.v.values, lam) / lam
    scaled = SurfaceState.from_arrays(fine, g, v, state.t)
    return scaled, (lambda s: s / lam ** 3)
