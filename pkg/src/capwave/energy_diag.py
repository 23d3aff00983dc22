"""
Norms, energy functionals and scalar diagnostics of a surface state.

Norm conventions (torus of length L, ``fhat = fft(f)/N``):

    ||f||_2^2          = L sum |fhat_k|^2
    ||f||_{H^s}^2      = L sum (1 + xi_k^2)^s |fhat_k|^2
    ||f||_{Hdot^1/2}^2 = L sum |xi_k| |fhat_k|^2

Fractional powers of ``Z_a`` use the branch ``exp(p i (I + H) g)``.  Material
derivatives inside ``E_sigma`` are closed algebraically from the fundamental
equation

    conj(Z_tt) = i gamma - i A1_eff / Z_a + sigma (1/Z_a) dTheta,

so every report is a function of a single state.  ``A1_eff = A1 - 1 + gamma``
(see :mod:`capwave.surface_state`) is used wherever the Taylor coefficient
enters; with gravity on it is the usual ``A1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .brackets import comm_h_deriv
from .spectral_ops import DEFAULT_DEALIAS, Field, Grid
from .surface_state import SurfaceState, derive_arrays


# -- norms ---------------------------------------------------------------------

def _l2sq(grid: Grid, u) -> float:
    return float(grid.dx * np.sum(np.abs(u) ** 2))


def _hhalf_sq(grid: Grid, u) -> float:
    return float(grid.L * np.sum(np.abs(grid.xi) * np.abs(grid.fft(u)) ** 2))


def _hs_sq(grid: Grid, u, s: float) -> float:
    return float(grid.L * np.sum((1.0 + grid.xi ** 2) ** s * np.abs(grid.fft(u)) ** 2))


def _linf(u) -> float:
    return float(np.max(np.abs(u)))


def sobolev_norm(f: Field, s: float) -> float:
    """``||f||_{H^s}`` with weight ``(1 + xi^2)^(s/2)``."""
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s}")
    return float(np.sqrt(_hs_sq(f.grid, f.values, s)))


def hhalf_norm(f: Field) -> float:
    """Homogeneous ``Hdot^{1/2}`` seminorm."""
    return float(np.sqrt(_hhalf_sq(f.grid, f.values)))


def l2_norm(f: Field) -> float:
    return float(np.sqrt(_l2sq(f.grid, f.values)))


# -- shared conformal quantities ------------------------------------------------

class _Kinematics:
    """Conformal quantities of one state, computed once and shared."""

    def __init__(self, state: SurfaceState, sigma: float, gravity: int,
                 fraction: float = DEFAULT_DEALIAS):
        grid = state.grid
        self.grid = grid
        self.sigma = sigma
        self.gravity = gravity
        self.fraction = fraction
        self.r = derive_arrays(grid, state.g.values, state.v.values, sigma, gravity, fraction)
        g = state.g.values
        self.logz = 1j * (g + grid.hilbert(g))  # log Z_a
        self.zap = np.exp(self.logz)
        self.izap = 1.0 / self.zap
        self.c = self.r["c"]                    # 1/|Z_a|
        self.ztb = np.conj(self.r["d"])          # conj(Z_t)

    def zpow(self, p: float) -> np.ndarray:
        return np.exp(p * self.logz)

    def D(self, u):
        return self.grid.dealias(u, self.fraction)

    @property
    def A1(self) -> np.ndarray:
        return self.r["A1_eff"]

    def zttbar(self) -> np.ndarray:
        grid, s = self.grid, self.sigma
        theta = self.r["Theta"]
        return (1j * self.gravity - 1j * self.A1 * self.izap
                + s * self.izap * grid.deriv(theta))

    def dbar_ztb(self) -> np.ndarray:
        """``Dbar_a conj(Z_t) = (1/conj(Z_a)) d conj(Z_t)``."""
        return np.conj(self.izap) * self.grid.deriv(self.ztb)

    def dt_theta(self) -> np.ndarray:
        grid = self.grid
        H = grid.hilbert
        theta = self.r["Theta"]
        X = self.c * grid.deriv(self.dbar_ztb()) + 1j * theta.real * self.dbar_ztb()
        corr = comm_h_deriv(grid, self.r["b"], theta, self.fraction)
        return 1j * X - 1j * np.real(X - H(X)) + 1j * np.imag(corr)

    def dt_ztb_a(self) -> np.ndarray:
        grid = self.grid
        return grid.deriv(self.zttbar()) - grid.deriv(self.r["b"]) * grid.deriv(self.ztb)

    def dt_dbar_ztb(self) -> np.ndarray:
        w = self.dbar_ztb()
        return np.conj(self.izap) * self.grid.deriv(self.zttbar()) - w * w


# -- energies ------------------------------------------------------------------

def energy_calE_sigma(state: SurfaceState, sigma: float, gravity: int = 1):
    """Weighted holomorphic energy: ``(calE_1 terms, calE_2 terms)``.

    Returns two tuples of nine and four nonnegative terms; sum them for
    ``calE_sigma_1`` and ``calE_sigma_2``.
    """
    K = _Kinematics(state, sigma, gravity)
    grid = K.grid
    d = grid.deriv
    s = sigma
    w1 = d(K.izap)
    w2 = d(w1)
    w3 = d(w2)
    theta = K.r["Theta"]
    zta = d(K.ztb)
    zta1 = d(zta)
    zta2 = d(zta1)
    half = K.zpow(0.5)
    e1 = (
        _l2sq(grid, w1),
        _hhalf_sq(grid, K.izap * w1),
        _hhalf_sq(grid, s * d(theta)),
        _l2sq(grid, s ** (1 / 6) * half * w1) ** 3,
        _linf(s ** 0.5 * half * w1) ** 2,
        _l2sq(grid, s ** 0.5 * K.zpow(-0.5) * w2),
        _hhalf_sq(grid, s ** 0.5 * K.zpow(-1.5) * w2),
        _l2sq(grid, s * K.izap * w3),
        _hhalf_sq(grid, s * K.zpow(-2.0) * w3),
    )
    e2 = (
        _l2sq(grid, zta),
        _l2sq(grid, K.zpow(-2.0) * zta1),
        _l2sq(grid, s ** 0.5 * K.zpow(-0.5) * zta1),
        _l2sq(grid, s ** 0.5 * K.zpow(-2.5) * zta2),
    )
    return e1, e2


def energy_E_sigma(state: SurfaceState, sigma: float, gravity: int = 1):
    """The five grouped energies ``E_sigma_0 .. E_sigma_4`` (each a sum of terms).

    Returns a tuple of five tuples holding the individual terms.
    """
    K = _Kinematics(state, sigma, gravity)
    grid = K.grid
    d = grid.deriv
    s = sigma
    c = K.c
    absz = 1.0 / c
    sqA = np.sqrt(np.maximum(K.A1, 0.0))
    w1 = d(K.izap)
    w2 = d(w1)
    theta = K.r["Theta"]
    zta = d(K.ztb)
    zta1 = d(zta)
    dbz = K.dbar_ztb()
    abs_dbz = c * grid.deriv(dbz)  # |D_a| Dbar_a conj(Z_t), |D_a| = (1/|Z_a|) d

    E0 = (
        _linf(s ** 0.5 * absz ** 0.5 * w1) ** 2,
        _l2sq(grid, s ** (1 / 6) * absz ** 0.5 * w1) ** 3,
        _l2sq(grid, w1),
        _l2sq(grid, s ** 0.5 * c ** 0.5 * w2),
    )
    E1 = (
        _hhalf_sq(grid, (K.zttbar() - 1j * gravity) * K.zap),
        _l2sq(grid, sqA * zta),
        _l2sq(grid, s ** 0.5 * c ** 0.5 * zta1),
    )
    E2 = (
        _l2sq(grid, K.dt_ztb_a()),
        _hhalf_sq(grid, sqA * zta * c),
        _hhalf_sq(grid, s ** 0.5 * c ** 1.5 * zta1),
    )
    E3 = (
        _l2sq(grid, K.dt_theta()),
        _hhalf_sq(grid, sqA * theta * c),
        _hhalf_sq(grid, s ** 0.5 * c ** 1.5 * d(theta)),
    )
    E4 = (
        _hhalf_sq(grid, K.dt_dbar_ztb()),
        _l2sq(grid, sqA * abs_dbz),
        _l2sq(grid, s ** 0.5 * c ** 0.5 * d(abs_dbz)),
    )
    return E0, E1, E2, E3, E4


def _c_deriv_power(grid: Grid, c, u, n: int, D) -> np.ndarray:
    for _ in range(n):
        u = D(c * grid.deriv(u))
    return u


def energy_solver(state: SurfaceState, sigma: float, N_extra: int = 0, gravity: int = 1):
    """``(calE_3.5, [calE_4.5, calE_5.5, ..., calE_{4.5 + N_extra}])``."""
    if N_extra < 0:
        raise ValueError("N_extra must be >= 0")
    grid = state.grid
    g, v = state.g.values, state.v.values
    r = derive_arrays(grid, g, v, sigma, gravity)
    c, a = r["c"], r["a"]
    D = grid.dealias
    e35 = 0.5 * _hs_sq(grid, g, 2.5) + 0.5 * _hs_sq(grid, v, 2.0)
    highs = []
    cg = _c_deriv_power(grid, c, g, 3, D)
    cv = _c_deriv_power(grid, c, v, 3, D)
    for _ in range(N_extra + 1):
        highs.append(0.5 * _l2sq(grid, (cv - D(a * cg)) / np.sqrt(c))
                     + 0.5 * sigma * _hhalf_sq(grid, cg))
        cg = D(c * grid.deriv(cg))
        cv = D(c * grid.deriv(cv))
    return e35, highs


def energy_delta(s1: SurfaceState, s2: SurfaceState, sigma: float, gravity: int = 1):
    """Difference energy ``(E_D2, E_D2.5, E_D3)``; weights come from ``s1``."""
    if s1.grid != s2.grid:
        raise ValueError("states live on different grids")
    if abs(s1.t - s2.t) > 1e-12 * max(1.0, abs(s1.t)):
        raise ValueError(f"states are at different times ({s1.t} vs {s2.t})")
    grid = s1.grid
    D = grid.dealias
    r1 = derive_arrays(grid, s1.g.values, s1.v.values, sigma, gravity)
    r2 = derive_arrays(grid, s2.g.values, s2.v.values, sigma, gravity)
    c1, c2, a1 = r1["c"], r2["c"], r1["a"]
    g1, g2, v1, v2 = s1.g.values, s2.g.values, s1.v.values, s2.v.values
    cd = lambda c, u: D(c * grid.deriv(u))
    dg, dv = g1 - g2, v1 - v2

    e2 = 0.5 * _hs_sq(grid, dg, 1.0) + _hs_sq(grid, dv, 0.5)
    e25 = (0.5 * _l2sq(grid, cd(c1, dv) / np.sqrt(c1))
           + 0.5 * sigma * _hhalf_sq(grid, cd(c1, dg)))
    half = lambda u: grid.absderiv(u, 0.5)
    zeta = (half(cd(c1, v1) - cd(c2, v2))
            - D(a1 * half(cd(c1, g1) - cd(c2, g2))))
    curv2 = cd(c1, cd(c1, g1)) - cd(c2, cd(c2, g2))
    e3 = 0.5 * _l2sq(grid, zeta) + 0.5 * sigma * _l2sq(grid, curv2 / np.sqrt(c1))
    return e2, e25, e3


def wc_norms(f: Field, state: SurfaceState):
    """``(||f||_W, ||f||_C)`` with weights from ``state``.

    ``||w||_W = ||w||_inf + || |D_a| w ||_2`` (``|D_a| = (1/|Z_a|) d``) and
    ``||f||_C = ||f||_{Hdot^1/2} + (1 + ||d(1/|Z_a|)||_2) ||f |Z_a| ||_2``.
    """
    grid = state.grid
    g = state.g.values
    c = np.exp((-1j * grid.hilbert(g)).real)
    u = f.values
    W = _linf(u) + np.sqrt(_l2sq(grid, c * grid.deriv(u)))
    C = (np.sqrt(_hhalf_sq(grid, u))
         + (1 + np.sqrt(_l2sq(grid, grid.deriv(c)))) * np.sqrt(_l2sq(grid, u / c)))
    return float(W), float(C)


def taylor_sign(state: SurfaceState, sigma: float, gravity: int = 1) -> Field:
    """``A_{1,sigma} / |Z_a| = c (A1_eff + sigma |d| kappa)``; may go negative."""
    grid = state.grid
    r = derive_arrays(grid, state.g.values, state.v.values, sigma, gravity)
    vals = r["c"] * (r["A1_eff"] + sigma * grid.absderiv(r["kappa"]).real)
    return Field(grid, vals, True)


def blowup_quantity(state: SurfaceState) -> float:
    """``||Z_a - 1||_{H^3.5} + ||1/Z_a - 1||_{H^3.5} + ||Z_t||_{H^3}``."""
    grid = state.grid
    g, v = state.g.values, state.v.values
    r = derive_arrays(grid, g, v, 0.0, 1)
    logz = 1j * (g + grid.hilbert(g))
    zap = np.exp(logz)
    return float(np.sqrt(_hs_sq(grid, zap - 1, 3.5))
                 + np.sqrt(_hs_sq(grid, 1 / zap - 1, 3.5))
                 + np.sqrt(_hs_sq(grid, r["d"], 3.0)))


def zttbar(state: SurfaceState, sigma: float, gravity: int = 1) -> Field:
    """Closed-form ``conj(Z_tt) = i gamma - i A1_eff/Z_a + sigma D_a Theta``."""
    return Field(state.grid, _Kinematics(state, sigma, gravity).zttbar())


def residual_fundamental(prev: SurfaceState, cur: SurfaceState, nxt: SurfaceState,
                         sigma: float, gravity: int = 1) -> float:
    """Relative mismatch between the time-differenced and closed-form ``D_t conj(Z_t)``.

    ``D_t conj(Z_t)`` is estimated as a centred difference of ``conj(Z_t)``
    between ``prev`` and ``nxt`` plus ``b d conj(Z_t)`` at ``cur``.
    """
    grid = cur.grid
    zt = lambda s: np.conj(derive_arrays(grid, s.g.values, s.v.values, sigma, gravity)["d"])
    K = _Kinematics(cur, sigma, gravity)
    lhs = (zt(nxt) - zt(prev)) / (nxt.t - prev.t) + K.r["b"] * grid.deriv(K.ztb)
    rhs = K.zttbar()
    denom = np.sqrt(_l2sq(grid, lhs))
    if denom == 0:
        return float(np.sqrt(_l2sq(grid, rhs)))
    return float(np.sqrt(_l2sq(grid, lhs - rhs)) / denom)


# -- report --------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyReport:
    t: float
    E_sigma: tuple
    E_sigma_total: float
    calE_sigma: tuple
    calE_sigma_total: float
    solver_E: tuple
    A1_min: float
    curvature_linf: float
    sigma13_kappa: float
    taylor_min: float
    blowup_quantity: float
    residual_fundamental: float = float("nan")
    E_sigma_terms: tuple = dc_field(default=(), repr=False)
    calE_sigma_terms: tuple = dc_field(default=(), repr=False)

    def as_row(self) -> dict:
        row = {"t": self.t}
        for i, e in enumerate(self.E_sigma):
            row[f"E_sigma_{i}"] = e
        row["E_sigma_total"] = self.E_sigma_total
        row["calE_sigma_1"], row["calE_sigma_2"] = self.calE_sigma
        row["calE_sigma_total"] = self.calE_sigma_total
        row["solverE_3_5"] = self.solver_E[0]
        row["solverE_4_5"] = self.solver_E[1]
        row["A1_min"] = self.A1_min
        row["taylor_min"] = self.taylor_min
        row["kappa_linf"] = self.curvature_linf
        row["sigma13_kappa_linf"] = self.sigma13_kappa
        row["blowup_q"] = self.blowup_quantity
        row["residual_fund"] = self.residual_fundamental
        return row


CSV_COLUMNS = (
    "t", "E_sigma_0", "E_sigma_1", "E_sigma_2", "E_sigma_3", "E_sigma_4",
    "E_sigma_total", "calE_sigma_1", "calE_sigma_2", "calE_sigma_total",
    "solverE_3_5", "solverE_4_5", "A1_min", "taylor_min", "kappa_linf",
    "sigma13_kappa_linf", "blowup_q", "residual_fund",
)


def energy_report(state: SurfaceState, sigma: float, gravity: int = 1,
                  N_extra: int = 0) -> EnergyReport:
    """Every energy and scalar diagnostic of ``state``."""
    E_terms = energy_E_sigma(state, sigma, gravity)
    E = tuple(float(sum(t)) for t in E_terms)
    cal_terms = energy_calE_sigma(state, sigma, gravity)
    cal = tuple(float(sum(t)) for t in cal_terms)
    e35, highs = energy_solver(state, sigma, N_extra, gravity)
    r = derive_arrays(state.grid, state.g.values, state.v.values, sigma, gravity)
    kinf = _linf(r["kappa"])
    return EnergyReport(
        t=state.t,
        E_sigma=E,
        E_sigma_total=float(sum(E)),
        calE_sigma=cal,
        calE_sigma_total=float(sum(cal)),
        solver_E=(float(e35), *map(float, highs)),
        A1_min=float(np.min(r["A1"])),
        curvature_linf=kinf,
        sigma13_kappa=float(sigma ** (1 / 3) * kinf),
        taylor_min=float(np.min(taylor_sign(state, sigma, gravity).values)),
        blowup_quantity=blowup_quantity(state),
        E_sigma_terms=E_terms,
        calE_sigma_terms=cal_terms,
    )


def hardy_quadrature(f: Field) -> float:
    """``||f||_{Hdot^1/2}^2`` as the double integral
    ``(1/2pi) int int |f(a) - f(b)|^2 (pi/L)^2 csc^2(pi (a - b)/L) da db``.

    Test oracle (O(N^2)); the integrand is smooth and is summed with the
    alternating-point rule in ``b``.
    """
    grid = f.grid
    n = np.arange(grid.N)
    diff = n[:, None] - n[None, :]
    odd = (diff % 2) != 0
    K = np.zeros((grid.N, grid.N))
    K[odd] = (np.pi / grid.L) ** 2 / np.sin(np.pi * diff[odd] / grid.N) ** 2
    D = np.abs(f.values[:, None] - f.values[None, :]) ** 2
    return float(grid.dx * 2 * grid.dx * np.sum(K * D) / (2 * np.pi))
