"""
Identity and invariant suites run by ``capwave validate``.

Each suite returns a :class:`SuiteResult` holding the worst residual over
its sample set and the tolerance it is held to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .brackets import (commutator_hilbert_deriv, quadrature_oracle_hilbert,
                       quadrature_oracle_triple)
from .energy_diag import hardy_quadrature, hhalf_norm
from .evolution import SimParams, rhs
from .spectral_ops import (Field, Grid, derivative, fractional_deriv, hilbert, poisson_smooth,
                           project_antiholo, project_holo, random_band_limited)
from .surface_state import (SurfaceState, derive, theta_conformal, to_conformal)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name:<28s} residual={self.residual:.3e} tol={self.tol:.1e}"


def rel(a, b) -> float:
    a = a.values if isinstance(a, Field) else np.asarray(a)
    b = b.values if isinstance(b, Field) else np.asarray(b)
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def operator_identities(grid: Grid, n_fields: int = 100, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    kmax = grid.N // 4
    worst = {k: 0.0 for k in ("hilbert_squared", "abs_deriv", "real_imag", "projections", "poisson")}
    for _ in range(n_fields):
        f = random_band_limited(grid, kmax, rng, real=False)
        worst["hilbert_squared"] = max(worst["hilbert_squared"],
                                       rel(hilbert(hilbert(f)), f - f.mean()))
        worst["abs_deriv"] = max(worst["abs_deriv"],
                                 rel(fractional_deriv(f, 1), 1j * hilbert(derivative(f))))
        f0 = f - f.mean()
        anti = f0 - hilbert(f0)
        r1 = rel(f0.re() + hilbert(f0.re()), f0 - 1j * anti.im())
        r2 = rel(1j * f0.im() + hilbert(1j * f0.im()), f0 - anti.re())
        worst["real_imag"] = max(worst["real_imag"], r1, r2)
        worst["projections"] = max(worst["projections"], rel(project_holo(f) + project_antiholo(f), f))
        e1, e2 = rng.uniform(0, 0.2, size=2)
        worst["poisson"] = max(worst["poisson"],
                               rel(poisson_smooth(poisson_smooth(f, e1), e2), poisson_smooth(f, e1 + e2)))
    return [SuiteResult(k, v, 1e-12) for k, v in worst.items()]


def hilbert_quadrature(grid: Grid, n_fields: int = 5, seed: int = 1) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        f = random_band_limited(grid, grid.N // 4, rng, real=False)
        worst = max(worst, rel(quadrature_oracle_hilbert(f), hilbert(f)))
    return SuiteResult("hilbert_vs_quadrature", worst, 1e-8)


def triple_identity(grid: Grid, n_fields: int = 3, seed: int = 2) -> SuiteResult:
    """``h d[f,H]dg = [h df,H]dg + [f,H]d(h dg) - [h,f;dg]`` with the triple
    bracket evaluated by quadrature."""
    rng = np.random.default_rng(seed)
    kmax = max(2, grid.N // 16)
    worst = 0.0
    for _ in range(n_fields):
        h, f, g = (random_band_limited(grid, kmax, rng) for _ in range(3))
        lhs = h * derivative(commutator_hilbert_deriv(f, g))
        rhs_ = (commutator_hilbert_deriv(h * derivative(f), g)
                + commutator_hilbert_deriv(f, h * derivative(g))
                - quadrature_oracle_triple(h, f, derivative(g)))
        worst = max(worst, rel(lhs, rhs_))
    return SuiteResult("triple_identity", worst, 1e-6)


def hardy_identity(grid: Grid, n_fields: int = 10, seed: int = 3) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        f = random_band_limited(grid, grid.N // 8, rng)
        a, b = hhalf_norm(f) ** 2, hardy_quadrature(f)
        worst = max(worst, abs(a - b) / a)
    return SuiteResult("hardy_identity", worst, 1e-2)


def smooth_state(grid: Grid) -> SurfaceState:
    x = grid.nodes * 2 * np.pi / grid.L
    g = 0.1 * np.cos(x) + 0.04 * np.sin(2 * x)
    v = 0.05 * np.sin(x) - 0.02 * np.cos(3 * x)
    return SurfaceState.from_arrays(grid, g, v)


def state_invariants(grid: Grid, sigma: float = 0.5) -> list:
    s = smooth_state(grid)
    d = derive(s, sigma)
    cs = to_conformal(s)
    out = [
        SuiteResult("theta_formulas", rel(d.Theta, theta_conformal(s)), 1e-9),
        SuiteResult("A1_lower_bound", max(0.0, 1.0 - float(np.min(d.A1.values))), 1e-10),
        SuiteResult("abs_zap_is_1_over_c", rel(cs.Zap.abs(), 1.0 / d.c), 1e-12),
    ]
    hol = 0.0
    for f in (d.d.conj(), d.Theta, cs.Zap - 1, 1 / cs.Zap - 1):
        f0 = f - f.mean()
        hol = max(hol, np.sqrt(grid.dx * np.sum(np.abs(project_antiholo(f0).values) ** 2)))
    out.append(SuiteResult("holomorphy", float(hol), 1e-9))
    return out


def flat_equilibrium(grid: Grid) -> SuiteResult:
    gd, vd = rhs(SurfaceState.flat(grid), SimParams(sigma=0.5, gravity=1))
    return SuiteResult("flat_equilibrium", max(gd.max_abs(), vd.max_abs()), 1e-13)


def run_all(N: int = 256, L: float = 2 * np.pi) -> list:
    grid = Grid(N, L)
    results = operator_identities(grid)
    results.append(hilbert_quadrature(grid))
    results.append(triple_identity(Grid(max(N, 512), L)))
    results.append(hardy_identity(grid))
    results += state_invariants(grid)
    results.append(flat_equilibrium(grid))
    return results
