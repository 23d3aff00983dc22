"""
Time integration of the (g, v) system.

    g_t = -(c d)v + a (c d)g - b dg
    v_t = -i sigma H (c d)^2 g - a (c d)v - b dv + a^2 (c d)g + e2

The mollified variant wraps both brackets in ``J_delta^2`` and adds the
dissipation ``-eps_visc |d| v`` to the v equation.  Stepping is classical
RK4 under a CFL cap built from the capillary-gravity dispersion relation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .energy_diag import EnergyReport, blowup_quantity, energy_report, residual_fundamental
from .spectral_ops import DEFAULT_DEALIAS, Field
from .surface_state import StateError, SurfaceState, derive_arrays

log = logging.getLogger(__name__)

RK4_IMAG_AXIS = 2.8


class IntegrationError(RuntimeError):
    """Non-finite values appeared during a step."""

    def __init__(self, message: str, last_state: Optional[SurfaceState] = None):
        super().__init__(message)
        self.last_state = last_state


@dataclass(frozen=True)
class SimParams:
    sigma: float = 0.0
    gravity: int = 1
    delta: float = 0.0
    eps_visc: float = 0.0
    dt: object = "auto"
    T: float = 0.0
    dealias: float = DEFAULT_DEALIAS
    cfl: float = 0.5
    output_every: int = 1
    blowup_ceiling: float = 1e6
    N_extra: int = 0

    def __post_init__(self):
        for name in ("sigma", "delta", "eps_visc", "T", "cfl", "blowup_ceiling"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.gravity not in (0, 1):
            raise ValueError("gravity must be 0 or 1")
        if not (0 < self.dealias <= 1):
            raise ValueError("dealias fraction must lie in (0, 1]")
        if self.dt != "auto" and not (float(self.dt) > 0):
            raise ValueError("dt must be positive or 'auto'")
        if int(self.output_every) < 1:
            raise ValueError("output_every must be >= 1")

    @property
    def mollified(self) -> bool:
        return self.delta > 0 or self.eps_visc > 0


@dataclass
class Trajectory:
    states: list
    reports: list
    params: SimParams
    provenance: str = ""
    status: str = "ok"          # ok | blowup | failed
    message: str = ""
    steps: list = dc_field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> SurfaceState:
        return self.states[-1]


# -- right-hand sides ----------------------------------------------------------

def _rhs_arrays(grid, g, v, p: SimParams, mollified: bool):
    D = lambda x: grid.dealias(x, p.dealias)
    r = derive_arrays(grid, g, v, p.sigma, p.gravity, p.dealias)
    c, a, b = r["c"], r["a"], r["b"]
    cdg, cdv = r["kappa"], r["cdv"]
    gdot = -cdv + D(a * cdg) - D(b * r["dg"])
    cc = D(c * grid.deriv(cdg))
    vdot = (-1j * p.sigma * grid.hilbert(cc) - D(a * cdv) - D(b * grid.deriv(v))
            + D(D(a * a) * cdg) + r["e2"])
    gdot, vdot = D(gdot), D(vdot)
    if mollified:
        if p.delta > 0:
            sym = np.exp(-(p.delta * grid.xi) ** 2)  # J_delta^2
            gdot = grid.apply(sym, gdot)
            vdot = grid.apply(sym, vdot)
        if p.eps_visc > 0:
            vdot = vdot - p.eps_visc * grid.absderiv(v)
    for name, u in (("gdot", gdot), ("vdot", vdot)):
        resid = float(np.max(np.abs(u.imag)))
        if resid > 1e-11 * (1 + float(np.max(np.abs(u)))):
            raise StateError(f"{name} has imaginary residue {resid:.3e}")
    return gdot.real, vdot.real


def rhs(state: SurfaceState, p: SimParams):
    """``(g_t, v_t)`` of the exact system as real fields."""
    gd, vd = _rhs_arrays(state.grid, state.g.values, state.v.values, p, False)
    return Field(state.grid, gd, True), Field(state.grid, vd, True)


def rhs_mollified(state: SurfaceState, p: SimParams):
    """``(g_t, v_t)`` of the mollified, dissipative system."""
    gd, vd = _rhs_arrays(state.grid, state.g.values, state.v.values, p, True)
    return Field(state.grid, gd, True), Field(state.grid, vd, True)


def step_rk4(state: SurfaceState, dt: float, p: SimParams, which: str = "exact") -> SurfaceState:
    """One classical RK4 step of size ``dt``; ``which`` is ``exact`` or ``mollified``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if which not in ("exact", "mollified"):
        raise ValueError(f"unknown system {which!r}")
    moll = which == "mollified"
    grid = state.grid
    g0, v0 = state.g.values, state.v.values
    f = lambda g, v: _rhs_arrays(grid, g, v, p, moll)
    try:
        k1g, k1v = f(g0, v0)
        k2g, k2v = f(g0 + 0.5 * dt * k1g, v0 + 0.5 * dt * k1v)
        k3g, k3v = f(g0 + 0.5 * dt * k2g, v0 + 0.5 * dt * k2v)
        k4g, k4v = f(g0 + dt * k3g, v0 + dt * k3v)
    except (StateError, FloatingPointError, ValueError) as exc:
        raise IntegrationError(f"step failed at t={state.t:.6g}: {exc}", state) from exc
    g1 = g0 + dt / 6 * (k1g + 2 * k2g + 2 * k3g + k4g)
    v1 = v0 + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(v1))):
        raise IntegrationError(f"non-finite values after step at t={state.t:.6g}", state)
    return SurfaceState.from_arrays(grid, g1, v1, state.t + dt)


def cfl_dt(state: SurfaceState, p: SimParams) -> float:
    """Largest stable step: dispersive bound and advective bound, whichever is smaller."""
    grid = state.grid
    r = derive_arrays(grid, state.g.values, state.v.values, p.sigma, p.gravity, p.dealias)
    C = float(np.max(r["c"]))
    xi = grid.xi_max
    omega_max = math.sqrt(p.gravity * xi * C + p.sigma * xi ** 3 * C ** 3)
    dt_wave = p.cfl * RK4_IMAG_AXIS / omega_max if omega_max > 0 else math.inf
    speed = float(np.max(np.abs(r["b"]) + np.abs(r["a"] * r["c"])))
    dt_adv = p.cfl * grid.dx / speed if speed > 0 else math.inf
    dt = min(dt_wave, dt_adv)
    return dt if math.isfinite(dt) else p.cfl * grid.dx


def _uniform_steps(span: float, dt_max: float) -> tuple[int, float]:
    n = max(1, math.ceil(span / dt_max - 1e-9))
    return n, span / n


def evolve(initial: SurfaceState, p: SimParams,
           sink: Optional[Callable[[SurfaceState, EnergyReport], None]] = None,
           provenance: str = "", which: Optional[str] = None,
           reports: bool = True) -> Trajectory:
    """Integrate from ``initial`` to ``initial.t + T``.

    Checkpoints are taken every ``output_every`` steps and at the final time.
    A fixed ``dt`` is shrunk slightly so that an integer number of steps
    lands exactly on ``T``; with ``dt='auto'`` the CFL step is recomputed at
    every checkpoint.  The run stops early with ``status='blowup'`` when the
    blow-up quantity exceeds ``blowup_ceiling`` and with ``status='failed'``
    on non-finite values; the last good state is kept in both cases.
    """
    which = which or ("mollified" if p.mollified else "exact")
    rep = (lambda s: energy_report(s, p.sigma, p.gravity, p.N_extra)) if reports else (lambda s: None)
    traj = Trajectory([], [], p, provenance, steps=[])

    def checkpoint(state, step):
        report = rep(state)
        traj.states.append(state)
        traj.reports.append(report)
        traj.steps.append(step)
        if sink is not None:
            sink(state, report)
        q = report.blowup_quantity if report is not None else blowup_quantity(state)
        return q

    t0, t_end = initial.t, initial.t + p.T
    q = checkpoint(initial, 0)
    if q > p.blowup_ceiling:
        traj.status, traj.message = "blowup", f"blow-up quantity {q:.3e} exceeds ceiling at t={t0:.6g}"
        return traj
    if p.T == 0:
        return traj

    def plan(state):
        dt_max = cfl_dt(state, p) if p.dt == "auto" else float(p.dt)
        return _uniform_steps(t_end - state.t, dt_max)

    state = initial
    nsteps, dt = plan(state)
    done = 0
    step = 0
    while done < nsteps:
        try:
            state = step_rk4(state, dt, p, which)
        except IntegrationError as exc:
            traj.status, traj.message = "failed", str(exc)
            return traj
        done += 1
        step += 1
        last = done == nsteps
        if last:
            state = replace(state, t=t_end)
        if step % p.output_every == 0 or last:
            q = checkpoint(state, step)
            if q > p.blowup_ceiling:
                traj.status = "blowup"
                traj.message = f"blow-up quantity {q:.3e} exceeds ceiling at t={state.t:.6g}"
                return traj
            if p.dt == "auto" and not last:
                n_new, dt_new = plan(state)
                if dt_new < dt * (1 - 1e-12):
                    log.info("CFL step reduced from %.3e to %.3e at t=%.6g", dt, dt_new, state.t)
                    nsteps, dt, done = n_new, dt_new, 0
                else:
                    nsteps, done = nsteps - done, 0
    if reports:
        fill_residuals(traj)
    return traj


def fill_residuals(traj: Trajectory) -> None:
    """Attach the fundamental-equation residual to interior checkpoints."""
    p = traj.params
    if traj.params.mollified:
        return
    for i in range(1, len(traj.states) - 1):
        res = residual_fundamental(traj.states[i - 1], traj.states[i], traj.states[i + 1],
                                   p.sigma, p.gravity)
        traj.reports[i] = replace(traj.reports[i], residual_fundamental=res)


def lagrangian_map(traj: Trajectory, alpha0: float, substeps: int = 4, b_fields=None):
    """Follow ``dh/dt = b(h, t)``, ``h(0) = alpha0`` through a trajectory.

    ``b`` is interpolated with periodic cubic splines in space and linearly
    in time between checkpoints.  By default it is recomputed from each
    checkpoint; ``b_fields`` (one array per checkpoint) overrides that.
    Returns ``(times, h)`` with ``h`` reduced modulo ``L``.
    """
    p = traj.params
    grid = traj.states[0].grid
    L = grid.L
    x = np.append(grid.nodes, L)
    if b_fields is None:
        b_fields = [derive_arrays(grid, s.g.values, s.v.values, p.sigma, p.gravity,
                                  p.dealias)["b"] for s in traj.states]
    elif len(b_fields) != len(traj.states):
        raise ValueError("need one b field per checkpoint")
    splines = []
    for b in b_fields:
        b = np.asarray(b, dtype=float)
        splines.append(CubicSpline(x, np.append(b, b[0]), bc_type="periodic"))
    times = traj.times

    def b_at(h, t, i):
        t0, t1 = times[i], times[i + 1]
        w = (t - t0) / (t1 - t0)
        hm = h % L
        return (1 - w) * splines[i](hm) + w * splines[i + 1](hm)

    h = float(alpha0)
    out = [h % L]
    for i in range(len(times) - 1):
        dt = (times[i + 1] - times[i]) / substeps
        t = times[i]
        for _ in range(substeps):
            k1 = b_at(h, t, i)
            k2 = b_at(h + 0.5 * dt * k1, t + 0.5 * dt, i)
            k3 = b_at(h + 0.5 * dt * k2, t + 0.5 * dt, i)
            k4 = b_at(h + dt * k3, t + dt, i)
            h += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += dt
        out.append(h % L)
    return times, np.array(out)
