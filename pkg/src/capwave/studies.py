"""
Parameter-sweep studies.  Each returns ``(columns, rows, summary)`` where
``rows`` is a list of dicts and ``summary`` a dict of derived scalars.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from .energy_diag import energy_delta
from .evolution import SimParams, cfl_dt, evolve
from .spectral_ops import Grid
from .surface_state import (CrestSpec, SurfaceState, crest_max_curvature, curvature, derive,
                            gen_crest, scale_state)


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def crest_scaling(nu: float, eta0: float, eps_list, grid: Grid, alpha0: float = 0.0,
                  workers: int = 1):
    """``||kappa||_inf`` of the crest smoothed by ``eps`` versus ``eps``.

    Poisson smoothing by ``eps`` maps the crest family ``eta -> eta + eps``
    exactly, so the smoothed data are generated directly in that form.
    The fitted log-log slope is compared with ``-nu``.
    """
    def point(eps):
        spec = CrestSpec(nu, eta0 + eps, alpha0)
        k = curvature(gen_crest(spec, grid)).max_abs()
        exact = crest_max_curvature(spec)
        return {"eps": float(eps), "kappa_linf": k, "kappa_closed_form": exact,
                "rel_err": abs(k - exact) / exact}

    rows = _map(point, list(eps_list), workers)
    eps = np.array([r["eps"] for r in rows])
    kap = np.array([r["kappa_linf"] for r in rows])
    slope = float(np.polyfit(np.log(eps), np.log(kap), 1)[0])
    exact = np.array([r["kappa_closed_form"] for r in rows])
    slope_exact = float(np.polyfit(np.log(eps), np.log(exact), 1)[0])
    cols = ("eps", "kappa_linf", "kappa_closed_form", "rel_err")
    return cols, rows, {"slope": slope, "slope_closed_form": slope_exact, "target": -nu}


def convergence(initial: SurfaceState, p: SimParams, steps=(10, 20, 40, 80),
                ref_steps: int = 640, workers: int = 1):
    """Time-step self-convergence at final time ``T`` against a fine reference."""
    if p.T <= 0:
        raise ValueError("convergence study needs T > 0")

    def run(n):
        q = replace(p, dt=p.T / n, output_every=max(1, n))
        return evolve(initial, q, reports=False).final

    finals = _map(run, list(steps) + [ref_steps], workers)
    ref = finals[-1]
    rows = []
    prev = None
    for n, s in zip(steps, finals[:-1]):
        err = float(max(np.max(np.abs(s.g.values - ref.g.values)),
                        np.max(np.abs(s.v.values - ref.v.values))))
        order = float(np.log2(prev / err)) if prev is not None and err > 0 else float("nan")
        rows.append({"nsteps": int(n), "dt": p.T / n, "error": err, "order": order})
        prev = err
    orders = [r["order"] for r in rows if np.isfinite(r["order"])]
    cols = ("nsteps", "dt", "error", "order")
    return cols, rows, {"order": float(np.mean(orders)) if orders else float("nan")}


def mollifier_delta(initial: SurfaceState, p: SimParams, deltas=(0.08, 0.04, 0.02),
                    workers: int = 1):
    """``sup_t E_Delta`` between the runs at ``delta`` and ``delta/2``.

    All runs share one fixed step (90% of the CFL step of the initial data
    unless ``p.dt`` is given) and the same checkpoint cadence, so the states
    are compared at identical times.
    """
    dt = float(p.dt) if p.dt != "auto" else 0.9 * cfl_dt(initial, p)
    needed = sorted(set(deltas) | {d / 2 for d in deltas}, reverse=True)

    def run(d):
        return evolve(initial, replace(p, delta=d, dt=dt), reports=False)

    trajs = dict(zip(needed, _map(run, needed, workers)))
    rows = []
    for d in deltas:
        a, b = trajs[d], trajs[d / 2]
        E = [sum(energy_delta(s1, s2, p.sigma, p.gravity)) for s1, s2 in zip(a.states, b.states)]
        rows.append({"delta": float(d), "sup_E_delta": float(max(E)),
                     "status": "ok" if a.status == b.status == "ok" else f"{a.status}/{b.status}"})
    sup = [r["sup_E_delta"] for r in rows]
    monotone = all(x > y for x, y in zip(sup, sup[1:]))
    return ("delta", "sup_E_delta", "status"), rows, {"monotone": monotone}


def scale_symmetry(initial: SurfaceState, p: SimParams, lam: int = 2):
    """Compare the evolution of scaled data with the scaled evolution.

    Requires ``gravity = 0``; both runs use the same time step.
    """
    if p.gravity != 0:
        raise ValueError("the scaling symmetry holds only with gravity = 0")
    dt = float(p.dt) if p.dt != "auto" else cfl_dt(scale_state(initial, lam)[0], p)
    q = replace(p, dt=dt)
    scaled0, smap = scale_state(initial, lam)
    q_scaled = replace(q, sigma=smap(p.sigma))
    base = evolve(initial, q, reports=False)
    other = evolve(scaled0, q_scaled, reports=False)
    rows = []
    for s1, s2 in zip(base.states, other.states):
        pred, _ = scale_state(s1, lam)
        num = max(np.max(np.abs(pred.g.values - s2.g.values)),
                  np.max(np.abs(pred.v.values - s2.v.values)))
        den = max(np.max(np.abs(pred.g.values)), np.max(np.abs(pred.v.values)), 1e-300)
        k1 = p.sigma ** (1 / 3) * derive(s1, p.sigma, 0).kappa.max_abs()
        k2 = q_scaled.sigma ** (1 / 3) * derive(s2, q_scaled.sigma, 0).kappa.max_abs()
        rows.append({"t": s1.t, "mismatch": float(num / den),
                     "sigma13_kappa": float(k1), "sigma13_kappa_scaled": float(k2),
                     "sigma13_kappa_rel_diff": float(abs(k1 - k2) / max(k1, 1e-300))})
    cols = ("t", "mismatch", "sigma13_kappa", "sigma13_kappa_scaled", "sigma13_kappa_rel_diff")
    return cols, rows, {
        "max_mismatch": max(r["mismatch"] for r in rows),
        "max_sigma13_kappa_rel_diff": max(r["sigma13_kappa_rel_diff"] for r in rows),
    }
