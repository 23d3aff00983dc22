"""Pseudo-spectral capillary-gravity water waves in conformal (g, v) variables."""

from .spectral_ops import (Field, Grid, dealias, derivative, fractional_deriv, hilbert, make_grid,
                           mollify, poisson_smooth, project_antiholo, project_holo)
from .brackets import commutator_hilbert, commutator_hilbert_deriv, triple_bracket_dg
from .surface_state import (ConformalState, CrestSpec, DerivedFields, SurfaceState, curvature,
                            derive, from_conformal, gen_crest, gen_wave, mollify_state,
                            scale_state, to_conformal)
from .evolution import SimParams, Trajectory, cfl_dt, evolve, lagrangian_map, rhs, rhs_mollified, step_rk4
from .energy_diag import (EnergyReport, blowup_quantity, energy_calE_sigma, energy_delta,
                          energy_E_sigma, energy_report, energy_solver, sobolev_norm,
                          taylor_sign, wc_norms)

__version__ = "0.1.0"
