"""
Commutators with the Hilbert transform and the triple bracket.

Runtime brackets are computed purely with Fourier multipliers and dealiased
pointwise products.  The ``quadrature_oracle_*`` functions evaluate the same
objects directly from their periodic integral kernels and exist for testing
and for the ``validate`` command; they cost O(N^2).

Periodic kernels on a torus of length L:

* ``1/(a - b)``   ->  ``(pi/L) cot(pi (a - b) / L)``
* ``1/(a - b)^2`` ->  ``(pi/L)^2 csc^2(pi (a - b) / L)``

Singular and near-singular integrals use the alternating-point trapezoid
rule: at target node ``i`` only source nodes with ``i - j`` odd are used,
each with weight ``2 dx``.  For the odd Hilbert kernel this is the standard
spectrally accurate principal-value rule.
"""

from __future__ import annotations

import numpy as np

from .spectral_ops import DEFAULT_DEALIAS, Field, Grid


def _same_grid(*fields: Field) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError("fields live on different grids")
    return grid


# -- array level ---------------------------------------------------------------

def comm_h(grid: Grid, f, u, fraction: float = DEFAULT_DEALIAS) -> np.ndarray:
    """``[f, H] u = f H u - H(f u)`` on raw arrays, products dealiased."""
    return grid.dealias(f * grid.hilbert(u), fraction) - grid.hilbert(grid.dealias(f * u, fraction))


def comm_h_deriv(grid: Grid, f, u, fraction: float = DEFAULT_DEALIAS) -> np.ndarray:
    """``[f, H] d u`` on raw arrays."""
    return comm_h(grid, f, grid.deriv(u), fraction)


def triple_dg(grid: Grid, h, f, g, fraction: float = DEFAULT_DEALIAS) -> np.ndarray:
    """``[h, f; d g]`` on raw arrays via the multiplier rearrangement."""
    D = lambda x: grid.dealias(x, fraction)
    dg = grid.deriv(g)
    t1 = comm_h(grid, D(h * grid.deriv(f)), dg, fraction)
    t2 = comm_h(grid, f, grid.deriv(D(h * dg)), fraction)
    t3 = D(h * grid.deriv(comm_h(grid, f, dg, fraction)))
    return t1 + t2 - t3


# -- Field level ---------------------------------------------------------------

def commutator_hilbert(f: Field, g: Field, fraction: float = DEFAULT_DEALIAS) -> Field:
    """``[f, H] g``."""
    grid = _same_grid(f, g)
    return Field(grid, comm_h(grid, f.values, g.values, fraction))


def commutator_hilbert_deriv(f: Field, g: Field, fraction: float = DEFAULT_DEALIAS) -> Field:
    """``[f, H] dg``."""
    grid = _same_grid(f, g)
    return Field(grid, comm_h_deriv(grid, f.values, g.values, fraction))


def triple_bracket_dg(h: Field, f: Field, g: Field, fraction: float = DEFAULT_DEALIAS) -> Field:
    """Triple bracket ``[h, f; dg]``.

    Uses ``[h, f; dg] = [h df, H] dg + [f, H] d(h dg) - h d([f, H] dg)``.
    Inputs should be band-limited well below the dealias cutoff so that the
    triple products are resolved.
    """
    grid = _same_grid(h, f, g)
    return Field(grid, triple_dg(grid, h.values, f.values, g.values, fraction))


# -- quadrature oracles --------------------------------------------------------

def _offsets(grid: Grid):
    n = np.arange(grid.N)
    diff = n[:, None] - n[None, :]
    odd = (diff % 2) != 0
    x = np.pi * diff * grid.dx / grid.L
    return diff, odd, x


def _cot_kernel(grid: Grid) -> np.ndarray:
    """Alternating-point weights for ``(1/(i pi)) int (pi/L) cot(pi(a-b)/L) . db``."""
    _, odd, x = _offsets(grid)
    K = np.zeros((grid.N, grid.N))
    K[odd] = (np.pi / grid.L) / np.tan(x[odd])
    return K * (2 * grid.dx) / (1j * np.pi)


def _csc2_kernel(grid: Grid) -> np.ndarray:
    _, odd, x = _offsets(grid)
    K = np.zeros((grid.N, grid.N))
    K[odd] = (np.pi / grid.L) ** 2 / np.sin(x[odd]) ** 2
    return K * (2 * grid.dx) / (1j * np.pi)


def quadrature_oracle_hilbert(f: Field) -> Field:
    """Hilbert transform evaluated as a principal-value cot-kernel integral."""
    return Field(f.grid, _cot_kernel(f.grid) @ f.values)


def quadrature_oracle_commutator(f: Field, q: Field) -> Field:
    """``(1/(i pi)) int cot-kernel (f(a) - f(b)) q(b) db``, i.e. ``[f, H] q``."""
    grid = _same_grid(f, q)
    K = _cot_kernel(grid)
    diff = f.values[:, None] - f.values[None, :]
    return Field(grid, np.sum(K * diff * q.values[None, :], axis=1))


def quadrature_oracle_triple(h: Field, f: Field, q: Field) -> Field:
    """Triple bracket ``[h, f; q]`` evaluated directly from the csc^2 kernel."""
    grid = _same_grid(h, f, q)
    K = _csc2_kernel(grid)
    dh = h.values[:, None] - h.values[None, :]
    df = f.values[:, None] - f.values[None, :]
    return Field(grid, np.sum(K * dh * df * q.values[None, :], axis=1))
