"""
Checkpoint and CSV formats.

Checkpoint (text, versioned)::

    CAPWAVE1 N=<int> L=<%.17g> t=<%.17g> sigma=<%.17g> gravity=<0|1>
    g_0 v_0
    ...
    g_{N-1} v_{N-1}

All floats are written with 17 significant digits, which round-trips IEEE
doubles exactly.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectral_ops import Grid
from .surface_state import SurfaceState

MAGIC = "CAPWAVE1"
_HEADER = re.compile(
    r"CAPWAVE1 N=(\d+) L=(\S+) t=(\S+) sigma=(\S+) gravity=([01])\s*$"
)


@dataclass(frozen=True)
class CheckpointMeta:
    sigma: float
    gravity: int


def fmt(x: float) -> str:
    return "%.17g" % x


def write_checkpoint(path, state: SurfaceState, sigma: float, gravity: int) -> None:
    grid = state.grid
    lines = [f"{MAGIC} N={grid.N} L={fmt(grid.L)} t={fmt(state.t)} "
             f"sigma={fmt(sigma)} gravity={int(gravity)}"]
    lines += [f"{fmt(g)} {fmt(v)}" for g, v in zip(state.g.values, state.v.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_checkpoint(path):
    """Return ``(state, meta)``; raises ``ValueError`` on malformed files."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise ValueError(f"{path}: empty checkpoint")
    m = _HEADER.match(text[0])
    if not m:
        raise ValueError(f"{path}: bad checkpoint header {text[0]!r}")
    N = int(m.group(1))
    L, t, sigma = (float(m.group(i)) for i in (2, 3, 4))
    gravity = int(m.group(5))
    rows = [ln.split() for ln in text[1:] if ln.strip()]
    if len(rows) != N or any(len(r) != 2 for r in rows):
        raise ValueError(f"{path}: expected {N} lines of 'g v'")
    data = np.array([[float(a), float(b)] for a, b in rows])
    state = SurfaceState.from_arrays(Grid(N, L), data[:, 0], data[:, 1], t)
    return state, CheckpointMeta(sigma, gravity)


def write_csv(path, columns, rows) -> None:
    """Write dict rows with a fixed header; floats as %.17g."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row[c]) if isinstance(row[c], (float, np.floating)) else row[c]
                        for c in columns])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
