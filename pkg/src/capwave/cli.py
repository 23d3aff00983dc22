"""
Command-line front end.

    capwave gen       CONFIG [--section.key=value ...]
    capwave simulate  CONFIG [...]
    capwave validate  [CONFIG] [...]
    capwave study     {convergence,crest_scaling,mollifier_delta,scale_symmetry} CONFIG [...]

Exit codes: 0 ok, 2 configuration error, 3 blow-up abort, 4 numerical
failure (including a failed validation suite).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import Config, ConfigError, load_config
from .energy_diag import CSV_COLUMNS, energy_report
from .evolution import SimParams, evolve
from .fileio import fmt, read_checkpoint, write_checkpoint, write_csv
from .spectral_ops import Grid
from .surface_state import CrestSpec, StateError, SurfaceState, gen_crest, gen_wave, mollify_state
from . import studies, validate

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_NUMERIC = 0, 2, 3, 4
STUDIES = ("convergence", "crest_scaling", "mollifier_delta", "scale_symmetry")

log = logging.getLogger("capwave")


def sim_params(cfg: Config) -> SimParams:
    p = cfg.params
    return SimParams(
        sigma=p["sigma"], gravity=p["gravity"], delta=p["delta"], eps_visc=p["eps_visc"],
        dt=p["dt"], T=p["T"], dealias=p["dealias"], cfl=p["cfl"],
        output_every=p["output_every"], blowup_ceiling=p["blowup_ceiling"],
        N_extra=p["N_extra"],
    )


def initial_state(cfg: Config) -> SurfaceState:
    ini = cfg.initial_data
    grid = Grid(cfg.grid["N"], cfg.grid["L"])
    kind = ini["kind"]
    if kind == "flat":
        state = SurfaceState.flat(grid)
    elif kind == "wave":
        state = gen_wave(ini["A"], ini["k"], grid)
    elif kind == "crest":
        state = gen_crest(CrestSpec(ini["nu"], ini["eta"], ini["alpha0"]), grid)
    else:
        try:
            state, _ = read_checkpoint(ini["path"])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read checkpoint: {exc}") from None
    return mollify_state(state, ini["mollify_eps"])


def _outdir(cfg: Config) -> Path:
    d = Path(cfg.outputs["dir"])
    d.mkdir(parents=True, exist_ok=True)
    return d


def _print_report(report) -> None:
    for key, val in report.as_row().items():
        print(f"{key} = {fmt(val)}")


def cmd_gen(cfg: Config) -> int:
    state = initial_state(cfg)
    p = cfg.params
    path = _outdir(cfg) / "initial.ckpt"
    write_checkpoint(path, state, p["sigma"], p["gravity"])
    print(f"wrote {path}")
    _print_report(energy_report(state, p["sigma"], p["gravity"], p["N_extra"]))
    return EXIT_OK


def cmd_simulate(cfg: Config) -> int:
    state = initial_state(cfg)
    params = sim_params(cfg)
    out = _outdir(cfg)
    write_ckpt = cfg.outputs["checkpoints"]
    counter = [0]

    def sink(s, report):
        if write_ckpt:
            write_checkpoint(out / f"ckpt_{counter[0]:06d}.ckpt", s, params.sigma, params.gravity)
        counter[0] += 1

    traj = evolve(state, params, sink=sink, provenance=cfg.source)
    if cfg.outputs["energy_csv"]:
        write_csv(out / "energy.csv", CSV_COLUMNS, [r.as_row() for r in traj.reports])
    final = traj.final
    write_checkpoint(out / "final.ckpt", final, params.sigma, params.gravity)
    g0 = state.g.values
    dev = float(abs(final.g.values - g0).max() / max(abs(g0).max(), 1e-300))
    print(f"status = {traj.status}")
    print(f"t_final = {fmt(final.t)}")
    print(f"checkpoints = {len(traj.states)}")
    print(f"final_vs_initial_g_rel = {dev:.3e}")
    if traj.status == "blowup":
        print(traj.message, file=sys.stderr)
        return EXIT_BLOWUP
    if traj.status == "failed":
        print(traj.message, file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_validate(cfg: Config) -> int:
    results = validate.run_all(cfg.grid["N"], cfg.grid["L"])
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("ALL PASS" if ok else "VALIDATION FAILED")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_study(cfg: Config, which: str) -> int:
    st = cfg.study
    grid = Grid(cfg.grid["N"], cfg.grid["L"])
    params = sim_params(cfg)
    ini = cfg.initial_data
    if which == "crest_scaling":
        if ini["kind"] != "crest":
            raise ConfigError("crest_scaling needs initial_data.kind = crest")
        cols, rows, summary = studies.crest_scaling(ini["nu"], ini["eta"], st["eps"], grid,
                                                    ini["alpha0"], st["workers"])
    elif which == "convergence":
        cols, rows, summary = studies.convergence(initial_state(cfg), params, st["steps"],
                                                  st["ref_steps"], st["workers"])
    elif which == "mollifier_delta":
        cols, rows, summary = studies.mollifier_delta(initial_state(cfg), params, st["deltas"],
                                                      st["workers"])
    elif which == "scale_symmetry":
        cols, rows, summary = studies.scale_symmetry(initial_state(cfg), params, st["lam"])
    else:
        raise ConfigError(f"unknown study {which!r}")
    path = _outdir(cfg) / f"study_{which}.csv"
    write_csv(path, cols, rows)
    print(f"wrote {path}")
    for key, val in summary.items():
        print(f"{key} = {val}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capwave", description=__doc__.split("\n\n")[0].strip())
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("gen", "simulate"):
        sp = sub.add_parser(name)
        sp.add_argument("config")
    sp = sub.add_parser("validate")
    sp.add_argument("config", nargs="?")
    sp = sub.add_parser("study")
    sp.add_argument("study", choices=STUDIES)
    sp.add_argument("config")
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    overrides = [a for a in argv if a.startswith("--") and "." in a.split("=", 1)[0]]
    rest = [a for a in argv if a not in overrides]
    args = build_parser().parse_args(rest)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(getattr(args, "config", None), overrides)
        if args.command == "gen":
            return cmd_gen(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "validate":
            return cmd_validate(cfg)
        return cmd_study(cfg, args.study)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
