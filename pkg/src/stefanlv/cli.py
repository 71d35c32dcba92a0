"""Command line front end: simulate, semiwave, sweep, verify, presets.

Exit codes: 0 ok, 1 verification failure, 2 solver error,
3 Indeterminate label under ``--strict``, 64 usage or configuration error.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import analysis, outputs, svg
from .config import PARAM_KEYS, PRESETS, RunSpec, echo, parse_config, preset_spec, with_params
from .errors import (InsufficientData, NoBracket, Nonconvergence, NotApplicable, SolverError,
                     StefanLVError)
from .fbsolver import run, solve_single_species
from .params import SingleSpeciesSpec
from .semiwave import SemiWaveParams, semiwave_speed, solve_semiwave

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_SOLVER = 2
EXIT_INDETERMINATE = 3
EXIT_USAGE = 64
MAX_CELLS = 10_000

log = logging.getLogger("stefanlv")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Simulation:
    """Everything computed by one simulate call (files are written separately)."""

    spec: RunSpec
    traj: object = None
    summary: dict = None
    error: SolverError | None = None

    @property
    def labels(self):
        if self.summary is None or "outcome" not in self.summary:
            return ()
        return tuple(v["label"] for v in self.summary["outcome"].values())


def _invariants(traj):
    return {
        "max_clip": traj.max_clip,
        "min_front_increment": list(traj.min_front_increment[: traj.n_species]),
        "watchdog_time": traj.watchdog_time,
    }


def _coupled_summary(spec, init, traj):
    params = spec.params
    thr = analysis.thresholds(params)
    outcome = analysis.classify(traj, thr)
    checks = analysis.dichotomy_consistency(outcome, thr, traj)
    summary = {
        "thresholds": thr.as_dict(),
        "outcome": outcome.as_dict(),
        "consistency": [c.as_dict() for c in checks],
    }
    try:
        summary["speed_lower_bound"] = analysis.speed_lower_bound_check(traj, params, outcome)
    except (NotApplicable, InsufficientData) as exc:
        summary["speed_lower_bound"] = {"status": analysis.NA, "reason": str(exc)}
    if init.s2_0 > init.s1_0:
        summary["certificate"] = analysis.thm6_certificate(params, init).as_dict()
    else:
        summary["certificate"] = None
    return summary


def _single_summary(spec, traj):
    p = spec.params
    thr = analysis.single_species_thresholds(p.d1, p.r1, 1.0)
    outcome = analysis.classify(traj, thr)
    summary = {"thresholds": {"star": thr.s1_star}, "outcome": outcome.as_dict()}
    c = semiwave_speed(p.mu1, p.r1, p.r1, p.d1)
    entry = {"c": c, "slope": None, "ratio": None}
    try:
        fit = analysis.fit_front_speed(traj, 1, 0.3)
        entry.update(slope=fit.slope, ratio=fit.slope / c, drift=fit.drift)
    except InsufficientData as exc:
        entry["reason"] = str(exc)
    summary["semiwave"] = entry
    return summary


def simulate(spec: RunSpec) -> Simulation:
    """Run the configured model and build the outcome summary."""
    sim = Simulation(spec)
    try:
        if spec.model == "single":
            init = spec.init.build()
            p = spec.params
            single = SingleSpeciesSpec(p.d1, p.r1, 1.0, p.mu1, init.u0)
            sim.traj = solve_single_species(single, spec.grid)
            sim.summary = _single_summary(spec, sim.traj)
        else:
            init = spec.init.build()
            sim.traj = run(spec.params, init, spec.grid)
            sim.summary = _coupled_summary(spec, init, sim.traj)
        sim.summary["invariants"] = _invariants(sim.traj)
    except SolverError as exc:
        sim.error = exc
        sim.traj = exc.trajectory
        sim.summary = {"error": {"type": type(exc).__name__, "message": str(exc), "t": exc.t}}
    return sim


def _write_plots(traj, out):
    series = [("s1", traj.t, traj.s1)]
    if traj.n_species == 2:
        series.append(("s2", traj.t, traj.s2))
    (out / "fronts.svg").write_text(svg.line_plot(series, "Free boundaries", "t", "front"))
    t, s1, u, s2, v = traj.profiles[-1]
    xi = traj.xi
    prof = [("u", xi * s1, u)]
    if v is not None:
        prof.append(("v", xi * s2, v))
    (out / "profiles.svg").write_text(
        svg.line_plot(prof, f"Profiles at t = {t:g}", "x", "density"))


def _prepare_out(spec):
    out = Path(spec.outputs.dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"output directory {out} is not writable: {exc}") from None
    if not os.access(out, os.W_OK):
        raise UsageError(f"output directory {out} is not writable")
    return out


def cmd_simulate(spec: RunSpec, strict=False) -> int:
    out = _prepare_out(spec)
    if spec.model == "persistence":
        return _cmd_persistence(spec, out)
    sim = simulate(spec)
    doc = {"config": echo(spec), "status": "ok" if sim.error is None else "solver-error"}
    doc.update(sim.summary)
    if sim.traj is not None:
        outputs.write_trajectory_csv(sim.traj, out / "trajectory.csv")
        outputs.write_profiles_csv(sim.traj, out / "profiles.csv")
        if spec.outputs.svg:
            _write_plots(sim.traj, out)
    outputs.write_json(doc, out / "outcome.json")
    if sim.error is not None:
        print(f"solver error: {sim.error}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"labels: {', '.join(sim.labels)}  (outputs in {out})")
    if strict and analysis.INDETERMINATE in sim.labels:
        print("strict: at least one species is Indeterminate", file=sys.stderr)
        return EXIT_INDETERMINATE
    return EXIT_OK


def _cmd_persistence(spec, out):
    p, g = spec.params, spec.grid
    res = analysis.persistence_scenario(
        d=p.d1, r=p.r1, a=1.0, eps=spec.persistence.eps, n_xi=g.n_xi, t_end=g.t_end,
        amplitude=spec.persistence.amplitude)
    x = np.linspace(0.0, res.length, res.profile.size)
    outputs.write_rows_csv(("x", "w"), zip(x, res.profile), out / "profile.csv")
    doc = {"config": echo(spec), "status": "ok", "length": res.length, "L": res.L,
           "eps": res.eps, "a": res.a, "min_on_window": res.min_on_window, "passed": res.passed}
    outputs.write_json(doc, out / "outcome.json")
    if spec.outputs.svg:
        (out / "profiles.svg").write_text(svg.line_plot([("w", x, res.profile)],
                                                        f"Fixed interval, t = {g.t_end:g}", "x", "w"))
    print(f"min on [0, L] = {res.min_on_window:.6g} (target {res.a - res.eps:g})")
    return EXIT_OK


def cmd_semiwave(mu, a, b, d, tol=1e-8, out=None) -> int:
    sw = solve_semiwave(SemiWaveParams(mu, a, b, d), tol=tol)
    print(f"c = {sw.c:.15g}")
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        stride = max(1, -(-sw.y_grid.size // 10_000))
        idx = np.r_[np.arange(0, sw.y_grid.size, stride), sw.y_grid.size - 1]
        idx = np.unique(idx)
        outputs.write_rows_csv(("y", "q"), zip(sw.y_grid[idx], sw.q[idx]), out / "semiwave.csv")
        outputs.write_json({"mu": mu, "a": a, "b": b, "d": d, "tol": tol, "c": sw.c,
                            "bracket": list(sw.bracket), "iterations": sw.iterations,
                            "residual": sw.residual}, out / "semiwave.json")
    return EXIT_OK


def parse_axis(text):
    """``name=v1,v2,...`` -> ``(name, [v1, v2, ...])``."""
    name, sep, values = text.partition("=")
    name = name.strip()
    if not sep or name not in PARAM_KEYS:
        raise UsageError(f"axis must look like NAME=v1,v2 with NAME in {', '.join(PARAM_KEYS)}")
    try:
        vals = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"axis {name}: values must be numbers") from None
    if not vals:
        raise UsageError(f"axis {name} has no values")
    return name, vals


def sweep_cells(axes):
    names = [a[0] for a in axes]
    return [dict(zip(names, combo)) for combo in itertools.product(*(a[1] for a in axes))]


def run_cell(spec: RunSpec, cell: dict) -> dict:
    """One sweep cell; failures are returned in the row, never raised."""
    row = dict(cell)
    try:
        sim = simulate(with_params(spec, **cell))
    except (StefanLVError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    if sim.error is not None:
        row["error"] = f"{type(sim.error).__name__}: {sim.error}"
        return row
    for name, sp in sim.summary["outcome"].items():
        row[f"label_{name}"] = sp["label"]
        row[f"slope_{name}"] = sp["slope"]
        row[f"front_{name}"] = sp["final_front"]
    row["error"] = ""
    return row


def _run_cell_star(args):
    return run_cell(*args)


def cmd_sweep(spec: RunSpec, axes, jobs=None) -> int:
    if spec.model != "coupled":
        raise UsageError("sweeps run the coupled model only")
    if not 1 <= len(axes) <= 2:
        raise UsageError("give one or two --axis options")
    cells = sweep_cells(axes)
    if len(cells) > MAX_CELLS:
        raise UsageError(f"{len(cells)} cells exceed the limit of {MAX_CELLS}")
    out = _prepare_out(spec)
    jobs = jobs or os.cpu_count() or 1
    tasks = [(spec, c) for c in cells]
    if jobs == 1 or len(cells) == 1:
        rows = [_run_cell_star(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cells))) as pool:
            # map preserves input order, so rows follow the axes
            rows = list(pool.map(_run_cell_star, tasks))

    names = [a[0] for a in axes]
    header = names + ["label_species1", "label_species2", "slope_species1", "slope_species2",
                      "front_species1", "front_species2", "error"]
    outputs.write_rows_csv(header, ([r.get(h) for h in header] for r in rows), out / "sweep.csv")
    if spec.outputs.svg:
        xs = axes[0][1]
        ys = axes[1][1] if len(axes) == 2 else [0.0]
        grid = [[None] * len(xs) for _ in ys]
        for r in rows:
            j = xs.index(r[names[0]])
            i = ys.index(r[names[1]]) if len(axes) == 2 else 0
            grid[i][j] = ("Error",) if r["error"] else (r["label_species1"], r["label_species2"])
        (out / "sweep.svg").write_text(svg.label_map(
            xs, ys, grid, "Labels (left: species 1, right: species 2)", names[0],
            names[1] if len(axes) == 2 else ""))
    n_err = sum(1 for r in rows if r["error"])
    print(f"{len(rows)} cells, {n_err} errors (outputs in {out})")
    return EXIT_OK


def cmd_verify(suite: str) -> int:
    from .verify import SUITES, run_suite

    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    results = run_suite(suite)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"\n{r.name} details:")
        print(outputs.dumps(r.details))
    return EXIT_OK if not failed else EXIT_VERIFY


def cmd_presets(name=None) -> int:
    if name is None:
        width = max(map(len, PRESETS))
        for key, val in PRESETS.items():
            print(f"{key:<{width}}  {val['description']}")
        return EXIT_OK
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}")
    print(outputs.dumps(echo(preset_spec(name))))
    return EXIT_OK


def _load_spec(args) -> RunSpec:
    if args.config and args.preset:
        raise UsageError("--config and --preset are mutually exclusive")
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc}") from None
        spec = parse_config(text)
    elif args.preset:
        spec = preset_spec(args.preset)
    else:
        raise UsageError("give --config PATH or --preset NAME")
    if args.out:
        spec = replace(spec, outputs=replace(spec.outputs, dir=args.out))
    if getattr(args, "t_end", None) is not None:
        spec = replace(spec, grid=replace(spec.grid, t_end=args.t_end))
    return spec


def build_parser():
    parser = Parser(prog="stefanlv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress messages")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--preset", help="named preset (see `presets`)")
        p.add_argument("--out", help="output directory (overrides outputs.dir)")
        p.add_argument("--t-end", type=float, dest="t_end", help="override grid.t_end")

    p = sub.add_parser("simulate", help="run one configuration and classify it")
    source(p)
    p.add_argument("--strict", action="store_true", help="exit 3 on an Indeterminate label")

    p = sub.add_parser("semiwave", help="semi-wave speed and profile")
    for name, default in (("mu", None), ("a", 1.0), ("b", 1.0), ("d", 1.0)):
        p.add_argument(f"--{name}", type=float, default=default, required=default is None)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", help="write semiwave.csv and semiwave.json here")

    p = sub.add_parser("sweep", help="phase diagram over one or two parameters")
    source(p)
    p.add_argument("--axis", action="append", default=[], metavar="NAME=v1,v2,...")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("suite", nargs="?", default="all",
                   choices=("semiwave", "dichotomy", "coexistence", "thm5", "thm6",
                            "convergence", "formulas", "all"))

    p = sub.add_parser("presets", help="list presets or print one as JSON")
    p.add_argument("name", nargs="?")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "simulate":
            return cmd_simulate(_load_spec(args), strict=args.strict)
        if args.command == "semiwave":
            return cmd_semiwave(args.mu, args.a, args.b, args.d, args.tol, args.out)
        if args.command == "sweep":
            spec = _load_spec(args)
            return cmd_sweep(spec, [parse_axis(a) for a in args.axis], args.jobs)
        if args.command == "verify":
            return cmd_verify(args.suite)
        return cmd_presets(args.name)
    except UsageError as exc:
        print(f"stefanlv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, NoBracket, Nonconvergence) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (StefanLVError, ValueError, KeyError) as exc:
        print(f"stefanlv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
