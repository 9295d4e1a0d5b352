"""Command-line front end: spectra, entanglement, thresholds, sweeps.

Subcommands: spectrum, gm, tth, gapped-tth, sweep, scan, wstate,
overlap-vline, verify.  All tabular output is CSV (header line, comma
separated, 17 significant digits, UNIX newlines); ``--svg`` additionally
renders matplotlib figures next to the CSV without altering it.  A flat
``key = value`` config file can seed any option; explicit flags win.

Exit codes: 0 success, 2 invalid parameters, 3 convergence failure,
4 I/O error.  The environment variable XYLAB_THREADS caps sweep
parallelism.
"""

import argparse
import concurrent.futures
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import exact_diag, free_fermion, plots, thermal
from .geometric_measure import GroundSupport, geometric_measure, gm_of_ground_state
from .errors import (
    CapacityError,
    ConvergenceError,
    ParameterError,
    RangeError,
    StateFileError,
    XYLabError,
)
from .free_fermion import ModelParams, Sector

__all__ = ["main", "SweepConfig", "SweepRecord", "compute_point"]

RECORD_COLUMNS = ("h", "eta", "n", "d0", "e0", "delta", "g_bits",
                  "p0_at_tth", "t_th", "converged", "vacuous_flag",
                  "restarts_used")


@dataclass(frozen=True)
class SweepConfig:
    """Grid and solver settings for a parameter sweep."""

    h_values: np.ndarray
    eta_values: np.ndarray
    n: int
    restarts: int = 16
    max_sweeps: int = 500
    tol: float = 1e-10
    seed: int = 0
    t_grid: tuple = ()
    out: str | None = None
    emit_svg: bool = False

    def __post_init__(self):
        for name, values in (("h", self.h_values), ("eta", self.eta_values)):
            if len(values) < 1:
                raise ParameterError(f"{name} range is empty")
        if np.min(self.h_values) < 0:
            raise ParameterError("h range extends below 0")
        if np.max(np.abs(self.eta_values)) > 1:
            raise ParameterError("eta range extends outside [-1, 1]")


@dataclass(frozen=True)
class SweepRecord:
    """One sweep grid point: spectral data, geometric measure, threshold."""

    h: float
    eta: float
    n: int
    d0: int
    e0: float
    delta: float
    g_bits: float
    p0_at_tth: float
    t_th: float
    converged: bool
    vacuous_flag: bool
    restarts_used: int

    def row(self):
        return tuple(getattr(self, name) for name in RECORD_COLUMNS)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(out, header, rows):
    text = ",".join(header) + "\n"
    text += "".join(",".join(_fmt(v) for v in row) + "\n" for row in rows)
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(args_out, lines):
    stream = sys.stdout if args_out else sys.stderr
    for line in lines:
        stream.write(line + "\n")


def compute_point(h, eta, n, *, restarts=16, max_sweeps=500, tol=1e-10,
                  seed=0, tol_deg=None, t_grid=()):
    """Full pipeline for one (h, eta, n) point.

    Returns (record, threshold_result, gm_result).  ``seed`` may be an int
    or a numpy SeedSequence; sweeps derive one SeedSequence per grid point
    so results do not depend on worker scheduling.
    """
    params = ModelParams(h=h, eta=eta, n=n)
    info = free_fermion.gap_info(params, tol_deg)
    gm = gm_of_ground_state(params, tol_deg=tol_deg, restarts=restarts,
                             max_sweeps=max_sweeps, tol=tol, seed=seed)
    model = thermal.PopulationModel.build(params, tol_deg=tol_deg)
    th = thermal.threshold_temperature(model, gm.g_bits)
    if t_grid:
        pops = [thermal.ground_population(model, t) for t in sorted(t_grid)]
        if any(b >= a for a, b in zip(pops, pops[1:])):
            raise ConvergenceError(
                f"ground population not strictly decreasing on T grid at "
                f"h={h}, eta={eta}, n={n}")
    if th.t_th > 0.0:
        p0_at = thermal.ground_population(model, th.t_th)
    else:
        p0_at = 1.0 / info.d0
    record = SweepRecord(
        h=float(h), eta=float(eta), n=int(n), d0=info.d0, e0=info.e0,
        delta=info.delta, g_bits=gm.g_bits, p0_at_tth=p0_at, t_th=th.t_th,
        converged=gm.converged, vacuous_flag=th.vacuous,
        restarts_used=gm.restarts_used)
    return record, th, gm


def _sweep_task(task):
    h, eta, n, seed, index, restarts, max_sweeps, tol, t_grid = task
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    record, _, _ = compute_point(h, eta, n, restarts=restarts,
                                 max_sweeps=max_sweeps, tol=tol, seed=seq,
                                 t_grid=t_grid)
    return record


def _worker_count(num_tasks: int) -> int:
    env = os.environ.get("XYLAB_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise ParameterError(f"XYLAB_THREADS must be an integer, got {env!r}")
        if cap < 1:
            raise ParameterError(f"XYLAB_THREADS must be >= 1, got {cap}")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, num_tasks))


def run_sweep(config: SweepConfig):
    """Evaluate the grid as a deterministic parallel map (ordered assembly)."""
    tasks = []
    index = 0
    for eta in config.eta_values:
        for h in config.h_values:
            tasks.append((float(h), float(eta), config.n, config.seed, index,
                          config.restarts, config.max_sweeps, config.tol,
                          tuple(config.t_grid)))
            index += 1
    workers = _worker_count(len(tasks))
    if workers == 1:
        return [_sweep_task(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_task, tasks, chunksize=1))


def _parse_range(text: str, what: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ParameterError(f"{what} must look like lo:hi:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParameterError(f"cannot parse {what} {text!r}") from None
    if steps < 2:
        raise ParameterError(f"{what} needs at least 2 steps, got {steps}")
    return np.linspace(lo, hi, steps)


def _parse_t_grid(text: str | None) -> tuple:
    if not text:
        return ()
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ParameterError(f"cannot parse T grid {text!r}") from None
    if any(t <= 0 for t in values):
        raise ParameterError("T grid entries must be > 0")
    return values


def _svg_path(out: str, suffix: str) -> str:
    stem, _ = os.path.splitext(out)
    return f"{stem}{suffix}.svg"


# ---------------------------------------------------------------- commands


def _require_out_for_svg(args):
    if getattr(args, "svg", False) and not args.out:
        raise ParameterError("--svg requires --out")


def cmd_spectrum(args) -> int:
    _require_out_for_svg(args)
    params = ModelParams(h=args.h, eta=args.eta, n=args.n)
    sectors = [Sector.PLUS, Sector.MINUS] if args.sector == "both" \
        else [Sector(args.sector)]
    rows = []
    spectra = {}
    for sector in sectors:
        spec = free_fermion.sector_spectrum(params, sector)
        spectra[sector] = spec
        for k in range(params.n):
            rows.append((sector.value, k + 1, spec.thetas[k], spec.phis[k],
                         spec.epsilons[k]))
    info = free_fermion.gap_info(params)
    _write_csv(args.out, ("sector", "k", "theta", "phi", "epsilon"), rows)
    lines = []
    for sector in (Sector.PLUS, Sector.MINUS):
        spec = spectra.get(sector) or free_fermion.sector_spectrum(params, sector)
        lines.append(f"E0_{sector.value} = {_fmt(spec.ground_energy)}")
    lines.append(f"E0 = {_fmt(info.e0)}")
    lines.append(f"d0 = {info.d0}")
    lines.append(f"delta = {_fmt(info.delta)}")
    _summary(args.out, lines)
    if args.svg:
        series = {s.value: spectra[s].epsilons for s in sectors}
        xs = spectra[sectors[0]].thetas
        plots.save_line(_svg_path(args.out, ""), xs, series,
                        "theta", "epsilon", title=f"h={args.h} eta={args.eta} n={args.n}")
    return 0


def cmd_gm(args) -> int:
    record, _, _ = compute_point(args.h, args.eta, args.n,
                                 restarts=args.restarts,
                                 max_sweeps=args.max_sweeps, tol=args.tol,
                                 seed=args.seed)
    header = ("h", "eta", "n", "d0", "e0", "delta", "g_bits", "converged",
              "restarts_used")
    row = (record.h, record.eta, record.n, record.d0, record.e0, record.delta,
           record.g_bits, record.converged, record.restarts_used)
    _write_csv(args.out, header, [row])
    return 0


def _threshold_rows(args, gapped: bool):
    record, th, gm = compute_point(args.h, args.eta, args.n,
                                   restarts=args.restarts,
                                   max_sweeps=args.max_sweeps, tol=args.tol,
                                   seed=args.seed)
    model = thermal.PopulationModel.build(
        ModelParams(h=args.h, eta=args.eta, n=args.n))
    if gapped:
        delta = args.delta if args.delta is not None else record.delta
        th = thermal.gapped_threshold(model, gm.g_bits, delta)
    if th.t_th > 0.0:
        p0_at = thermal.ground_population(model, th.t_th)
    else:
        p0_at = 1.0 / th.d0
    header = ("h", "eta", "n", "d0", "g_bits", "t_th", "p0_at_tth",
              "residual", "bracket_lo", "bracket_hi", "iterations", "kind",
              "vacuous_flag")
    row = (record.h, record.eta, record.n, th.d0, th.g_bits, th.t_th, p0_at,
           th.residual, th.bracket[0], th.bracket[1], th.iterations, th.kind,
           th.vacuous)
    _write_csv(args.out, header, [row])
    return 0


def cmd_tth(args) -> int:
    return _threshold_rows(args, gapped=False)


def cmd_gapped_tth(args) -> int:
    return _threshold_rows(args, gapped=True)


def cmd_sweep(args) -> int:
    _require_out_for_svg(args)
    config = SweepConfig(
        h_values=_parse_range(args.h_range, "--h-range"),
        eta_values=_parse_range(args.eta_range, "--eta-range"),
        n=args.n, restarts=args.restarts, max_sweeps=args.max_sweeps,
        tol=args.tol, seed=args.seed, t_grid=_parse_t_grid(args.t_grid),
        out=args.out, emit_svg=args.svg)
    records = run_sweep(config)
    _write_csv(config.out, RECORD_COLUMNS, [r.row() for r in records])
    if config.emit_svg:
        nh, ne = len(config.h_values), len(config.eta_values)
        g = np.array([r.g_bits for r in records]).reshape(ne, nh)
        t = np.array([r.t_th for r in records]).reshape(ne, nh)
        plots.save_heatmap(_svg_path(config.out, "_gm"), config.h_values,
                           config.eta_values, g, "h", "eta",
                           "geometric measure (bits)")
        plots.save_heatmap(_svg_path(config.out, "_tth"), config.h_values,
                           config.eta_values, t, "h", "eta",
                           "threshold temperature")
    return 0


def cmd_scan(args) -> int:
    _require_out_for_svg(args)
    if (args.h_range is None) == (args.eta_range is None):
        raise ParameterError("scan needs exactly one of --h-range / --eta-range")
    if args.h_range is not None:
        if args.eta is None:
            raise ParameterError("scan over h needs a fixed --eta")
        h_values = _parse_range(args.h_range, "--h-range")
        eta_values = np.array([args.eta])
        xs, xlabel = h_values, "h"
    else:
        if args.h is None:
            raise ParameterError("scan over eta needs a fixed --h")
        h_values = np.array([args.h])
        eta_values = _parse_range(args.eta_range, "--eta-range")
        xs, xlabel = eta_values, "eta"
    config = SweepConfig(h_values=h_values, eta_values=eta_values, n=args.n,
                         restarts=args.restarts, max_sweeps=args.max_sweeps,
                         tol=args.tol, seed=args.seed,
                         t_grid=_parse_t_grid(args.t_grid), out=args.out,
                         emit_svg=args.svg)
    records = run_sweep(config)
    _write_csv(config.out, RECORD_COLUMNS, [r.row() for r in records])
    if config.emit_svg:
        plots.save_line(_svg_path(config.out, "_gm"), xs,
                        {"g_bits": [r.g_bits for r in records]}, xlabel,
                        "geometric measure (bits)")
        plots.save_line(_svg_path(config.out, "_tth"), xs,
                        {"t_th": [r.t_th for r in records]}, xlabel,
                        "threshold temperature")
    return 0


def cmd_wstate(args) -> int:
    _require_out_for_svg(args)
    kappas = _parse_range(args.kappa_range, "--kappa-range")
    if np.min(kappas) <= 0:
        raise ParameterError("kappa range must be positive")
    rows = []
    for kappa in kappas:
        if args.m is None:
            tbar = thermal.wstate_gapped_threshold_tdl(float(kappa), args.delta)
        else:
            model = thermal.WStateModel(m=args.m, delta=args.delta,
                                        kappa=float(kappa))
            tbar = thermal.wstate_gapped_threshold(model)
        rows.append((float(kappa), tbar))
    _write_csv(args.out, ("kappa", "t_bar"), rows)
    limit = args.delta / np.log(np.e / (np.e - 1.0))
    _summary(args.out, [f"t_bar_limit = {_fmt(limit)}"])
    if args.svg:
        plots.save_line(_svg_path(args.out, ""), kappas,
                        {"t_bar": [r[1] for r in rows]}, "kappa",
                        "gapped threshold temperature", hline=limit)
    return 0


def cmd_overlap_vline(args) -> int:
    value = free_fermion.vline_overlap(args.eta, args.dh, args.n, args.sector)
    _write_csv(args.out, ("eta", "dh", "n", "sector", "overlap"),
               [(args.eta, args.dh, args.n, args.sector, value)])
    return 0


# ---------------------------------------------------------------- verify


def _verify_checks():
    """Yield (name, callable) pairs; each callable raises on failure."""

    def sector_energies():
        for n in (4, 6, 8):
            for h in (0.25, 0.9, 2.0):
                for eta in (0.0, 0.5, 1.0):
                    params = ModelParams(h=h, eta=eta, n=n)
                    spec = exact_diag.full_spectrum(params)
                    for sector, label in ((Sector.PLUS, 1), (Sector.MINUS, -1)):
                        got = free_fermion.sector_spectrum(params, sector).ground_energy
                        want = float(spec.eigenvalues[spec.parities == label][0])
                        rel = abs(got - want) / max(1.0, abs(want))
                        if rel > 1e-10:
                            raise AssertionError(
                                f"sector energy mismatch {rel:.2e} at "
                                f"(h={h}, eta={eta}, n={n}, {sector.value})")

    def partition_agreement():
        for h, eta in ((0.25, 0.5), (0.9, 0.0), (2.0, 1.0), (0.6, 0.8)):
            params = ModelParams(h=h, eta=eta, n=8)
            dense = thermal.PopulationModel.build(params, thermal.METHOD_DENSE)
            free = thermal.PopulationModel.build(params)
            for temperature in (0.1, 1.0):
                za = thermal.log_partition_function(dense, temperature)
                zb = thermal.log_partition_function(free, temperature)
                if abs(np.expm1(za - zb)) > 1e-10:
                    raise AssertionError(
                        f"Z mismatch at (h={h}, eta={eta}, T={temperature})")

    def gm_reference_states():
        ghz = np.zeros(16)
        ghz[0] = ghz[15] = 1.0 / np.sqrt(2.0)
        res = geometric_measure(GroundSupport(vectors=ghz),
                                       restarts=8, seed=11)
        if abs(res.lambda_sq - 0.5) > 1e-7:
            raise AssertionError(f"GHZ(4) overlap {res.lambda_sq} != 0.5")
        w3 = np.zeros(8)
        for j in range(3):
            w3[1 << j] = 1.0 / np.sqrt(3.0)
        res = geometric_measure(GroundSupport(vectors=w3),
                                       restarts=8, seed=11)
        if abs(res.lambda_sq - 4.0 / 9.0) > 1e-7:
            raise AssertionError(f"W(3) overlap {res.lambda_sq} != 4/9")
        if abs(res.g_bits - thermal.wstate_gm(3)) > 1e-6:
            raise AssertionError("W(3) measure disagrees with closed form")
        prod = exact_diag.product_state([(0.6, 0.8)] * 4)
        res = geometric_measure(GroundSupport(vectors=prod),
                                       restarts=4, seed=11)
        if res.g_bits > 1e-10:
            raise AssertionError("product state measured as entangled")

    def population_bounds():
        for h in (0.25, 0.9, 2.0):
            for eta in (0.0, 0.5, 1.0):
                model = thermal.PopulationModel.build(
                    ModelParams(h=h, eta=eta, n=100))
                for temperature in (0.5, 2.0):
                    mu = thermal.population_exponent(model, temperature)
                    lo, hi = thermal.population_exponent_bounds(
                        h, eta, temperature, n=100)
                    if not lo <= mu <= hi:
                        raise AssertionError(
                            f"mu={mu} outside [{lo}, {hi}] at "
                            f"(h={h}, eta={eta}, T={temperature})")

    def vline_decrease():
        vals = [free_fermion.vline_overlap(0.5, 0.1, n, Sector.PLUS)
                for n in (10, 100, 1000)]
        if not (vals[0] > vals[1] > vals[2]):
            raise AssertionError(f"overlap not decreasing: {vals}")
        if vals[2] >= 0.01:
            raise AssertionError(f"overlap at n=1000 too large: {vals[2]}")

    def state_roundtrip():
        params = ModelParams(h=0.5, eta=0.5, n=8)
        state = exact_diag.ground_space(params, k=1).eigenvectors[:, 0]
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "ground.xysv")
            exact_diag.save_state(path, state)
            back = exact_diag.load_state(path)
        if not np.array_equal(back, state.astype(np.complex128)):
            raise AssertionError("state dump roundtrip altered the vector")

    def threshold_residual():
        record, th, _ = compute_point(2.0, 0.5, 10, restarts=8, seed=3)
        if th.vacuous or th.residual > 1e-10 * 2.0 ** (-th.g_bits):
            raise AssertionError(f"threshold residual {th.residual} too large")
        if not record.t_th > 0:
            raise AssertionError("expected a positive threshold temperature")

    yield "sector-energies-vs-dense-ed", sector_energies
    yield "partition-function-agreement", partition_agreement
    yield "geometric-measure-reference-states", gm_reference_states
    yield "population-exponent-bounds", population_bounds
    yield "critical-overlap-decrease", vline_decrease
    yield "state-dump-roundtrip", state_roundtrip
    yield "threshold-self-consistency", threshold_residual


def cmd_verify(args) -> int:
    failures = 0
    for name, check in _verify_checks():
        try:
            check()
        except Exception as exc:  # report every failure, keep going
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok   {name}")
    if failures:
        print(f"{failures} check(s) failed")
        return 1
    print("all checks passed")
    return 0


# ---------------------------------------------------------------- parsing


def _add_model_args(parser, required=True):
    parser.add_argument("--h", type=float, required=required, default=None,
                        help="transverse field (>= 0)")
    parser.add_argument("--eta", type=float, required=required, default=None,
                        help="anisotropy in [-1, 1]")
    parser.add_argument("--n", type=int, required=True,
                        help="even chain length >= 4")


def _add_solver_args(parser):
    parser.add_argument("--seed", type=int, default=0, help="optimizer seed")
    parser.add_argument("--restarts", type=int, default=16,
                        help="random optimizer restarts")
    parser.add_argument("--max-sweeps", type=int, default=500,
                        help="sweep cap per restart")
    parser.add_argument("--tol", type=float, default=1e-10,
                        help="objective change declaring a restart converged")


def _add_out_args(parser, svg=True):
    parser.add_argument("--out", default=None, help="CSV output path (default stdout)")
    if svg:
        parser.add_argument("--svg", action="store_true",
                            help="also render figures next to --out")
    parser.add_argument("--config", default=None,
                        help="flat key = value config file; flags override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xylab",
        description="Numerical laboratory for the periodic spin-1/2 XY chain "
                    "in a transverse field.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="momentum grid, angles, energies",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_model_args(p)
    p.add_argument("--sector", choices=("plus", "minus", "both"), default="both")
    _add_out_args(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("gm", help="geometric measure of the ground support",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_model_args(p)
    _add_solver_args(p)
    _add_out_args(p, svg=False)
    p.set_defaults(func=cmd_gm)

    p = sub.add_parser("tth", help="threshold temperature",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_model_args(p)
    _add_solver_args(p)
    _add_out_args(p, svg=False)
    p.set_defaults(func=cmd_tth)

    p = sub.add_parser("gapped-tth", help="gap-aware threshold temperature",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_model_args(p)
    p.add_argument("--delta", type=float, default=None,
                   help="first gap to use (default: computed)")
    _add_solver_args(p)
    _add_out_args(p, svg=False)
    p.set_defaults(func=cmd_gapped_tth)

    p = sub.add_parser("sweep", help="(h, eta) grid sweep",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--h-range", required=True, help="lo:hi:steps")
    p.add_argument("--eta-range", required=True, help="lo:hi:steps")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t-grid", default=None,
                   help="comma-separated diagnostic temperatures")
    _add_solver_args(p)
    _add_out_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scan", help="line scan at fixed h or fixed eta",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_model_args(p, required=False)
    p.add_argument("--h-range", default=None, help="lo:hi:steps (fixed --eta)")
    p.add_argument("--eta-range", default=None, help="lo:hi:steps (fixed --h)")
    p.add_argument("--t-grid", default=None,
                   help="comma-separated diagnostic temperatures")
    _add_solver_args(p)
    _add_out_args(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("wstate", help="gapped threshold of the W-state model",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--m", type=int, default=None,
                   help="number of spins (default: many-spin limit)")
    p.add_argument("--kappa-range", required=True, help="lo:hi:steps")
    p.add_argument("--delta", type=float, default=1.0, help="level spacing")
    _add_out_args(p)
    p.set_defaults(func=cmd_wstate)

    p = sub.add_parser("overlap-vline",
                       help="ground-state overlap across the critical field",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--dh", type=float, required=True, help="field offset in (0, 1)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sector", choices=("plus", "minus"), default="plus")
    _add_out_args(p, svg=False)
    p.set_defaults(func=cmd_overlap_vline)

    p = sub.add_parser("verify", help="run the oracle cross-check suite",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.set_defaults(func=cmd_verify)

    return parser


def _load_config(path) -> list:
    pairs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ParameterError(f"{path}:{lineno}: empty key")
            pairs.append((key, value))
    return pairs


def _inject_config(argv: list) -> list:
    """Splice config-file pairs in as flags right after the subcommand, so
    that explicit command-line flags (parsed later) override them."""
    path = None
    cleaned = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token == "--config":
            if i + 1 >= len(argv):
                raise ParameterError("--config needs a path")
            path = argv[i + 1]
            skip = True
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
        else:
            cleaned.append(token)
    if path is None:
        return argv
    if not cleaned or cleaned[0].startswith("-"):
        raise ParameterError("--config requires a subcommand")
    injected = []
    for key, value in _load_config(path):
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                injected.append(flag)
        else:
            injected.extend([flag, value])
    return [cleaned[0], *injected, *cleaned[1:]]


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        argv = _inject_config(argv)
        args = build_parser().parse_args(argv)
        return int(args.func(args) or 0)
    except (ParameterError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, RangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except XYLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
