"""Command-line front-end: solve, render, bench and calibrate.

Length units on flags: spot coordinates and windows are micrometres,
focal length and beam waist are millimetres, wavelength is nanometres,
pixel pitch is micrometres. Everything is converted to metres
internally. Every command that takes ``--seed`` is bitwise reproducible
across runs and worker counts (wall-time fields excepted).
"""

from __future__ import annotations

import argparse
import math
import os
import sys


def _pupil_arguments(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("pupil")
    g.add_argument("--side", type=int, default=1152,
                   help="pixels per side of the square SLM grid (default 1152)")
    g.add_argument("--pitch-um", type=float, default=9.2,
                   help="pixel pitch, micrometres (default 9.2)")
    g.add_argument("--wavelength-nm", type=float, default=800.0,
                   help="wavelength, nanometres (default 800)")
    g.add_argument("--f-mm", type=float, default=20.0,
                   help="effective focal length, millimetres (default 20)")
    g.add_argument("--illum", choices=("uniform", "gaussian"), default="gaussian",
                   help="illumination profile (default gaussian)")
    g.add_argument("--waist-mm", type=float, default=6.0,
                   help="gaussian beam waist radius, millimetres (default 6)")
    g.add_argument("--pupil-seed", type=int, default=0,
                   help="seed of the pupil pixel shuffle (default 0)")


def _common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--chunk", type=int, default=1024,
                        help="reduction chunk size (default 1024)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker count; never changes results (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holospots",
        description="Multi-spot hologram synthesis for phase-only SLMs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a hologram and report its quality")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", choices=("grid100", "grid36", "cubes"),
                     help="stock spot pattern")
    src.add_argument("--scenario-file", help="key = value scenario definition")
    src.add_argument("--spots",
                     help="spot list file: x_um y_um z_um relative_intensity")
    p.add_argument("--rotate-deg", type=float, default=0.0,
                   help="rotate a scenario by this angle (degrees, default 0)")
    p.add_argument("--alg", choices=("rs", "wgs", "cswgs"), default="wgs")
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--c", type=float, default=0.0625,
                   help="compressed pixel fraction for cswgs (default 1/16)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fov-um", type=float, default=400.0,
                   help="field-of-view bound for scenarios, micrometres")
    p.add_argument("--out", default="hologram.pgm",
                   help="output PGM path (default hologram.pgm)")
    p.add_argument("--raw-out", help="optional raw float64 phase dump")
    p.add_argument("--lut", help="custom 256-line phase LUT for the PGM")
    _pupil_arguments(p)
    _common_arguments(p)

    p = sub.add_parser("render", help="render the far-field intensity of a hologram")
    p.add_argument("--hologram", required=True,
                   help="hologram file: PGM or raw phase dump")
    p.add_argument("--window-um", type=float, default=400.0,
                   help="rendered window width, micrometres (default 400)")
    p.add_argument("--z-um", type=float, default=0.0,
                   help="probed plane depth, micrometres (default 0)")
    p.add_argument("--res", type=int, default=256,
                   help="rendered pixels per side (default 256)")
    p.add_argument("--exposure", choices=("linear", "two-photon"),
                   default="linear")
    p.add_argument("--lut", help="custom phase LUT used when reading a PGM")
    p.add_argument("--out", default="field.pgm")
    p.add_argument("--raw-out", help="optional raw float32 intensity dump")
    _pupil_arguments(p)
    _common_arguments(p)

    p = sub.add_parser("bench", help="budgeted comparisons and compression sweeps")
    p.add_argument("--scenario", action="append", dest="scenarios",
                   choices=("grid100", "grid36", "cubes"),
                   help="repeatable; default: all three")
    p.add_argument("--alg", action="append", dest="algorithms",
                   choices=("rs", "wgs", "cswgs"),
                   help="repeatable; default: all three (sweep mode)")
    p.add_argument("--c-sweep", default="0.5,0.25,0.125,0.0625,0.03125,"
                                         "0.015625,0.0078125,0.00390625",
                   help="comma list of compression ratios")
    p.add_argument("--budget-ops", default="auto64ms",
                   help="operation budget: an integer, or autoNNms to translate "
                        "NN milliseconds via calibration (default auto64ms)")
    p.add_argument("--seeds", type=int, default=10,
                   help="number of seeds (0..n-1); each seed uses its own "
                        "rotation frame (default 10)")
    p.add_argument("--mode", choices=("compare", "sweep"), default="compare",
                   help="compare: RS/WGS/best-c summary; sweep: full factorial")
    p.add_argument("--out", default="-",
                   help="per-run CSV path, '-' for stdout (default)")
    p.add_argument("--summary-out", help="optional across-seed statistics CSV")
    _pupil_arguments(p)
    _common_arguments(p)

    p = sub.add_parser("calibrate",
                       help="measure this machine's cost-model units per ms")
    p.add_argument("--side", type=int, default=256)
    p.add_argument("--spots-n", type=int, default=36)
    p.add_argument("--iters", type=int, default=6)
    _common_arguments(p)
    return parser


def _fmt(x: float) -> str:
    return format(x, ".9g")


def _build_pupil(args):
    from .optics import build_pupil

    return build_pupil(
        side_px=args.side,
        pitch=args.pitch_um * 1e-6,
        wavelength=args.wavelength_nm * 1e-9,
        focal_length=args.f_mm * 1e-3,
        illumination=args.illum,
        waist=args.waist_mm * 1e-3,
        seed=args.pupil_seed,
    )


def _load_spots(args):
    from .optics import load_spot_list
    from .scenarios import load_scenario_file, named_scenario

    angle = math.radians(args.rotate_deg)
    if args.spots:
        return load_spot_list(args.spots)
    if args.scenario_file:
        scenario = load_scenario_file(args.scenario_file)
    else:
        scenario = named_scenario(args.scenario,
                                  field_of_view=args.fov_um * 1e-6)
    return scenario.spot_set(angle=angle)


def _cmd_solve(args) -> int:
    from . import fileio, metrics, solvers

    pupil = _build_pupil(args)
    spots = _load_spots(args)
    config = solvers.SolverConfig(algorithm=args.alg, iterations=args.iters,
                                  compression=args.c, seed=args.seed)
    hologram, trace = solvers.solve(pupil, spots, config, chunk=args.chunk,
                                    workers=args.threads)
    report = metrics.quality_report(pupil, hologram, spots, chunk=args.chunk,
                                    workers=args.threads)
    lut = fileio.PhaseLut.from_file(args.lut) if args.lut else None
    fileio.write_hologram_pgm(args.out, hologram, lut=lut)
    if args.raw_out:
        fileio.write_phase_raw(args.raw_out, hologram)
    iters = args.iters if args.alg != "rs" else 1
    print(f"e={_fmt(report.efficiency)} u={_fmt(report.uniformity)} "
          f"ops={trace.operation_count} iters={iters} "
          f"wall_ms={trace.wall_time_s * 1e3:.3f}")
    return 0


def _load_hologram(path, pupil, lut):
    from . import fileio

    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == fileio.MAGIC_PHASE:
        return fileio.load_hologram_raw(path, pupil)
    return fileio.load_hologram_pgm(path, pupil, lut=lut)


def _cmd_render(args) -> int:
    import time

    from . import fileio, simulate

    pupil = _build_pupil(args)
    lut = fileio.PhaseLut.from_file(args.lut) if args.lut else None
    hologram = _load_hologram(args.hologram, pupil, lut)
    exposure = args.exposure.replace("-", "_")
    t0 = time.perf_counter()
    image = simulate.render_plane(pupil, hologram, window=args.window_um * 1e-6,
                                  z=args.z_um * 1e-6, resolution=args.res,
                                  exposure=exposure, chunk=args.chunk,
                                  workers=args.threads)
    wall_ms = (time.perf_counter() - t0) * 1e3
    fileio.write_field_pgm(args.out, image)
    if args.raw_out:
        fileio.write_field_raw(args.raw_out, image)
    peak = float(image.intensity.max())
    print(f"peak={_fmt(peak)} z_um={_fmt(args.z_um)} res={args.res} "
          f"wall_ms={wall_ms:.3f}")
    return 0


def _parse_budget(value: str, args) -> int:
    from .bench import calibrate_ops_per_ms

    if value.startswith("auto") and value.endswith("ms"):
        ms = float(value[4:-2])
        ops_per_ms = calibrate_ops_per_ms(side_px=min(args.side, 512),
                                          chunk=args.chunk, workers=args.threads)
        budget = max(1, int(ops_per_ms * ms))
        print(f"# calibrated {_fmt(ops_per_ms)} ops/ms -> budget {budget} ops "
              f"for {_fmt(ms)} ms", file=sys.stderr)
        return budget
    return int(value)


def _cmd_bench(args) -> int:
    from . import bench
    from .scenarios import named_scenario

    if args.seeds < 1:
        raise SystemExit2("bench needs at least one seed")
    pupil = _build_pupil(args)
    names = args.scenarios or ["grid100", "grid36", "cubes"]
    scenarios = [named_scenario(n) for n in names]
    c_values = [float(v) for v in args.c_sweep.split(",") if v]
    if not c_values:
        raise SystemExit2("empty c sweep")
    budget = _parse_budget(args.budget_ops, args)
    seeds = list(range(args.seeds))

    records: list = []
    if args.mode == "compare":
        for scenario in scenarios:
            summary, recs = bench.compare_at_budget(
                pupil, scenario, budget, seeds, c_values=c_values,
                chunk=args.chunk, workers=args.threads)
            records.extend(recs)
            for label, cell in (("rs", summary.rs), ("wgs", summary.wgs),
                                (f"cswgs c={_fmt(summary.best_c)}", summary.best)):
                print(f"# {scenario.name} {label}: I={cell.iterations} "
                      f"e={_fmt(cell.mean_efficiency)}"
                      f"+-{_fmt(cell.std_efficiency)} "
                      f"u={_fmt(cell.mean_uniformity)}"
                      f"+-{_fmt(cell.std_uniformity)}", file=sys.stderr)
    else:
        algorithms = args.algorithms or ["rs", "wgs", "cswgs"]
        records = bench.sweep(pupil, scenarios, algorithms, c_values, budget,
                              seeds, chunk=args.chunk, workers=args.threads)

    csv_text = bench.format_records_csv(records)
    if args.out == "-":
        sys.stdout.write(csv_text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
    if args.summary_out:
        bench.write_summary_csv(args.summary_out, bench.summarize(records))
    return 0


def _cmd_calibrate(args) -> int:
    from .bench import DEFAULT_FRAME_MS, calibrate_ops_per_ms

    ops_per_ms = calibrate_ops_per_ms(side_px=args.side, n_spots=args.spots_n,
                                      iterations=args.iters, chunk=args.chunk,
                                      workers=args.threads)
    print(f"ops_per_ms={_fmt(ops_per_ms)}")
    print(f"budget_{int(DEFAULT_FRAME_MS)}ms={int(ops_per_ms * DEFAULT_FRAME_MS)}")
    return 0


class SystemExit2(Exception):
    """Usage error surfaced with exit code 2."""


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) > 1:
        # The thread pool size is fixed at first numba import; raise the
        # cap before any kernel module loads.
        os.environ.setdefault("NUMBA_NUM_THREADS", str(max(args.threads, 4)))

    from .errors import HoloError

    commands = {"solve": _cmd_solve, "render": _cmd_render,
                "bench": _cmd_bench, "calibrate": _cmd_calibrate}
    try:
        return commands[args.command](args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (HoloError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
