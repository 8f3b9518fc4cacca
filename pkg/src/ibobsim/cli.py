"""Command-line interface.

    ibobsim simulate --config run.json [--out DIR] [--sensitivity]
    ibobsim fom --body BODY.csv --air AIR.csv [--x M] [--band HZ]
                [--w-ll F] [--w-dpl F] [--negate] [--out REPORT.csv]
    ibobsim compare REPORT.csv... --svg DIR [--curves PL.csv...]

Every handled error exits nonzero after printing one machine-readable
line `error:<Kind>:<message>` on stderr. The only environment variable
read is IBOBSIM_LOG (log verbosity: debug/info/warning/error).
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import MODEL_EQS, RunConfig, load_config
from .curves import PathLossCurve, Scenario
from .eqs import hbc_sweep
from .errors import ConfigError, IbobError, PairingError
from .fom import FomParams, FomReport, REPORT_HEADER, make_report, parse_report_csv, rank_bands, write_report_csv
from .measio import negate_losses, parse_pl_csv, write_pl_csv
from .phantom import CouplerMode, CouplerSpec
from .rf import freespace_curve, inbody_curve
from .svg import curves_chart, fom_bar_chart, format_band
from .tissues import Frequency, default_tissue_library, load_tissue_file

log = logging.getLogger(__name__)

_CURVE_NAME = re.compile(r"^(\d+)_(inbody|freespace)(?:\.csv)?$")


def _curve_filename(frequency_hz: float, scenario: Scenario) -> str:
    return f"{int(round(frequency_hz))}_{scenario.value}.csv"


def _simulate_band(cfg: RunConfig, band_hz: float, model: str, tissues) -> dict:
    """Both scenario curves for one band; EQS bands also report solver stats."""
    f = Frequency(band_hz)
    curves = {}
    solver_info = []
    if model == MODEL_EQS:
        tx = CouplerSpec(
            mode=CouplerMode.GALVANIC_PAIR,
            electrode_size_m=cfg.tx_coupler.electrode_size_m,
            position_m=cfg.phantom.tx_position_m(),
            excitation_v=cfg.tx_coupler.excitation_v,
            separation_m=cfg.tx_coupler.separation_m,
            axis="x",
        )
        for scenario in (Scenario.IN_BODY, Scenario.FREE_SPACE):
            result = hbc_sweep(
                cfg.phantom, tx, cfg.rx_distances_m, f, scenario, cfg.solver,
                spacing_m=cfg.grid.spacing_m,
                padding_m=cfg.grid.padding_m,
                rx_electrode_size_m=cfg.tx_coupler.rx_electrode_size_m,
                tissues=tissues,
            )
            curves[scenario] = result.curve
            solver_info.append(
                f"band_hz={int(round(band_hz))} scenario={scenario.value} "
                f"scheme={cfg.solver.scheme} tol={cfg.solver.tol:g} "
                f"iterations={result.iterations} final_residual={result.final_residual:.6e}"
            )
    else:
        curves[Scenario.IN_BODY] = inbody_curve(cfg.phantom, f, cfg.rx_distances_m, tissues)
        curves[Scenario.FREE_SPACE] = freespace_curve(
            f, cfg.phantom.implant_depth_m, cfg.rx_distances_m
        )
    return {"curves": curves, "solver_info": solver_info}


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.out:
        cfg = replace(cfg, output_dir=args.out)
    tissues = load_tissue_file(cfg.tissue_file) if cfg.tissue_file else default_tissue_library()
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    for band in cfg.bands:
        result = _simulate_band(cfg, band.frequency_hz, band.model, tissues)
        for scenario, curve in result["curves"].items():
            path = outdir / _curve_filename(band.frequency_hz, scenario)
            path.write_bytes(write_pl_csv(curve))
            print(f"wrote {path}")
        if result["solver_info"]:
            logpath = outdir / f"{int(round(band.frequency_hz))}_solver.log"
            logpath.write_text("\n".join(result["solver_info"]) + "\n", encoding="utf-8")
            print(f"wrote {logpath}")

    if args.sensitivity:
        _write_sensitivity(cfg, tissues, outdir)
    return 0


def _write_sensitivity(cfg: RunConfig, tissues, outdir: Path) -> None:
    """FoM shift when the torso radius moves +/-30% off the default."""
    rows = ["torso_scale,band_hz,ll_x_db,delta_pl_body_db,fom_db"]
    for scale in (0.7, 1.0, 1.3):
        phantom = replace(cfg.phantom, torso_radius_m=cfg.phantom.torso_radius_m * scale)
        scaled = replace(cfg, phantom=phantom)
        for band in cfg.bands:
            result = _simulate_band(scaled, band.frequency_hz, band.model, tissues)
            report = make_report(
                result["curves"][Scenario.IN_BODY],
                result["curves"][Scenario.FREE_SPACE],
                cfg.fom,
            )
            rows.append(
                f"{scale:.2f},{int(round(band.frequency_hz))},"
                f"{report.ll_x_db:.6g},{report.delta_pl_body_db:.6g},{report.fom_db:.6g}"
            )
    path = outdir / "sensitivity.csv"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def _infer_band_hz(path: Path) -> float | None:
    m = _CURVE_NAME.match(path.name)
    return float(m.group(1)) if m else None


def cmd_fom(args) -> int:
    body_path, air_path = Path(args.body), Path(args.air)
    band_hz = args.band
    if band_hz is None:
        inferred = {_infer_band_hz(body_path), _infer_band_hz(air_path)}
        inferred.discard(None)
        if len(inferred) > 1:
            raise PairingError(
                f"file names imply different bands {sorted(inferred)}; pass --band"
            )
        if not inferred:
            raise ConfigError(
                "cannot infer the band from the file names; pass --band <hertz>"
            )
        band_hz = inferred.pop()
    band = Frequency(band_hz)

    body = parse_pl_csv(body_path.read_bytes(), band, Scenario.IN_BODY)
    air = parse_pl_csv(air_path.read_bytes(), band, Scenario.FREE_SPACE)
    if args.negate:
        log.info("negating loss values of %s and %s (signal-level ingest)", body_path, air_path)
        body = negate_losses(body)
        air = negate_losses(air)

    params = FomParams(eval_distance_x_m=args.x, w_ll=args.w_ll, w_dpl=args.w_dpl)
    report = make_report(body, air, params)
    print(REPORT_HEADER)
    print(report.csv_row())
    if args.out:
        Path(args.out).write_text(write_report_csv([report]), encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def _print_ranking(ranked: list[FomReport]) -> None:
    print(f"{'band':>10} {'fom_db':>10} {'ll_x_db':>10} {'dpl_db':>10} {'weighted':>10}")
    for r in ranked:
        print(
            f"{format_band(r.band.hertz):>10} {r.fom_db:>10.2f} {r.ll_x_db:>10.2f} "
            f"{r.delta_pl_body_db:>10.2f} {r.weighted_fom_db:>10.2f}"
        )


def cmd_compare(args) -> int:
    reports: list[FomReport] = []
    for path in args.reports:
        reports.extend(parse_report_csv(Path(path).read_text(encoding="utf-8")))
    if len(reports) < 2:
        raise PairingError(f"need at least 2 reports to compare, got {len(reports)}")
    ranked = rank_bands(reports)
    _print_ranking(ranked)

    svgdir = Path(args.svg)
    svgdir.mkdir(parents=True, exist_ok=True)
    bars = svgdir / "fom_bars.svg"
    bars.write_text(fom_bar_chart(ranked), encoding="utf-8")
    print(f"wrote {bars}")

    if args.curves:
        labeled: list[tuple[str, PathLossCurve]] = []
        for cpath in args.curves:
            cpath = Path(cpath)
            m = _CURVE_NAME.match(cpath.name)
            if not m:
                raise ConfigError(
                    f"{cpath}: curve files must be named <band_hz>_<scenario>.csv"
                )
            band = Frequency(float(m.group(1)))
            scenario = Scenario(m.group(2))
            curve = parse_pl_csv(cpath.read_bytes(), band, scenario)
            case = "case I" if scenario is Scenario.IN_BODY else "case II"
            labeled.append((f"{format_band(band.hertz)} {case}", curve))
        overlay = svgdir / "curves_overlay.svg"
        overlay.write_text(curves_chart(labeled), encoding="utf-8")
        print(f"wrote {overlay}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibobsim",
        description="In-body to out-of-body channel simulation and figure-of-merit analysis.",
    )
    parser.add_argument("--version", action="version", version=f"ibobsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the configured band sweeps, emit curve CSVs")
    p_sim.add_argument("--config", required=True, help="JSON run configuration")
    p_sim.add_argument("--out", help="output directory (overrides the config)")
    p_sim.add_argument(
        "--sensitivity",
        action="store_true",
        help="also rerun with the torso radius scaled -30%%/+30%% and report FoM shifts",
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_fom = sub.add_parser("fom", help="compute LL_X, dPL_body and FoM from a curve pair")
    p_fom.add_argument("--body", required=True, help="case I (in-body) curve CSV")
    p_fom.add_argument("--air", required=True, help="case II (free-space) curve CSV")
    p_fom.add_argument("--x", type=float, default=0.5, help="evaluation distance X in meters")
    p_fom.add_argument("--band", type=float, help="band in Hz (default: infer from file names)")
    p_fom.add_argument("--w-ll", type=float, default=1.0, dest="w_ll")
    p_fom.add_argument("--w-dpl", type=float, default=1.0, dest="w_dpl")
    p_fom.add_argument(
        "--negate", action="store_true",
        help="ingest signal-level exports by negating loss values",
    )
    p_fom.add_argument("--out", help="also write the one-row report CSV here")
    p_fom.set_defaults(func=cmd_fom)

    p_cmp = sub.add_parser("compare", help="rank report rows and emit SVG charts")
    p_cmp.add_argument("reports", nargs="+", help="FoM report CSVs")
    p_cmp.add_argument("--svg", required=True, help="directory for the SVG charts")
    p_cmp.add_argument(
        "--curves", nargs="*", default=[],
        help="path-loss CSVs (named <band_hz>_<scenario>.csv) for the overlay chart",
    )
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("IBOBSIM_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IbobError, ValueError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"error:{type(exc).__name__}:{message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
