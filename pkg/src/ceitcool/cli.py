"""Command-line interface.

Subcommands: dressed, spectra, rates, cool, scan, validate. Parameters come
from a flat JSON file (--params) with per-key overrides (--set key=value,
repeatable, last one wins). All output is in trap-frequency units; CSV uses
'.' decimals, JSON numbers are IEEE doubles.

Exit codes: 0 success, 2 parameter errors, 3 fatal per-point errors in
non-scan commands.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys

import numpy as np

from . import dynamics, oracle, rates, resolvent, scan, spectra
from .errors import (
    CeitcoolError,
    ParameterFileError,
    PoleError,
    HeatingError,
    PreconditionError,
    NoRootError,
    TruncationError,
)
from .params import SystemParams, derive, load_params_file


def _common_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--params", metavar="FILE", help="flat JSON parameter file")
    sub.add_argument(
        "--set", dest="overrides", action="append", default=[],
        metavar="KEY=VALUE", help="override one parameter (repeatable)")
    sub.add_argument("--out", metavar="FILE", help="output path (default stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument(
        "--gamma-units", action="store_true",
        help="additionally report rate quantities scaled by alpha = eta^2 omega_P^2/nu")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceitcool",
        description="Cavity-EIT cooling of a trapped atom: spectra, rates, "
                    "dynamics, scans, and master-equation validation.")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("dressed", help="dressed-state spectrum and dark states")
    _common_options(sub)

    sub = subs.add_parser("spectra", help="atom/cavity excitation spectra")
    _common_options(sub)
    sub.add_argument("--delta-min", type=float, required=True)
    sub.add_argument("--delta-max", type=float, required=True)
    sub.add_argument("--delta-points", type=int, default=1001)

    sub = subs.add_parser("rates", help="heating/cooling rates at one point")
    _common_options(sub)

    sub = subs.add_parser("cool", help="integrate the phonon rate equation")
    _common_options(sub)
    sub.add_argument("--mbar0", type=float, default=5.0,
                     help="initial thermal mean phonon number")
    sub.add_argument("--m-max", type=int, default=dynamics.DEFAULT_M_MAX)
    sub.add_argument("--t-final", type=float, default=None,
                     help="default: 8 / Gamma")
    sub.add_argument("--samples", type=int, default=201)
    sub.add_argument("--levels", type=int, default=4,
                     help="number of p_m columns to emit")

    sub = subs.add_parser("scan", help="1-D or 2-D parameter sweep")
    _common_options(sub)
    sub.add_argument("--axis1", required=True, metavar="NAME:START:STOP:POINTS")
    sub.add_argument("--axis2", metavar="NAME:START:STOP:POINTS")
    sub.add_argument("--constraint", choices=tuple(scan.CONSTRAINTS))
    sub.add_argument("--quantity", choices=scan.QUANTITIES,
                     default="Gamma_over_alpha")
    sub.add_argument("--gnuplot-out", metavar="FILE",
                     help="also write a gnuplot matrix file")

    sub = subs.add_parser(
        "validate", help="run the master-equation validation points (slow)")
    _common_options(sub)
    sub.add_argument("--point", action="append", default=[],
                     help="validation point name (repeatable; default all)")
    sub.add_argument("--no-convergence", action="store_true",
                     help="skip the reduced-truncation convergence rerun")

    return parser


def _load_params(args) -> SystemParams:
    data = {}
    if args.params:
        data = load_params_file(args.params).to_dict()
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParameterFileError(f"malformed --set {item!r}; expected KEY=VALUE")
        if key not in SystemParams.field_names():
            raise ParameterFileError(f"unknown parameter key: {key}")
        try:
            data[key] = float(value)
        except ValueError as exc:
            raise ParameterFileError(
                f"malformed value for {key}: {value!r}") from exc
    return SystemParams.from_dict(data)


@contextlib.contextmanager
def _output(args):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _cmd_dressed(args, p: SystemParams) -> int:
    spectrum = resolvent.dressed_states(p)
    dark = resolvent.dark_state_weights(p)
    with _output(args) as fh:
        if args.format == "json":
            doc = {
                "dressed": [{"re": z.real, "im": z.imag}
                            for z in spectrum.omega_eff],
                "dark_states": {
                    "three_photon": dark.three_photon,
                    "three_photon_resonant": dark.three_photon_resonant,
                    "two_photon": dark.two_photon,
                    "two_photon_resonant": dark.two_photon_resonant,
                },
            }
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        else:
            writer = csv.writer(fh)
            writer.writerow(["section", "label", "value1", "value2"])
            for k, z in enumerate(spectrum.omega_eff):
                writer.writerow(["dressed", f"omega_{k}", repr(z.real), repr(z.imag)])
            if dark.three_photon is None:
                writer.writerow(["dark_three_photon", "weights", "", ""])
            else:
                writer.writerow(["dark_three_photon", "weights",
                                 repr(dark.three_photon[0]),
                                 repr(dark.three_photon[1])])
            writer.writerow(["dark_three_photon", "resonant",
                             int(dark.three_photon_resonant), ""])
            writer.writerow(["dark_two_photon", "weights",
                             repr(dark.two_photon[0]), repr(dark.two_photon[1])])
            writer.writerow(["dark_two_photon", "resonant",
                             int(dark.two_photon_resonant), ""])
    return 0


def _cmd_spectra(args, p: SystemParams) -> int:
    grid = np.linspace(args.delta_min, args.delta_max, args.delta_points)
    s_atom = spectra.excitation_spectrum(p, grid, "atom")
    s_cav = spectra.excitation_spectrum(p, grid, "cavity")
    with _output(args) as fh:
        if args.format == "json":
            json.dump({"Delta": grid.tolist(),
                       "S_atom": s_atom.tolist(),
                       "S_cavity": s_cav.tolist()}, fh, indent=1)
            fh.write("\n")
        else:
            writer = csv.writer(fh)
            writer.writerow(["Delta", "S_atom", "S_cavity"])
            for d, sa, sc in zip(grid, s_atom, s_cav):
                writer.writerow([repr(float(d)), repr(float(sa)), repr(float(sc))])
    return 0


def _cmd_rates(args, p: SystemParams) -> int:
    r = rates.transition_rates(p)
    alpha = derive(p).alpha
    over_alpha = r.Gamma / alpha if alpha > 0 else float("nan")
    with _output(args) as fh:
        if args.format == "json":
            doc = {
                "params": p.to_dict(),
                "rates": {
                    "Delta": p.Delta, "delta1": p.delta1, "D": r.D,
                    "A_plus": r.A_plus, "A_minus": r.A_minus,
                    "Gamma": r.Gamma,
                    "Gamma_over_alpha": over_alpha if alpha > 0 else None,
                    "m_st": r.m_st,
                },
                "warnings": list(r.warnings),
            }
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        else:
            writer = csv.writer(fh)
            writer.writerow(["Delta", "delta1", "D", "A_plus", "A_minus",
                             "Gamma", "Gamma_over_alpha", "m_st"])
            writer.writerow([
                repr(p.Delta), repr(p.delta1), repr(r.D), repr(r.A_plus),
                repr(r.A_minus), repr(r.Gamma), repr(over_alpha),
                "" if r.m_st is None else repr(r.m_st)])
    return 0


def _cmd_cool(args, p: SystemParams) -> int:
    r = rates.transition_rates(p)
    if r.Gamma <= 0:
        raise HeatingError(f"Gamma = {r.Gamma} <= 0: no cooling at this point")
    t_final = args.t_final if args.t_final is not None else 8.0 / r.Gamma
    times = np.linspace(0.0, t_final, args.samples)
    p0 = dynamics.PhononDistribution.thermal(args.mbar0, args.m_max)
    traj = dynamics.evolve(r, p0, times)
    k = min(args.levels, args.m_max + 1)
    with _output(args) as fh:
        if args.format == "json":
            json.dump({
                "t": traj.times.tolist(),
                "mean_m": traj.mean_m.tolist(),
                "p": traj.populations[:, :k].tolist(),
            }, fh, indent=1)
            fh.write("\n")
        else:
            writer = csv.writer(fh)
            writer.writerow(["t", "mean_m"] + [f"p_{m}" for m in range(k)])
            for i, t in enumerate(traj.times):
                writer.writerow(
                    [repr(float(t)), repr(float(traj.mean_m[i]))]
                    + [repr(float(x)) for x in traj.populations[i, :k]])
    return 0


def _parse_axis(text: str) -> scan.AxisSpec:
    parts = text.split(":")
    if len(parts) != 4:
        raise ParameterFileError(
            f"malformed axis {text!r}; expected NAME:START:STOP:POINTS")
    name, start, stop, points = parts
    try:
        return scan.AxisSpec(name, float(start), float(stop), int(points))
    except ValueError as exc:
        raise ParameterFileError(f"bad axis {text!r}: {exc}") from exc


def _cmd_scan(args, p: SystemParams) -> int:
    spec = scan.ScanSpec(
        base=p,
        quantity=args.quantity,
        axis1=_parse_axis(args.axis1),
        axis2=_parse_axis(args.axis2) if args.axis2 else None,
        constraint=args.constraint,
    )
    result = scan.run_scan(spec, workers=args.workers)
    scaled = args.gamma_units and args.quantity in ("A_plus", "A_minus", "D")
    with _output(args) as fh:
        if args.format == "json":
            scan.write_json(result, fh)
        else:
            scan.write_csv(result, fh, scaled_by_alpha=scaled)
    if args.gnuplot_out:
        with open(args.gnuplot_out, "w", encoding="utf-8") as fh:
            scan.write_gnuplot(result, fh)
    return 0


def _cmd_validate(args, _p: SystemParams | None) -> int:
    points = oracle.validation_points()
    if args.point:
        known = {pt.name for pt in points}
        missing = set(args.point) - known
        if missing:
            raise ParameterFileError(
                f"unknown validation point(s): {', '.join(sorted(missing))}")
        points = [pt for pt in points if pt.name in args.point]
    reports = oracle.run_validation(points, convergence=not args.no_convergence)
    with _output(args) as fh:
        json.dump(reports, fh, indent=1)
        fh.write("\n")
    return 0 if all(r["pass"] for r in reports) else 3


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            # validation points carry their own parameters
            return _cmd_validate(args, None)
        p = _load_params(args)
        handler = {
            "dressed": _cmd_dressed,
            "spectra": _cmd_spectra,
            "rates": _cmd_rates,
            "cool": _cmd_cool,
            "scan": _cmd_scan,
        }[args.command]
        return handler(args, p)
    except ParameterFileError as exc:
        print(f"ceitcool: parameter error: {exc}", file=sys.stderr)
        return 2
    except (PoleError, HeatingError, PreconditionError, NoRootError,
            TruncationError) as exc:
        print(f"ceitcool: {exc}", file=sys.stderr)
        return 3
    except CeitcoolError as exc:
        print(f"ceitcool: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
