"""Command-line interface: ``fibertaper <command> [options]``.

All files use SI units (metres). Exit codes: 0 success, 1 runtime or
convergence failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import pydantic

from fibertaper import __version__
from fibertaper import io as fio
from fibertaper import specfun, taper
from fibertaper import waveguide as wg
from fibertaper.config import RunConfig, apply_overrides, load_config
from fibertaper.errors import BelowCutoff, FiberTaperError, ValidationError

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors raise instead of exiting, so main() owns exit codes."""

    def __init__(self, *args, **kwargs):
        # exact flags only: "--h" must not read as an abbreviation of "--help"
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


class _UsageError(Exception):
    pass


def _mode_list(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return [str(wg.ModeId.parse(n)) for n in names]
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


def _amplitudes(text: str) -> dict[str, float]:
    out = {}
    for item in text.split(","):
        name, _, value = item.partition("=")
        if not value:
            raise ValidationError(f"amplitude entries look like HE12=0.08, got {item!r}")
        out[str(wg.ModeId.parse(name))] = float(value)
    return out


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_modes(cfg: RunConfig, args) -> int:
    spec = cfg.spec.build()
    radii = wg.log_grid(args.rmin, args.rmax, args.n_points)
    header, columns = ["radius_m"], [radii]
    for name in cfg.modes:
        mode = wg.ModeId.parse(name)
        rc = wg.cutoff_radius(spec, mode)
        col = np.full(radii.size, np.nan)
        for i, r in enumerate(radii):
            if rc is not None and r < rc:
                continue
            try:
                n = wg.solve_neff(spec, mode, float(r))
            except BelowCutoff:
                continue
            if n > spec.n_clad:
                col[i] = n
        header.append(str(mode))
        columns.append(col)
    _emit(fio.format_csv(header, columns), cfg.output)
    return EXIT_OK


def cmd_cutoffs(cfg: RunConfig, args) -> int:
    spec = cfg.spec.build()
    rows = []
    for name in cfg.modes:
        mode = wg.ModeId.parse(name)
        rc = wg.cutoff_radius(spec, mode)
        rows.append({"mode": str(mode), "cutoff_radius_m": rc,
                     "cutoff_v": None if rc is None else spec.v_number(rc)})
    if args.json:
        _emit(fio.dumps(rows) + "\n", cfg.output)
    else:
        lines = [f"{'mode':<6} {'cutoff_nm':>12} {'V':>10}"]
        for row in rows:
            if row["cutoff_radius_m"] is None:
                lines.append(f"{row['mode']:<6} {'none':>12} {'-':>10}")
            else:
                lines.append(f"{row['mode']:<6} {row['cutoff_radius_m'] * 1e9:12.3f} "
                             f"{row['cutoff_v']:10.6f}")
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


def cmd_profile(cfg: RunConfig, args) -> int:
    p = taper.TaperProfile(cfg.profile.r0, cfg.profile.h, cfg.profile.L)
    z = np.linspace(0.0, p.length, args.n_points)
    comments = [f"waist_m={taper.waist(p)!r}", f"volume_m3={taper.total_volume(p)!r}"]
    _emit(fio.format_csv(["z_m", "radius_m"], [z, taper.radius_at(p, z)], comments), cfg.output)
    return EXIT_OK


def cmd_fit_waist(cfg: RunConfig, args) -> int:
    cols = fio.read_columns(args.input, ("L_m", "w_m"))
    data = np.column_stack([cols["L_m"], cols["w_m"]])
    r0, h, rms = taper.fit_exponential(data)
    report = {"r0_m": r0, "h_m": h, "rms_log_residual": rms, "n_points": int(data.shape[0])}
    if args.bootstrap:
        rng = np.random.default_rng(cfg.seed)
        hs = []
        for _ in range(args.bootstrap):
            idx = rng.integers(0, data.shape[0], data.shape[0])
            try:
                hs.append(taper.fit_exponential(data[idx])[1])
            except FiberTaperError:
                continue
        report["bootstrap"] = {"n": len(hs), "h_std_m": float(np.std(hs)) if hs else None,
                               "seed": cfg.seed}
    _emit(fio.dumps(report) + "\n", cfg.output)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    from fibertaper.beats import ModeAmplitudeSet, synthesize_transmittance

    sim = cfg.simulate
    spec = cfg.spec.build()
    amps = ModeAmplitudeSet.from_mapping(sim.complex_amplitudes(), sim.incoherent_loss)
    trace = synthesize_transmittance(spec, sim.r0, sim.h, amps, sim.L_max, sim.dL,
                                     ramp_width=sim.ramp_width)
    T = trace.T
    if sim.noise > 0:
        rng = np.random.default_rng(cfg.seed)
        T = np.clip(T + sim.noise * rng.standard_normal(T.size), 0.0, 1.0)
    comments = [f"r0_m={sim.r0!r} h_m={sim.h!r} wavelength_m={spec.wavelength!r}"]
    comments += [f"cutoff_L_m {k}={v!r}" for k, v in trace.meta["cutoff_L"].items()]
    _emit(fio.format_csv(["L_m", "T"], [trace.L, T], comments), cfg.output)
    return EXIT_OK


def cmd_spectrogram(cfg: RunConfig, args) -> int:
    from fibertaper.analysis import spectrogram

    trace = fio.read_trace(args.input)
    sg = spectrogram(trace, cfg.analysis.window, cfg.spec.build())
    _emit(fio.spectrogram_csv(sg), cfg.output)
    if args.pgm:
        fio.write_pgm(args.pgm, sg.magnitude)
    return EXIT_OK


def cmd_fit_h(cfg: RunConfig, args) -> int:
    from fibertaper.analysis import detect_cutoffs, extract_ridges, fit_hot_zone, spectrogram

    an = cfg.analysis
    spec = cfg.spec.build()
    trace = fio.read_trace(args.input)
    sg = spectrogram(trace, an.window, spec)
    ridges = extract_ridges(sg, an.ridge_threshold)
    if not ridges:
        raise FiberTaperError("no ridges above threshold")
    fit = fit_hot_zone(ridges, spec, cfg.profile.r0, an.candidates,
                       h_bounds=(an.h_min, an.h_max))
    events = detect_cutoffs(trace, window=an.envelope_window, drop=an.drop)
    report = {
        "ridges": [r.to_dict() for r in ridges],
        "h_fit": fit.h,
        "pair_assignment": fit.assignment,
        "cutoff_events": [
            {**e.to_dict(), "waist_m": float(taper.waist_at(cfg.profile.r0, fit.h, e.L_drop))}
            for e in events],
        "mode_assignments": [],
        "residuals": {"rms": fit.rms, "per_ridge": fit.per_ridge_rms,
                      "runner_up": fit.runner_up},
    }
    _emit(fio.dumps(report) + "\n", cfg.output)
    return EXIT_OK


def cmd_identify(cfg: RunConfig, args) -> int:
    from fibertaper.analysis import analyze_scan, identify_modes

    spec = cfg.spec.build()
    components = []
    scan_report = None
    if args.scan:
        scan = fio.read_scan(args.scan, spec.wavelength)
        found = analyze_scan(scan, cfg.analysis.n_components)
        components = [(c.delta_neff, c.weight) for c in found]
        scan_report = [{"period_m": c.period, "delta_neff": c.delta_neff, "weight": c.weight}
                       for c in found]
    if args.dneff:
        components += [(d,) for d in args.dneff]
    if not components:
        raise ValidationError("give --scan and/or --dneff")
    candidates = args.candidates or None
    result = identify_modes(components, spec, candidates)
    report = {
        "ridges": [], "h_fit": None, "pair_assignment": [], "cutoff_events": [],
        "scan_components": scan_report,
        "mode_assignments": [result.to_dict()],
        "residuals": {"rms": result.residual},
    }
    _emit(fio.dumps(report) + "\n", cfg.output)
    return EXIT_OK


def cmd_specfun_check(cfg: RunConfig, args) -> int:
    lines = [f"{'value':<14} {'x':>10} {'result':>24} {'identity_resid':>16}"]
    for label, x, value, resid in specfun.self_test_table():
        lines.append(f"{label:<14} {x:10.6g} {value:24.16e} {resid:16.3e}")
    _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_spec_flags(p):
    g = p.add_argument_group("waveguide")
    g.add_argument("--n-core", type=float, help="core (silica) index [1.453]")
    g.add_argument("--n-clad", type=float, help="cladding index [1.0]")
    g.add_argument("--wavelength", type=float, help="vacuum wavelength in m [775e-9]")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="seed for commands that draw random numbers")
    _add_spec_flags(common)

    parser = _Parser(prog="fibertaper", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--help-json", action="store_true",
                        help="print a machine-readable description of all commands")
    public = "modes,cutoffs,profile,fit-waist,simulate,spectrogram,fit-h,identify"
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar=f"{{{public}}}")

    p = sub.add_parser("modes", parents=[common], help="effective-index curves as CSV")
    p.add_argument("--modes", type=_mode_list, help="comma-separated modes, e.g. HE11,TE01")
    p.add_argument("--rmin", type=float, default=0.1e-6, help="smallest radius in m")
    p.add_argument("--rmax", type=float, default=5e-6, help="largest radius in m")
    p.add_argument("-n", "--n-points", type=int, default=400, help="log-spaced radii")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("cutoffs", parents=[common], help="cutoff radius of each mode")
    p.add_argument("--modes", type=_mode_list)
    p.add_argument("--json", action="store_true", help="JSON instead of a text table")
    p.set_defaults(func=cmd_cutoffs)

    p = sub.add_parser("profile", parents=[common], help="taper radius profile as CSV")
    p.add_argument("--r0", type=float, help="initial radius in m")
    p.add_argument("--h", type=float, help="hot-zone length in m")
    p.add_argument("--L", type=float, help="lengthening in m")
    p.add_argument("--t", type=float, help="pulling time in s (sets L = 2 v t)")
    p.add_argument("--speed", type=float, default=taper.DEFAULT_PULL_SPEED,
                   help="stage speed in m/s for --t")
    p.add_argument("-n", "--n-points", type=int, default=201)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("fit-waist", parents=[common], help="fit r0 and h to L_m,w_m data")
    p.add_argument("input", help="CSV with columns L_m,w_m")
    p.add_argument("--bootstrap", type=int, default=0, help="bootstrap resamples for h spread")
    p.set_defaults(func=cmd_fit_waist)

    p = sub.add_parser("simulate", parents=[common], help="synthetic transmittance L_m,T")
    p.add_argument("--r0", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--L-max", type=float)
    p.add_argument("--dL", type=float)
    p.add_argument("--ramp-width", type=float)
    p.add_argument("--amplitudes", type=_amplitudes, help="e.g. HE11=0.9,HE12=0.1")
    p.add_argument("--loss", type=float, help="incoherent loss fraction")
    p.add_argument("--noise", type=float, help="additive Gaussian noise std on T")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrogram", parents=[common], help="STFT matrix CSV (+ PGM)")
    p.add_argument("input", help="CSV with columns L_m,T")
    p.add_argument("--window", type=float, help="window width in m")
    p.add_argument("--pgm", help="also write a 16-bit PGM map here")
    p.set_defaults(func=cmd_spectrogram)

    p = sub.add_parser("fit-h", parents=[common], help="fit hot-zone length to a trace")
    p.add_argument("input", help="CSV with columns L_m,T")
    p.add_argument("--r0", type=float)
    p.add_argument("--window", type=float)
    p.add_argument("--threshold", type=float, help="ridge threshold (fraction of max)")
    p.add_argument("--candidates", type=_mode_list, help="modes beating with HE11")
    p.add_argument("--hmin", type=float)
    p.add_argument("--hmax", type=float)
    p.set_defaults(func=cmd_fit_h)

    p = sub.add_parser("identify", parents=[common], help="identify modes from index differences")
    p.add_argument("--scan", help="near-field scan CSV with columns z_m,I")
    p.add_argument("--dneff", type=_float_list, help="comma-separated index differences")
    p.add_argument("--candidates", type=_mode_list)
    p.add_argument("--components", type=int, help="scan components to keep")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("specfun-check", parents=[common], help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_specfun_check)
    # hide it from the command list as well
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "specfun-check"]
    return parser


def _overrides(args) -> dict:
    get = lambda name: getattr(args, name, None)  # noqa: E731
    L = get("L")
    if get("t") is not None:
        L = float(taper.lengthening_from_time(args.t, args.speed))
    out = {
        "spec.n_core": get("n_core"), "spec.n_clad": get("n_clad"),
        "spec.wavelength": get("wavelength"),
        "modes": get("modes"), "seed": get("seed"), "output": get("output"),
        "analysis.window": get("window"), "analysis.ridge_threshold": get("threshold"),
        "analysis.h_min": get("hmin"), "analysis.h_max": get("hmax"),
        "analysis.n_components": get("components"),
    }
    if args.command == "profile":
        out.update({"profile.r0": get("r0"), "profile.h": get("h"), "profile.L": L})
    elif args.command == "simulate":
        out.update({"simulate.r0": get("r0"), "simulate.h": get("h"),
                    "simulate.L_max": get("L_max"), "simulate.dL": get("dL"),
                    "simulate.ramp_width": get("ramp_width"),
                    "simulate.amplitudes": get("amplitudes"),
                    "simulate.incoherent_loss": get("loss"), "simulate.noise": get("noise")})
    elif args.command == "fit-h":
        out.update({"profile.r0": get("r0"), "analysis.candidates": get("candidates")})
    return out


def help_json(parser: argparse.ArgumentParser) -> dict:
    """Describe the public commands and their options as plain data."""
    def describe(p):
        opts = []
        for a in p._actions:
            if isinstance(a, (argparse._HelpAction, argparse._SubParsersAction)):
                continue
            opts.append({
                "dest": a.dest, "flags": list(a.option_strings),
                "positional": not a.option_strings, "help": a.help,
                "default": a.default if isinstance(a.default, (int, float, str, type(None)))
                else None,
                "type": getattr(a.type, "__name__", None) if a.type else None,
            })
        return opts

    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    helps = {a.dest: a.help for a in sub._choices_actions}
    return {
        "prog": parser.prog, "version": __version__,
        "exit_codes": {"0": "success", "1": "runtime or convergence failure",
                       "2": "usage or validation error"},
        "options": describe(parser),
        "commands": {name: {"help": helps.get(name), "options": describe(p)}
                     for name, p in sub.choices.items() if name in helps},
    }


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.help_json:
            print(json.dumps(help_json(parser), indent=2))
            return EXIT_OK
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        cfg = apply_overrides(load_config(args.config), _overrides(args))
        _log("# resolved config: " + json.dumps(cfg.model_dump(), sort_keys=True))
        return args.func(cfg, args)
    except (_UsageError, ValidationError, pydantic.ValidationError, ValueError) as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    except FiberTaperError as exc:
        _log(f"error: {exc}")
        return EXIT_RUNTIME
    except OSError as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
