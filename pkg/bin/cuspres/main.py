import argparse
import logging
import math
import sys
from contextlib import contextmanager

from cuspres import __version__, asymptotics, bessel, geodesics, report, selfcheck
from cuspres.config import RunConfig, build_run_config, resolve_threads
from cuspres.errors import ConfigError, CuspResError
from cuspres.problems import CuspCone, Kind
from cuspres.resonance import enumerate as enumerate_resonances

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2
EXIT_SELFCHECK = 3

FIGURE_SETS = ((-1.0, 1.0), (-2.0, 1.0), (-1.0, 2.0), (-2.0, 2.0))
WEYL_COLUMNS = ["lambda", "n_counted", "weyl_model", "ratio"]


def _error(message: str):
    print(f"Error: {message}", file=sys.stderr)


@contextmanager
def _output(path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            yield f
    else:
        yield sys.stdout


def _emit(cfg: RunConfig, header, rows):
    with _output(cfg.output) as out:
        if cfg.format == "json":
            report.write_json(out, cfg.echo(), rows)
        else:
            report.write_csv(out, header, rows)


def _report_failures(failures):
    for failure in failures:
        print(f"Failed k={failure.k}: {failure.error}: {failure.reason}", file=sys.stderr)


def _run(cfg: RunConfig):
    prob = cfg.problem()
    return prob, enumerate_resonances(prob, cfg.k_min, cfg.k_max, cfg.k_step, cfg.solver(),
                                      threads=cfg.threads)


def cmd_resonances(cfg: RunConfig) -> int:
    prob, run = _run(cfg)
    rows = [report.resonance_row(res) for res in run.resonances]
    _emit(cfg, report.CSV_HEADER, rows)
    if cfg.plot_path:
        report.write_svg(cfg.plot_path, {f"(a,b)=({prob.a:g},{prob.b:g})": [r.lam for r in run.resonances]},
                         title=f"cusp-cone resonances, m={prob.m:g}",
                         reference_levels=[-prob.b * prob.j / 2])
    _report_failures(run.failures)
    return EXIT_PARTIAL if run.failures else EXIT_OK


def cmd_funnel(cfg: RunConfig) -> int:
    prob, run = _run(cfg)
    rows = [report.resonance_row(res, funnel=True) for res in run.resonances]
    _emit(cfg, report.CSV_HEADER + report.FUNNEL_COLUMNS, rows)
    if rows:
        worst = max(row["lambda_minus_seed_abs"] for row in rows)
        print(f"max |lambda - seed|: {worst:.6g}", file=sys.stderr)
    if cfg.plot_path:
        report.write_svg(cfg.plot_path, {f"(a,b)=({prob.a:g},{prob.b:g})": [r.lam for r in run.resonances]},
                         title=f"funnel-cone resonances, m={prob.m:g}")
    _report_failures(run.failures)
    return EXIT_PARTIAL if run.failures else EXIT_OK


def weyl_table(resonances, prob, k_step: int):
    ordered = sorted(resonances, key=lambda res: res.lam.real)
    rows = []
    for decile in range(1, 11):
        index = math.ceil(decile * len(ordered) / 10) - 1
        lam = ordered[index].lam.real
        counted = asymptotics.weyl_count(ordered, lam) * k_step
        model = asymptotics.weyl_model(lam, prob.b)
        rows.append({"lambda": lam, "n_counted": counted, "weyl_model": model, "ratio": counted / model})
    return rows


def cmd_weyl(cfg: RunConfig) -> int:
    prob, run = _run(cfg)
    if not run.resonances:
        _error("no resonances to count")
        _report_failures(run.failures)
        return EXIT_CONFIG
    rows = weyl_table(run.resonances, prob, cfg.k_step)
    _emit(cfg, WEYL_COLUMNS, rows)
    top = rows[-1]["lambda"]
    volume = asymptotics.phase_volume(top, prob.m, prob.b)
    print(f"phase volume at lambda={top:.6g}: {volume:.6g} "
          f"(weyl model {rows[-1]['weyl_model']:.6g})", file=sys.stderr)
    _report_failures(run.failures)
    return EXIT_PARTIAL if run.failures else EXIT_OK


def cmd_figure2(cfg: RunConfig) -> int:
    series = {}
    rows = []
    levels = []
    failed = False
    for a, b in FIGURE_SETS:
        prob = CuspCone(a, b, cfg.m)
        run = enumerate_resonances(prob, cfg.k_min, cfg.k_max, cfg.k_step, cfg.solver(),
                                   threads=cfg.threads)
        rows.extend(report.resonance_row(res, prefix={"a": a, "b": b}) for res in run.resonances)
        series[f"(a,b)=({a:g},{b:g})"] = [res.lam for res in run.resonances]
        levels.append(-b * prob.j / 2)
        for failure in run.failures:
            print(f"Failed (a,b)=({a:g},{b:g}) k={failure.k}: {failure.error}: {failure.reason}",
                  file=sys.stderr)
        failed = failed or bool(run.failures)
    _emit(cfg, report.FIGURE_PREFIX + report.CSV_HEADER, rows)
    if cfg.plot_path:
        report.write_svg(cfg.plot_path, series, title=f"cusp-cone resonances, m={cfg.m:g}",
                         reference_levels=levels)
    return EXIT_PARTIAL if failed else EXIT_OK


def _parse_grid(text: str):
    try:
        n_angles, n_radii = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad grid '{text}', expected ANGLESxRADII") from None
    return n_angles, n_radii


def cmd_geodesics(args) -> int:
    p = geodesics.MetricProfile(args.a, args.b)
    n_angles, n_radii = _parse_grid(args.grid)
    if not 0 < args.dt <= geodesics.MAX_DT:
        raise ConfigError(f"dt must lie in (0, {geodesics.MAX_DT}]")
    scan = geodesics.nontrap_scan(p, n_angles, n_radii, T=args.T, R_escape=args.R, dt=args.dt,
                                  threads=resolve_threads(args.threads))
    escaped = round(scan.fraction_escaped * scan.trajectories)
    print(f"escaped: {escaped}/{scan.trajectories}")
    print(f"worst escape time: {scan.worst_escape_time:.6g}")
    if scan.verdict is None:
        print("verdict: n/a (a+b≠0)")
    else:
        print(f"verdict: {'nontrapping' if scan.verdict else 'FAILED'}")
    for failure in scan.failures:
        print(f"Failed trajectory {failure}", file=sys.stderr)
    if scan.failures or scan.verdict is False:
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    if args.list:
        for check in selfcheck.CHECKS:
            print(f"{check.name}: {check.description}")
        return EXIT_OK
    bessel.HANKEL_COEFFICIENT_SHIFT = args.inject_hankel_fault
    try:
        results = selfcheck.run_checks(args.names or None)
    finally:
        bessel.HANKEL_COEFFICIENT_SHIFT = 0.0
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")
    failed = [result.name for result in results if not result.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed", file=sys.stderr)
        return EXIT_SELFCHECK
    return EXIT_OK


def _add_run_options(parser, with_plot=True):
    parser.add_argument("--a", type=float, help="Cone slope")
    parser.add_argument("--b", type=float, help="Cusp (b > 0) or funnel (b < 0) rate")
    parser.add_argument("--m", type=float, help="Fourier mode (default 1)")
    parser.add_argument("--k", help="Index range k_min:k_max[:step] (default 10:1000:10)")
    parser.add_argument("--rel-tol", dest="rel_tol", type=float, help="Relative residual tolerance")
    parser.add_argument("--format", choices=("csv", "json"), help="Table format (default csv)")
    if with_plot:
        parser.add_argument("--plot", dest="plot_path", help="Write an SVG scatter plot to this file")
    parser.add_argument("--threads", type=int, help="Worker threads, 0 = one per CPU")
    parser.add_argument("--output", help="Write the table here instead of stdout")
    parser.add_argument("--config", help="key=value file with defaults for the options above")


RUN_KEYS = ("a", "b", "m", "k", "rel_tol", "format", "plot_path", "threads", "output")


def _run_config(args, kind: Kind) -> RunConfig:
    flags = {key: getattr(args, key, None) for key in RUN_KEYS}
    return build_run_config(kind, flags, args.config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="runCuspRes",
                                     description="Scattering resonances of cusp-cone and funnel-cone surfaces")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log solver diagnostics")
    subparsers = parser.add_subparsers(dest="command", help="Sub-commands")

    _add_run_options(subparsers.add_parser("resonances", help="Cusp-cone resonance sequence"))
    _add_run_options(subparsers.add_parser("funnel", help="Funnel-cone resonance sequence"))
    _add_run_options(subparsers.add_parser("weyl", help="Counting function against the Weyl law"),
                     with_plot=False)

    figure_parser = subparsers.add_parser("figure2", help="All four cusp-cone parameter sets")
    _add_run_options(figure_parser)

    geo_parser = subparsers.add_parser("geodesics", help="Nontrapping scan of the geodesic flow")
    geo_parser.add_argument("--a", type=float, default=-1.0, help="Cone slope (a < 0)")
    geo_parser.add_argument("--b", type=float, default=1.0, help="Cusp rate (b > 0)")
    geo_parser.add_argument("--grid", default="36x17", help="ANGLESxRADII launch grid")
    geo_parser.add_argument("--T", type=float, default=200.0, help="Time limit")
    geo_parser.add_argument("--R", type=float, default=20.0, help="Escape radius")
    geo_parser.add_argument("--dt", type=float, default=geodesics.MAX_DT, help="Step size")
    geo_parser.add_argument("--threads", type=int, help="Worker threads, 0 = one per CPU")

    check_parser = subparsers.add_parser("selfcheck", help="Run the numerical invariant suite")
    check_parser.add_argument("--list", action="store_true", help="List the checks without running them")
    check_parser.add_argument("names", nargs="*", help="Run only these checks")
    check_parser.add_argument("--inject-hankel-fault", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "selfcheck":
            return cmd_selfcheck(args)
        if args.command == "geodesics":
            return cmd_geodesics(args)
        kind = Kind.FUNNEL_CONE if args.command == "funnel" else Kind.CUSP_CONE
        cfg = _run_config(args, kind)
        if args.command == "resonances":
            return cmd_resonances(cfg)
        if args.command == "funnel":
            return cmd_funnel(cfg)
        if args.command == "weyl":
            return cmd_weyl(cfg)
        return cmd_figure2(cfg)
    except ConfigError as e:
        _error(str(e))
        return EXIT_CONFIG
    except CuspResError as e:
        _error(f"{type(e).__name__}: {e}")
        return EXIT_PARTIAL
