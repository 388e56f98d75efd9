"""Command-line entry point.

Exit codes: 0 success, 1 I/O or input-data error, 2 usage error,
3 fit did not converge, 4 a property check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import calibration, checks, files
from .chart import MissingAlpha, render_svg
from .core import InvalidParameter, MarketParams
from .distfit import DegenerateSample, NonConvergence, beta_mle
from .montecarlo import PDistSpec, SimConfig, TableSchemaError, sweep

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_CHECK = 0, 1, 2, 3, 4

log = logging.getLogger("ppa_auction")


class UsageError(Exception):
    pass


def parse_grid(text: str) -> tuple[float, ...]:
    """``lo:hi:step`` (inclusive), a comma list, or a single value."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, step = (float(s) for s in text.split(":"))
            if step <= 0 or hi < lo:
                raise UsageError(f"bad grid {text!r}: need step > 0 and hi >= lo")
            count = int(math.floor((hi - lo) / step + 1e-9))
            return tuple(round(lo + k * step, 12) for k in range(count + 1))
        return tuple(float(s) for s in text.split(","))
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None


def _build_sim_config(args: argparse.Namespace) -> SimConfig:
    try:
        return SimConfig(
            market=MarketParams(x=args.x, n=args.n),
            p_dist=PDistSpec.parse(args.p_dist),
            draws=args.draws,
            seed=args.seed,
            rho_grid=parse_grid(args.rho),
            alpha_grid=parse_grid(args.alpha),
        )
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _build_sim_config(args)
    table = sweep(cfg)
    try:
        files.write_revenue_csv(table, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %d rows to %s", len(table), args.out)
    return EXIT_OK


def cmd_fit_beta(args: argparse.Namespace) -> int:
    try:
        sample = files.read_probabilities(args.input)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    code = EXIT_OK
    try:
        fit = beta_mle(sample)
    except DegenerateSample as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        fit, code = exc.fit, EXIT_NONCONVERGED
    report = files.format_fit_report(fit, sample)
    if args.out:
        try:
            Path(args.out).write_text(report, encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(report)
    return code


def cmd_check(args: argparse.Namespace) -> int:
    if args.replay:
        try:
            data = json.loads(Path(args.replay).read_text(encoding="utf-8"))
            report = checks.replay(data.get("profile", data))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"error: cannot replay {args.replay}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        report = checks.run_checks(args.trials, args.seed)
    print(report.summary())
    if report.ok:
        return EXIT_OK
    for suite in report.suites:
        if suite.first_failure is not None:
            print(f"first failure in {suite.name}:", file=sys.stderr)
            print(json.dumps(suite.first_failure, indent=2, sort_keys=True), file=sys.stderr)
    return EXIT_CHECK


def cmd_chart(args: argparse.Namespace) -> int:
    try:
        table = files.read_revenue_csv(args.input)
        svg = render_svg(table, args.alpha)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TableSchemaError, MissingAlpha) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        Path(args.out).write_text(svg, encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    try:
        n_values = tuple(int(v) for v in parse_grid(args.n_values))
        x_values = parse_grid(args.x_values)
        for n in n_values:
            for x in x_values:
                MarketParams(x=x, n=n)
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from None
    if args.draws < 1:
        raise UsageError("--draws must be >= 1")
    points = calibration.calibrate(args.draws, args.seed, n_values, x_values)
    sys.stdout.write(calibration.format_report(points))
    best = points[0]
    print(f"best: n={best.n} x={best.x:g} max deviation {best.score:.2f} pp")
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppa-auction",
        description="Pay-per-attention auction simulator and property checker.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="sweep (rho, alpha) and write a revenue CSV")
    sim.add_argument("--p-dist", default="uniform", help="uniform | beta:A,B | degenerate:P0")
    sim.add_argument("--rho", default="0:1:0.05", help="grid lo:hi:step or comma list")
    sim.add_argument("--alpha", default="0,0.5,1", help="grid lo:hi:step or comma list")
    sim.add_argument("--n", type=int, default=2)
    sim.add_argument("--x", type=float, default=0.5)
    sim.add_argument("--draws", type=_positive_int, default=100_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit-beta", help="fit Beta(a, b) to a probability file")
    fit.add_argument("--input", required=True)
    fit.add_argument("--out", help="report path (default: stdout)")
    fit.set_defaults(func=cmd_fit_beta)

    chk = sub.add_parser("check", help="run randomised property suites")
    chk.add_argument("--trials", type=int, default=1000)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--replay", help="JSON profile from a previous failure")
    chk.set_defaults(func=cmd_check)

    chart = sub.add_parser("chart", help="render one alpha slice of a revenue CSV as SVG")
    chart.add_argument("--input", required=True)
    chart.add_argument("--alpha", type=float, required=True)
    chart.add_argument("--out", required=True)
    chart.set_defaults(func=cmd_chart)

    cal = sub.add_parser("calibrate", help="search (n, x) for the target revenue gaps")
    cal.add_argument("--n-values", default="2,3,4,5")
    cal.add_argument("--x-values", default="0.25,0.5,0.75")
    cal.add_argument("--draws", type=int, default=100_000)
    cal.add_argument("--seed", type=int, default=0)
    cal.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
