"""Command-line front end: einkit verify | case-check | orbit | figure.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import RunConfig, load_config, validate_reports
from .cover import CoverPoint, chart_origin
from .errors import ConfigError, EinkitError
from .holonomy import case_check, orbit_distances
from .plotting import KINDS, draw_orbit, render, save_svg
from .quadric import FormContext
from .suite import SUITES, run_suite, timelike_translation
from .unipotent import orbit_arrays

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _dump_json(obj, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_verify(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    reports = run_suite(config, args.suite)
    for rep in reports:
        print(rep.line(), file=sys.stderr if args.json == "-" else sys.stdout)
    if args.json:
        payload = [rep.to_dict(timings=args.timings) for rep in reports]
        validate_reports(payload)
        _dump_json(payload, args.json)
    return EXIT_OK if all(rep.passed for rep in reports) else EXIT_FAIL


def cmd_case_check(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    report = case_check(config.case_spec())
    for c in report.conditions:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} case {report.case} {c.name}: {c.anchor}" + (f" [{c.detail}]" if c.detail else ""))
    print(f"case {report.case}: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _parse_q0(text: str | None, config: RunConfig) -> CoverPoint | None:
    if text is None:
        return None
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError("--q0 expects comma-separated numbers x_1,...,x_n,theta") from None
    if len(vals) != config.n + 1:
        raise ConfigError(f"--q0 needs {config.n + 1} numbers, got {len(vals)}")
    x = np.array(vals[:-1])
    return CoverPoint(x / np.linalg.norm(x), vals[-1])


def _decreasing(d: np.ndarray) -> bool:
    """Eventual monotone decrease towards 0, judged on the second half of the sequence.

    A positive limit would keep d[-1] close to d[len/2].
    """
    tail = d[len(d) // 2 :]
    return bool(np.all(np.diff(tail) <= 1e-12) and tail[-1] < 0.75 * tail[0])


def orbit_table(config: RunConfig, i_max: int, q0: CoverPoint | None = None) -> dict:
    """Rows (i, x, theta, distance to alpha p0, distance to alpha^-1 p0) for |i| <= i_max."""
    if len(config.generators) != 1:
        raise ConfigError("orbit needs exactly one generator")
    ctx = config.ctx
    gamma = config.lifted_generators()[0]
    q0 = q0 or chart_origin(ctx)
    idx = np.arange(-i_max, i_max + 1)
    xs, ths = orbit_arrays(gamma, q0, idx)
    d_plus, d_minus = orbit_distances(ctx, (xs, ths))
    pos, neg = idx >= 0, idx <= 0
    # one end of the orbit should approach alpha p0 and the other alpha^-1 p0
    forward = _decreasing(d_plus[pos]) and _decreasing(d_minus[neg][::-1])
    backward = _decreasing(d_minus[pos]) and _decreasing(d_plus[neg][::-1])
    rows = [
        {"i": int(i), "x": xs[j].tolist(), "theta": float(ths[j]),
         "dist_alpha_p0": float(d_plus[j]), "dist_alpha_inv_p0": float(d_minus[j])}
        for j, i in enumerate(idx)
    ]
    return {"rows": rows, "converges": forward or backward, "diverging": not (forward or backward),
            "q0": {"x": q0.x.tolist(), "theta": q0.theta}}


def cmd_orbit(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    table = orbit_table(config, args.i_max, _parse_q0(args.q0, config))
    if args.format == "json":
        _dump_json(table, args.out)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        n = config.n
        writer.writerow(["i", *[f"x{k + 1}" for k in range(n)], "theta", "dist_alpha_p0", "dist_alpha_inv_p0"])
        for r in table["rows"]:
            writer.writerow([r["i"], *(repr(v) for v in r["x"]), repr(r["theta"]),
                             repr(r["dist_alpha_p0"]), repr(r["dist_alpha_inv_p0"])])
        if args.out in (None, "-"):
            sys.stdout.write(buf.getvalue())
        else:
            Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    if args.plot:
        rows = table["rows"]
        save_svg(draw_orbit(np.array([r["i"] for r in rows]), np.array([r["dist_alpha_p0"] for r in rows]),
                            np.array([r["dist_alpha_inv_p0"] for r in rows])), args.plot)
    if table["diverging"]:
        print("warning: orbit does not approach alpha^-1 p0 and alpha p0 at its two ends", file=sys.stderr)
    return EXIT_OK


def cmd_figure(args: argparse.Namespace) -> int:
    gamma = None
    if args.config:
        config = load_config(args.config)
        ctx = config.ctx
        if config.generators:
            gamma = config.lifted_generators()[0]
    else:
        ctx = FormContext(args.n)
    if args.kind == "domain" and gamma is None:
        gamma = timelike_translation(ctx)
    render(args.kind, ctx, args.out, gamma)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="einkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("config", help="RunConfig JSON file")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--json", metavar="OUT", help="write the reports as JSON ('-' for stdout)")
    p.add_argument("--timings", action="store_true", help="include elapsed times in the JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("case-check", help="test holonomy generators against the declared case")
    p.add_argument("config")
    p.set_defaults(func=cmd_case_check)

    p = sub.add_parser("orbit", help="tabulate the orbit of q0 under the generator")
    p.add_argument("config")
    p.add_argument("--i-max", type=int, default=20)
    p.add_argument("--q0", help="x_1,...,x_n,theta (default: lift of the chart origin)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--plot", metavar="SVG", help="also plot the distances to an SVG file")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("figure", help="render a cross-section of the cover to SVG")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="RunConfig JSON; its first generator is used for the domain figure")
    p.add_argument("--n", type=int, default=4)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"einkit: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EinkitError as exc:
        print(f"einkit: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
