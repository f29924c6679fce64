"""Command-line front end: ``retroresp {event,log,sweep,simulate,rates}``.

Exit status: 0 success, 1 usage error, 2 data or domain error. With
``--json`` a single JSON document goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .errors import ResponsibilityError
from .event_log import load_events, resp_from_log, resp_series, write_events
from .responsibility import ACCEPT, REJECT, analyze_event
from .sdt_model import (
    NOISE,
    SIGNAL,
    PayoffMatrix,
    beta_to_threshold,
    confusion_rates,
    load_scenario,
    optimal_beta,
)
from .simulator import MAXIMIZE_EV, POLICIES, SimConfig, simulate, write_sidecar
from .sweep import DEFAULT_E_VALUES, DEFAULT_RANGE, SweepSpec, emit_grid, sweep

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g(x: float) -> str:
    return f"{x:.6g}"


def _emit_json(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected min:max:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected min:max:steps, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0 or hi <= lo or steps < 2:
        raise argparse.ArgumentTypeError(
            f"range needs 0 < min < max and steps >= 2, got {text!r}")
    return lo, hi, steps


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("values must be finite")
    return values


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def _posint(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _seed(text: str) -> int:
    value = _nonneg_int(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _dist_line(name, d) -> str:
    return f"  {name:<22} P(signal)={_g(d['signal'])}  P(noise)={_g(d['noise'])}"


def cmd_event(args) -> int:
    scenario = load_scenario(args.scenario)
    report = analyze_event(scenario, args.system_output, args.observed, args.action)
    doc = report.to_dict()
    if args.json:
        _emit_json(doc)
        return EXIT_OK
    out = [
        f"system output: {args.system_output}   observed e: {_g(args.observed)}   "
        f"action: {args.action}",
        "posteriors:",
        _dist_line("system only (x_aS)", doc["x_a_system_only"]),
        _dist_line("human only (x_aH)", doc["x_a_human_only"]),
        _dist_line("combined (x_a)", doc["x_a"]),
        f"JS distance D(x_a, x_aS) = {_g(report.d_to_system)}",
        f"JS distance D(x_a, x_aH) = {_g(report.d_to_human)}",
        f"Resp(x_a) = {_g(report.d_to_system)} / ({_g(report.d_to_system)} + "
        f"{_g(report.d_to_human)}) = {_g(report.resp_xa)}",
        "actions:",
    ]
    for a in (ACCEPT, REJECT):
        out.append(f"  {a:<7} EV={_g(report.ev_per_action[a])}  "
                   f"SoftMax={_g(report.softmax_per_action[a])}  "
                   f"Rsnble={_g(report.rsnble_per_action[a])}")
    for flag in report.flags:
        out.append(f"note: {flag}")
    print("\n".join(out))
    return EXIT_OK


def cmd_log(args) -> int:
    if (args.window_size is None) != (args.stride is None):
        raise UsageError("--window-size and --stride must be given together")
    events = load_events(args.input)
    result = resp_from_log(events, burn_in=args.burn_in, alpha=args.alpha)
    if args.window_size is not None:
        series = resp_series(events[args.burn_in:], args.window_size, args.stride, alpha=args.alpha)
        result = type(result)(**{**result.__dict__, "series": series})
    if args.json:
        _emit_json(result.to_dict())
        return EXIT_OK
    print(f"events used: {result.n_events} (burn-in {result.burn_in})")
    print(f"H(Z)       = {_g(result.h_z_bits)} bits")
    print(f"H(Z|Y)     = {_g(result.h_z_given_y_bits)} bits")
    print(f"Resp(Z)    = {_g(result.resp_z)}")
    if result.series is not None:
        print("window start  Resp(Z)")
        for start, value in result.series:
            print(f"{start:>12}  {'n/a (constant z)' if value is None else _g(value)}")
    return EXIT_OK


def _svg_path(out: Path, e: float) -> Path:
    return out.with_name(f"{out.stem}_e{e:+g}{out.suffix or '.svg'}")


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    spec = SweepSpec(args.d_human, args.d_system, args.e, args.system_output, scenario)
    grid = sweep(spec)
    out = Path(args.out)
    if args.format == "csv":
        written = [emit_grid(grid, "csv", out)]
    else:
        written = [emit_grid(grid.slice(e), "svg_heatmap", _svg_path(out, e), args.metric)
                   for e in grid.e_values]
    if args.json:
        _emit_json({"files": [str(p) for p in written], "n_cells": len(grid.cells)})
    else:
        for p in written:
            print(p)
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    config = SimConfig(scenario, args.trials, args.seed, args.policy)
    events = simulate(config)
    out = Path(args.out)
    try:
        write_events(events, out)
        sidecar = out.with_suffix(".config.json")
        write_sidecar(config, sidecar)
    except OSError as exc:
        raise ResponsibilityError(f"cannot write output: {exc}") from None
    if args.json:
        _emit_json({"events": str(out), "config": str(sidecar), **config.resolved()})
    else:
        print(f"wrote {len(events)} events to {out}")
        print(f"wrote config to {sidecar}")
    return EXIT_OK


def cmd_rates(args) -> int:
    if args.d_prime <= 0:
        raise UsageError("--d-prime must be > 0")
    if args.beta == "optimal":
        if args.prior is None or args.payoffs is None:
            raise UsageError("--beta optimal needs --prior and --payoffs")
        if not 0 < args.prior < 1:
            raise UsageError("--prior must lie in (0, 1)")
        try:
            payoffs = PayoffMatrix.from_sequence(args.payoffs)
        except ResponsibilityError as exc:
            raise UsageError(str(exc)) from None
        beta = optimal_beta(args.prior, payoffs)
    else:
        try:
            beta = float(args.beta)
        except ValueError:
            raise UsageError(f"--beta must be a number or 'optimal', got {args.beta!r}") from None
        if not (math.isfinite(beta) and beta > 0):
            raise UsageError("--beta must be > 0")
    threshold = beta_to_threshold(beta, args.d_prime)
    rates = confusion_rates(args.d_prime, threshold)
    if args.json:
        _emit_json({"beta": beta, "threshold": threshold, "p_tp": rates.p_tp,
                    "p_fn": rates.p_fn, "p_fp": rates.p_fp, "p_tn": rates.p_tn})
        return EXIT_OK
    print(f"beta = {_g(beta)}   threshold = {_g(threshold)}")
    print(f"P_TP = {_g(rates.p_tp)}  P_FN = {_g(rates.p_fn)}  "
          f"P_FP = {_g(rates.p_fp)}  P_TN = {_g(rates.p_tn)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="retroresp", description=(
        "Retrospective human responsibility measures for decisions aided by a binary alert system."))
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{event,log,sweep,simulate,rates}")
    sub.required = True

    p = sub.add_parser("event", help="analyse a single interaction")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--system-output", required=True, choices=(SIGNAL, NOISE))
    p.add_argument("--observed", required=True, type=_finite, help="value e the human observed")
    p.add_argument("--action", required=True, choices=(ACCEPT, REJECT))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_event)

    p = sub.add_parser("log", help="average responsibility Resp(Z) from an event CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--burn-in", type=_nonneg_int, default=0)
    p.add_argument("--window-size", type=_posint)
    p.add_argument("--stride", type=_posint)
    p.add_argument("--alpha", type=_finite, default=0.0, help="add-alpha smoothing (default 0)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_log)

    p = sub.add_parser("sweep", help="grid of Resp(x_a) and Rsnble over d' values")
    p.add_argument("--scenario", required=True)
    rng_default = "{}:{}:{}".format(*DEFAULT_RANGE)
    p.add_argument("--d-human", type=_parse_range, default=DEFAULT_RANGE,
                   help=f"min:max:steps (default {rng_default})")
    p.add_argument("--d-system", type=_parse_range, default=DEFAULT_RANGE,
                   help=f"min:max:steps (default {rng_default})")
    p.add_argument("--e", type=_parse_floats, default=DEFAULT_E_VALUES,
                   help="comma-separated observed values; use --e=-1.5,0 for negatives")
    p.add_argument("--system-output", choices=(SIGNAL, NOISE), default=SIGNAL)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("--metric", choices=("resp_xa", "rsnble_accept", "rsnble_reject"),
                   default="resp_xa", help="value rendered in SVG heatmaps")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="generate a seeded event log")
    p.add_argument("--scenario", required=True)
    p.add_argument("--trials", required=True, type=_posint)
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--out", required=True)
    p.add_argument("--policy", choices=POLICIES, default=MAXIMIZE_EV)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rates", help="confusion rates of an SDT detector")
    p.add_argument("--d-prime", required=True, type=_finite)
    p.add_argument("--beta", required=True, help="likelihood-ratio criterion or 'optimal'")
    p.add_argument("--prior", type=_finite)
    p.add_argument("--payoffs", type=_parse_floats, help="v_tp,v_tn,v_fp,v_fn")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_rates)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"retroresp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResponsibilityError as exc:
        print(f"retroresp {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
