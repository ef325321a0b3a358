"""Command-line front end.

Subcommands: ``simulate``, ``compress``, ``attack1``, ``attack2``,
``attack3``. A JSON config file may supply any long flag (keys use
underscores); explicit flags win. Diagnostics go to stderr; the exit code is
0 only when every requested artifact was written.
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .attack import attack1, attack2, attack3, experiment_matrix, rank_leakage
from .kmeans import KMeansConfig
from .pca import pca_fit, project
from .plotting import scatter_csv, scatter_svg
from .simulate import gen_key, model_from_json, preset, simulate_trace, with_seed
from .trace import (
    CompressedTrace,
    TraceFormatError,
    compress,
    parse_key_hex,
    read_compressed,
    read_trace,
    sniff_format,
    write_compressed,
    write_trace,
)


class CliError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpsca",
        description="single-trace key recovery toolkit for scalar-multiplication power traces",
    )
    parser.add_argument("--version", action="version", version=f"kpsca {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic trace")
    sim.add_argument("--preset", help="leakage regime: design1_like or design3_like")
    sim.add_argument("--model", help="JSON file with explicit model parameters")
    sim.add_argument("--seed", type=int, help="seed for key and noise streams (default 0)")
    sim.add_argument("--key-bits", type=int, help="scalar bit length (default l+2)")
    sim.add_argument("--config", help="JSON config file supplying defaults")
    sim.add_argument("-o", "--output", help="output trace path (required)")

    comp = sub.add_parser("compress", help="sum-of-squares cycle compression (KPT1 -> KPC1)")
    comp.add_argument("input", help="raw trace file")
    comp.add_argument("--config", help="JSON config file supplying defaults")
    comp.add_argument("-o", "--output", help="output compressed path (required)")

    for name, description in (
        ("attack1", "whole-trace attack (one candidate)"),
        ("attack2", "per-cycle attack (needs --truth)"),
        ("attack3", "feature-pruning attack over a leakage ranking"),
    ):
        p = sub.add_parser(name, help=description)
        p.add_argument("input", help="KPT1 or KPC1 trace file")
        p.add_argument("--method", choices=("kmeans", "pca"), help="analysis method (default kmeans)")
        p.add_argument("--seed", type=int, help="K-means base seed (default 0)")
        p.add_argument("--restarts", type=int, help="K-means restarts (default 10)")
        p.add_argument("--max-iter", type=int, help="K-means iteration cap (default 300)")
        p.add_argument("--truth", help="known scalar as hex")
        p.add_argument("--truth-bits", type=int, help="bit length of --truth (default 4*len)")
        if name == "attack3":
            p.add_argument(
                "--ranking-report",
                help="attack2 report JSON supplying the cycle ranking "
                "(default: self-ranking via --truth)",
            )
        p.add_argument("--plot", action="store_true", help="also write SVG/CSV scatter")
        p.add_argument("--config", help="JSON config file supplying defaults")
        p.add_argument("-o", "--output", help="report path (default: stdout)")
    return parser


_DEFAULTS = {
    "method": "kmeans",
    "seed": 0,
    "restarts": 10,
    "max_iter": 300,
    "key_bits": None,
}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from --config, then from the defaults table."""
    file_values = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            file_values = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {config_path}: {exc}") from None
        if not isinstance(file_values, dict):
            raise CliError(f"config {config_path} must hold a JSON object")
    for key, value in file_values.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) in (None, False):
            setattr(args, attr, value)
    for key, value in _DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _load_any_trace(path: str):
    try:
        kind = sniff_format(path)
        return read_trace(path) if kind == "raw" else read_compressed(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    except TraceFormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _truth_key(args, l: int, metadata: dict):
    if not getattr(args, "truth", None):
        return None
    bits = args.truth_bits or int(metadata.get("key_bits") or 0) or 4 * len(
        str(args.truth).removeprefix("0x")
    )
    if bits < l:
        raise CliError(f"--truth has {bits} bits but the trace has l={l} slots")
    try:
        return parse_key_hex(args.truth, bits, (bits - l, l))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _cmd_simulate(args) -> int:
    if not args.output:
        raise CliError("simulate requires -o/--output")
    if bool(args.preset) == bool(args.model):
        raise CliError("simulate needs exactly one of --preset or --model")
    if args.preset:
        try:
            model = preset(args.preset)
        except ValueError as exc:
            raise CliError(str(exc)) from None
    else:
        try:
            model = model_from_json(Path(args.model).read_text())
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            raise CliError(f"invalid model file {args.model}: {exc}") from None
    model = with_seed(model, int(args.seed) + 1)
    bit_length = args.key_bits or model.geometry.l + 2
    key = gen_key(int(args.seed), int(bit_length))
    sim = simulate_trace(key, model)
    write_trace(sim.trace, args.output)
    sidecar = {
        "key_hex": key.to_hex(),
        "key_bits": key.bit_length,
        "analyzed_window": list(key.analyzed_window),
        "model": sim.model_echo,
    }
    Path(args.output + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {args.output} and {args.output}.json", file=sys.stderr)
    return 0


def _cmd_compress(args) -> int:
    if not args.output:
        raise CliError("compress requires -o/--output")
    try:
        kind = sniff_format(args.input)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc}") from None
    except TraceFormatError as exc:
        raise CliError(f"{args.input}: {exc}") from None
    if kind == "compressed":
        raise CliError(f"{args.input} is already compressed")
    trace = read_trace(args.input)
    write_compressed(compress(trace), args.output)
    print(f"wrote {args.output}", file=sys.stderr)
    return 0


def _plot_paths(output: str) -> tuple[str, str]:
    base = output[:-5] if output.endswith(".json") else output
    return base + ".svg", base + ".csv"


def _choose_plot_experiment(report):
    """Plot the most informative experiment: the best-delta one (fewest
    cycles on ties, matching the eta definition), or the first without truth."""
    if report.best_delta is None:
        return report.experiments[0]
    best = [e for e in report.experiments if e.delta == report.best_delta]
    return min(best, key=lambda e: (len(e.cycles_used), e.cycles_used))


def _write_plot(args, data, report, truth):
    chosen = _choose_plot_experiment(report)
    std = experiment_matrix(data, chosen.cycles_used)
    model = pca_fit(std, max_components=2)
    scores = project(std, model, min(2, model.n_components))
    truth_bits = truth.analyzed_bits if truth is not None else None
    svg_path, csv_path = _plot_paths(args.output)
    title = f"{report.attack} ({report.method}), cycles={len(chosen.cycles_used)}"
    Path(svg_path).write_text(scatter_svg(scores, chosen.candidate.labels, title))
    Path(csv_path).write_text(scatter_csv(scores, chosen.candidate.labels, truth_bits))
    print(f"wrote {svg_path} and {csv_path}", file=sys.stderr)


def _cmd_attack(args, name: str) -> int:
    if args.plot and not args.output:
        raise CliError("--plot needs -o/--output to name the SVG/CSV files")
    data = _load_any_trace(args.input)
    l = data.geometry.l if not isinstance(data, CompressedTrace) else data.l
    truth = _truth_key(args, l, data.metadata)
    cfg = KMeansConfig(
        K=2, max_iter=int(args.max_iter), restarts=int(args.restarts),
        base_seed=int(args.seed),
    )
    try:
        if name == "attack1":
            report = attack1(data, args.method, cfg, truth)
        elif name == "attack2":
            if truth is None:
                raise CliError("attack2 requires --truth")
            report = attack2(data, args.method, cfg, truth)
        else:
            if getattr(args, "ranking_report", None):
                try:
                    obj = json.loads(Path(args.ranking_report).read_text())
                    ranking = obj["ranking"]
                except (OSError, json.JSONDecodeError, KeyError) as exc:
                    raise CliError(
                        f"cannot read ranking from {args.ranking_report}: {exc}"
                    ) from None
            else:
                if truth is None:
                    raise CliError("attack3 self-ranking requires --truth "
                                   "(or use --ranking-report)")
                ranking = rank_leakage(attack2(data, args.method, cfg, truth))
            report = attack3(data, args.method, cfg, ranking, truth)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    text = report.to_json()
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    if args.plot:
        _write_plot(args, data, report, truth)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        args = _merge_config(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "compress":
            return _cmd_compress(args)
        return _cmd_attack(args, args.command)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
