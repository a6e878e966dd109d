"""Command-line entry point ``mterm-lab``."""
from __future__ import annotations

import argparse
import sys

from .harness import io
from .harness.config import ConfigError, load_config

EXIT_FAIL = 1
EXIT_CONFIG = 2


def _load(path):
    try:
        return load_config(path)
    except ConfigError as exc:
        print(f"config error in {path}:\n{exc}", file=sys.stderr)
        return None
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return None


def cmd_run(args) -> int:
    from .harness.experiments import run

    cfg = _load(args.config)
    if cfg is None:
        return EXIT_CONFIG
    outcome = run(cfg, args.out)
    status = "PASS" if outcome.passed else "FAIL"
    print(f"[{status}] {outcome.kind}")
    for key, value in outcome.summary.items():
        print(f"  {key}: {value}")
    return 0 if outcome.passed else EXIT_FAIL


def cmd_verify_all(args) -> int:
    from .harness.criteria import verify_all

    results = verify_all(args.seed, args.out, args.jobs, echo=print if args.jobs == 1 else None)
    if args.jobs > 1:
        for r in results:
            print(r.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else EXIT_FAIL


def cmd_trace(args) -> int:
    from .harness.experiments import first_trace

    cfg = _load(args.config)
    if cfg is None:
        return EXIT_CONFIG
    text = first_trace(cfg).to_jsonl()
    target = args.output or cfg.output.trace_path
    if target:
        io.write_text(target, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_plot_data(args) -> int:
    header, rows = io.read_csv(args.csv)
    if len(header) < 2:
        print("plot-data needs at least two columns", file=sys.stderr)
        return EXIT_CONFIG
    triples = io.plot_triples(header, rows)
    lines = ["x,y,series"] + [",".join(t) for t in triples]
    text = "\n".join(lines) + "\n"
    if args.output:
        io.write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mterm-lab", description="Greedy m-term approximation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory (overrides output.out_dir)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify-all", help="run every acceptance criterion")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default="verify-out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify_all)

    p = sub.add_parser("trace", help="emit the WRGA trace of a config as JSON lines")
    p.add_argument("config")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("plot-data", help="reshape a CSV into x,y,series triples")
    p.add_argument("csv")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
