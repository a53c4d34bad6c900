"""Command-line interface: ``uniplan <subcommand> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import pi4
from .digits import ACTION_SYMBOLS, ActionMap, DigitStream
from .errors import ResourceLimitError, UniplanError
from .gridworld import env_to_text, generate_maze, parse_env
from .harness.config import ExperimentConfig, load_config
from .harness.render import render_trace_svg, trace_for_config
from .harness.runner import _grid_from_spec, run_trials
from .harness.verify import run_suite
from .learner import bfs_shortest, learn_optimal
from .scalefree.env import is_continuous_env_text

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _stream(args) -> DigitStream:
    src = args.source
    if src.startswith("file:"):
        return DigitStream("file", args.base, path=src[5:])
    if src in ("pi4", "pi"):
        if args.base != 4:
            raise UsageError("pi digits are only available in base 4")
        return DigitStream.pi()
    if src == "champernowne":
        return DigitStream.champernowne(args.base)
    if src == "pseudorandom":
        return DigitStream.pseudorandom(args.seed, args.base)
    raise UsageError(f"unknown digit source {src!r}")


def _add_source(p: argparse.ArgumentParser, default: str = "pi4") -> None:
    p.add_argument("--source", default=default,
                   help="pi4 | champernowne | pseudorandom | file:PATH (default %(default)s)")
    p.add_argument("--base", type=int, default=4)
    p.add_argument("--seed", type=int, default=0, help="pseudorandom seed")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    cfg = cfg.with_overrides(seed=args.seed, offset=args.offset, budget=args.budget,
                             out=str(Path(args.out).resolve()) if args.out else None,
                             workers=args.workers, trials=args.trials)
    stats = run_trials(cfg)
    for line in stats.footer():
        print(line)
    print(f"wrote {cfg.resolve(cfg.out)}")
    return EXIT_OK


def cmd_digits(args) -> int:
    if args.count < 0 or getattr(args, "from") < 1:
        raise UsageError("--from must be >= 1 and --count >= 0")
    if args.pi_max_digits:
        pi4.raise_limit(args.pi_max_digits)
    block = _stream(args).block(getattr(args, "from"), args.count)
    print("".join("0123456789abcdefghijklmnopqrstuvwxyz"[int(d)] for d in block))
    return EXIT_OK


def cmd_verify(args) -> int:
    out = open(args.out, "w") if args.out else None
    try:
        def emit(line: str) -> None:
            print(line, flush=True)
            if out:
                out.write(line + "\n")
        ok = run_suite(args.suite, emit)
    finally:
        if out:
            out.close()
    return EXIT_OK if ok else EXIT_FAILED


def _load_grid(spec: str):
    p = Path(spec)
    if p.exists():
        text = p.read_text()
        if is_continuous_env_text(text):
            raise UsageError(f"{spec} is a continuous environment; expected a grid")
        return parse_env(text)
    return _grid_from_spec(spec, ".", None)


def cmd_learn(args) -> int:
    env = _load_grid(args.env)
    stream = _stream(args)
    amap = ActionMap.from_string(args.map)
    st = learn_optimal(env, stream, amap, args.offset, args.budget, cap=args.cap)
    optimal = len(bfs_shortest(env, env.start, env.goals))
    plan = "".join(ACTION_SYMBOLS[u] for u in st.best_plan or [])
    print(f"best_plan={plan if st.best_plan is not None else '-'}")
    print(f"best_length={st.best_length if st.best_plan is not None else '-'}")
    print(f"bfs_length={optimal}")
    print(f"found_at={st.found_at if st.found_at is not None else '-'}")
    print(f"budget_consumed={st.steps_consumed}")
    print(f"cap={st.cap} cap_hits={st.cap_hits}")
    return EXIT_OK


def cmd_render(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        cfg = cfg.with_overrides(offset=args.offset, budget=args.budget, seed=args.seed)
    else:
        if not args.env:
            raise UsageError("render needs --config or --env")
        env_path = Path(args.env)
        kind = args.kind
        if kind is None:
            cont = env_path.exists() and is_continuous_env_text(env_path.read_text())
            kind = "continuous" if cont else "grid"
        start = tuple(Fraction(v) for v in args.start.split()) if args.start else None
        cfg = ExperimentConfig(kind=kind, env=str(env_path.resolve()) if env_path.exists() else args.env,
                               source=args.source, base=args.base, seed=args.seed or 0,
                               map=args.map, offset=args.offset or 1,
                               budget=args.budget if args.budget is not None else 10**4,
                               w=Fraction(args.w), start=start, trials=1)
    env, trace = trace_for_config(cfg, 1)
    render_trace_svg(env, trace, args.out)
    print(f"wrote {args.out} (outcome={trace.outcome})")
    return EXIT_OK


def cmd_gen_maze(args) -> int:
    env = generate_maze(args.width, args.height, args.seed)
    text = env_to_text(env)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uniplan",
                                     description="Universal plans from normal digit sequences.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a batch of trials from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--offset", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.add_argument("--trials", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("digits", help="print digits of a source")
    _add_source(p)
    p.add_argument("--from", type=int, default=1, help="first index (1-based)")
    p.add_argument("--count", type=int, default=64)
    p.add_argument("--pi-max-digits", type=int)
    p.set_defaults(func=cmd_digits)

    p = sub.add_parser("verify", help="run the catalog self-checks (JSON lines)")
    p.add_argument("--suite", choices=("small", "full"), default="small")
    p.add_argument("--out", help="also write the report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("learn", help="learn a shortest plan on a grid")
    p.add_argument("--env", required=True, help="grid file or generator spec")
    _add_source(p, default="champernowne")
    p.add_argument("--map", default="LRUD")
    p.add_argument("--offset", type=int, default=1)
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("render", help="render one trace as SVG")
    p.add_argument("--config")
    p.add_argument("--env")
    p.add_argument("--kind", choices=("grid", "continuous", "continuous-adaptive"))
    _add_source(p)
    p.add_argument("--map", default="LRUD")
    p.add_argument("--offset", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--w", default="1")
    p.add_argument("--start", help='continuous start point "x y"')
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gen-maze", help="generate a perfect maze")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_maze)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (UniplanError, ResourceLimitError, ValueError) as exc:
        print(f"uniplan: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"uniplan: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
