"""Command-line entry points.

Subcommands: ``synth`` (learn a program from an example), ``migrate``
(learn or load a program, then run it over a full instance), ``run``
(evaluate a program file, no synthesis), ``inspect`` (show the inferred
attribute mapping, sketch, domains, search-space size, and encoding),
and ``interactive`` (terminal refinement loop, or ``--serve`` for the
HTTP session service).

Every flag has a config-file equivalent (``--config`` JSON, flags win).
All file outputs are byte-deterministic for a fixed configuration; wall
times go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .attrmap import infer_attr_mapping
from .datalog import parse_program, print_program
from .errors import DlsynthError
from .fdsolver import encode
from .instance import facts_to_instance, instance_to_facts, parse_instance, serialize_instance
from .schema import Schema, parse_schema
from .sketch import search_space_size, sketch_gen
from .synth import (
    Example,
    SynthesisOptions,
    SynthesisResult,
    _union_instances,
    interactive_synthesize,
    synthesize,
)


@dataclass
class RunConfig:
    source_schema: str | None = None
    target_schema: str | None = None
    example: str | None = None
    instance: str | None = None
    out: str | None = None
    program: str | None = None
    strategy: str = "mdp"
    filtering: bool = False
    timeout: float = 120.0
    max_iters: int = 200_000
    stats: str | None = None
    serve: bool = False
    port: int = 8571
    answers: str | None = None
    ui_dir: str | None = None
    extra: dict = field(default_factory=dict)


_FLAGS = [
    ("--source-schema", "source_schema", str, "source schema JSON file"),
    ("--target-schema", "target_schema", str, "target schema JSON file"),
    ("--example", "example", str, 'example file: {"input": ..., "output": ...}'),
    ("--instance", "instance", str, "full source instance JSON file"),
    ("--out", "out", str, "output file (program text or migrated instance)"),
    ("--program", "program", str, "program text file (skip synthesis)"),
    ("--strategy", "strategy", str, "blocking strategy: mdp | naive"),
    ("--timeout", "timeout", float, "synthesis timeout in seconds"),
    ("--max-iters", "max_iters", int, "solver iteration budget"),
    ("--stats", "stats", str, "write per-iteration stats as JSON lines"),
    ("--port", "port", int, "service port for --serve"),
    ("--answers", "answers", str, "scripted interactive answers (JSON list of outputs)"),
    ("--ui-dir", "ui_dir", str, "static directory served at /ui"),
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dlsynth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("synth", "migrate", "run", "inspect", "interactive"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="JSON config file; flags win")
        for flag, dest, typ, help_text in _FLAGS:
            p.add_argument(flag, dest=dest, type=typ, default=None, help=help_text)
        p.add_argument("--filtering", action="store_true", default=None,
                       help="allow constant filters drawn from the output example")
        p.add_argument("--serve", action="store_true", default=None,
                       help="start the HTTP session service (interactive only)")
        if name == "inspect":
            p.add_argument("--sketch", action="store_true", help="print only the sketch")
            p.add_argument("--encoding", action="store_true", help="print only the encoding")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        doc = json.loads(Path(args.config).read_text())
        for k, v in doc.items():
            key = k.replace("-", "_")
            if hasattr(cfg, key):
                setattr(cfg, key, v)
            else:
                cfg.extra[key] = v
    for _, dest, _, _ in _FLAGS:
        v = getattr(args, dest, None)
        if v is not None:
            setattr(cfg, dest, v)
    for dest in ("filtering", "serve"):
        v = getattr(args, dest, None)
        if v is not None:
            setattr(cfg, dest, v)
    if cfg.timeout <= 0 or cfg.max_iters <= 0:
        raise DlsynthError("budgets must be positive")
    return cfg


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) in (None, "")]
    if missing:
        raise DlsynthError(f"missing required option(s): {', '.join('--' + m.replace('_', '-') for m in missing)}")


def _load_schema(path: str) -> Schema:
    return parse_schema(Path(path).read_text())


def _load_example(cfg: RunConfig, s: Schema, s_t: Schema) -> Example:
    doc = json.loads(Path(cfg.example).read_text())
    if not isinstance(doc, dict) or "input" not in doc or "output" not in doc:
        raise DlsynthError('example file must be {"input": ..., "output": ...}')
    ein = parse_instance(s, json.dumps(doc["input"]))
    eout = parse_instance(s_t, json.dumps(doc["output"]))
    return Example(ein, eout)


def _opts(cfg: RunConfig) -> SynthesisOptions:
    return SynthesisOptions(
        strategy=cfg.strategy,
        filtering=cfg.filtering,
        max_iters=cfg.max_iters,
        timeout_s=cfg.timeout,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_stats(cfg: RunConfig, res: SynthesisResult) -> None:
    if not cfg.stats:
        return
    lines = [
        json.dumps(
            {
                "event": "result",
                "iterations": res.iterations,
                "blocking_clauses": res.blocking_clauses,
                "search_space": res.search_space,
                "queries_asked": res.queries_asked,
                "strategy": cfg.strategy,
                "filtering": cfg.filtering,
            },
            sort_keys=True,
        )
    ]
    for i, rec in enumerate(res.details):
        lines.append(
            json.dumps(
                {
                    "event": "iteration",
                    "n": i + 1,
                    "consistent": rec.consistent,
                    "mdps": sorted(sorted(str(a) for a in phi) for phi in rec.mdps),
                    "clauses": len(rec.formulas),
                },
                sort_keys=True,
            )
        )
    Path(cfg.stats).write_text("\n".join(lines) + "\n")


def cmd_synth(cfg: RunConfig) -> int:
    _require(cfg, "source_schema", "target_schema", "example")
    s = _load_schema(cfg.source_schema)
    s_t = _load_schema(cfg.target_schema)
    example = _load_example(cfg, s, s_t)
    opts = _opts(cfg)
    opts.collect_details = bool(cfg.stats)
    res = synthesize(s, s_t, example, opts)
    _emit(print_program(res.program), cfg.out)
    _write_stats(cfg, res)
    print(
        f"synthesized in {res.iterations} iteration(s), "
        f"search space {res.search_space}, {res.wall_time_s:.2f}s",
        file=sys.stderr,
    )
    return 0


def cmd_migrate(cfg: RunConfig) -> int:
    _require(cfg, "source_schema", "target_schema", "instance")
    s = _load_schema(cfg.source_schema)
    s_t = _load_schema(cfg.target_schema)
    if cfg.program:
        program = parse_program(Path(cfg.program).read_text())
    else:
        _require(cfg, "example")
        res = synthesize(s, s_t, _load_example(cfg, s, s_t), _opts(cfg))
        program = res.program
        _write_stats(cfg, res)
    inst = parse_instance(s, Path(cfg.instance).read_text())
    from .datalog import evaluate

    out_fb = evaluate(program, instance_to_facts(s, inst))
    migrated = facts_to_instance(s_t, out_fb)
    _emit(serialize_instance(s_t, migrated) + "\n", cfg.out)
    return 0


def cmd_run(cfg: RunConfig) -> int:
    _require(cfg, "source_schema", "target_schema", "program", "instance")
    s = _load_schema(cfg.source_schema)
    s_t = _load_schema(cfg.target_schema)
    program = parse_program(Path(cfg.program).read_text())
    inst = parse_instance(s, Path(cfg.instance).read_text())
    from .datalog import evaluate

    out_fb = evaluate(program, instance_to_facts(s, inst))
    migrated = facts_to_instance(s_t, out_fb)
    _emit(serialize_instance(s_t, migrated) + "\n", cfg.out)
    return 0


def cmd_inspect(cfg: RunConfig, only_sketch: bool = False, only_encoding: bool = False) -> int:
    _require(cfg, "source_schema", "target_schema", "example")
    s = _load_schema(cfg.source_schema)
    s_t = _load_schema(cfg.target_schema)
    example = _load_example(cfg, s, s_t)
    psi = infer_attr_mapping(s, s_t, example.input, example.output)
    sk = sketch_gen(psi, s, s_t, output_inst=example.output, filtering=cfg.filtering)
    sections = []
    if not only_sketch and not only_encoding:
        sections.append("attribute mapping:\n" + psi.pretty())
    if not only_encoding:
        sections.append(
            "sketch:\n" + sk.pretty() + f"\nsearch space: {search_space_size(sk)}"
        )
    if not only_sketch:
        sections.append("encoding:\n" + encode(sk).pretty())
    _emit("\n\n".join(sections) + "\n", cfg.out)
    return 0


def cmd_interactive(cfg: RunConfig) -> int:
    if cfg.serve:
        from .service import serve

        serve(port=cfg.port, ui_dir=cfg.ui_dir)
        return 0
    _require(cfg, "source_schema", "target_schema", "example")
    s = _load_schema(cfg.source_schema)
    s_t = _load_schema(cfg.target_schema)
    example = _load_example(cfg, s, s_t)

    scripted = None
    if cfg.answers:
        scripted = iter(json.loads(Path(cfg.answers).read_text()))

    def oracle(query_input):
        print("distinguishing input:", file=sys.stderr)
        print(serialize_instance(s, query_input), file=sys.stderr)
        if scripted is not None:
            try:
                answer = next(scripted)
            except StopIteration:
                raise DlsynthError("scripted answers exhausted") from None
            print("scripted answer applied", file=sys.stderr)
            return answer
        print("enter the expected output instance as one JSON line:", file=sys.stderr)
        line = sys.stdin.readline()
        if not line.strip():
            raise DlsynthError("no answer provided")
        return json.loads(line)

    opts = _opts(cfg)
    opts.collect_details = bool(cfg.stats)
    res = interactive_synthesize(s, s_t, example, oracle, opts)
    _emit(print_program(res.program), cfg.out)
    _write_stats(cfg, res)
    print(f"final program after {res.queries_asked} question(s)", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "synth":
            return cmd_synth(cfg)
        if args.command == "migrate":
            return cmd_migrate(cfg)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "inspect":
            return cmd_inspect(cfg, only_sketch=args.sketch, only_encoding=args.encoding)
        if args.command == "interactive":
            return cmd_interactive(cfg)
        parser.error(f"unknown command {args.command}")
    except DlsynthError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
