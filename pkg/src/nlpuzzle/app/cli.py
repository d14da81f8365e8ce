"""Command line interface: solve, ask, models, parse, check."""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .corpus import check_corpus
from .dot import export_proof_dot
from .resources import DOMAINS, corpus_dir
from .theory import (
    NoPersonsError,
    QuestionError,
    SOLVED,
    UNKNOWN,
    UnknownPredicateError,
    answer_question,
    build_theory,
    enumerate_models,
    query_wh,
    solve,
)

DEFAULTS = {
    "grammar": None,
    "synonyms": None,
    "gazetteer": None,
    "domain": "knights-knaves",
    "max_models": 10000,
    "max_seconds": 10.0,
}


def read_config(path) -> dict:
    """``key = value`` lines; unknown keys are rejected."""
    parser = configparser.ConfigParser()
    parser.read_string("[config]\n" + Path(path).read_text(encoding="utf-8"))
    out = {}
    for key, value in parser["config"].items():
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ValueError(f"unknown config key {key!r}")
        out[key] = value
    if "max_models" in out:
        out["max_models"] = int(out["max_models"])
    if "max_seconds" in out:
        out["max_seconds"] = float(out["max_seconds"])
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file with default paths and limits")
    common.add_argument("--grammar", help="feature grammar file")
    common.add_argument("--synonyms", help="synonym file (lemma pos syn1,syn2)")
    common.add_argument("--gazetteer", help="file with one person name per line")
    common.add_argument("--domain", choices=sorted(DOMAINS))
    common.add_argument("--max-models", type=int, dest="max_models")
    common.add_argument("--max-seconds", type=float, dest="max_seconds")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="nlpuzzle", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[common], help="solve a puzzle file")
    s.add_argument("puzzle")
    s.add_argument("--show-theory", action="store_true", help="print the axioms too")
    a = sub.add_parser("ask", parents=[common], help="answer a question about a puzzle")
    a.add_argument("puzzle")
    a.add_argument("question")
    a.add_argument("--emit-proof", metavar="FILE", help="write the proof as Graphviz DOT")
    a.add_argument("--show-proof", action="store_true")
    m = sub.add_parser("models", parents=[common], help="list all models of a puzzle")
    m.add_argument("puzzle")
    r = sub.add_parser("parse", parents=[common], help="parse the sentences of a puzzle")
    r.add_argument("puzzle")
    r.add_argument("--dump-tree", action="store_true", help="print the chosen parse trees")
    c = sub.add_parser("check", parents=[common], help="solve every puzzle in a directory")
    c.add_argument("corpus", nargs="?", help="directory (default: the bundled corpus)")
    c.add_argument("--jobs", type=int, default=1)
    return p


def _options(args) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        opts.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    return opts


def _theory(args, opts):
    text = Path(args.puzzle).read_text(encoding="utf-8")
    return build_theory(text, opts["grammar"], opts["synonyms"], opts["gazetteer"], opts["domain"])


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_solve(args, opts) -> int:
    theory = _theory(args, opts)
    report = solve(theory, opts["max_models"])
    text = report.render()
    if args.show_theory:
        text = theory.render() + "\n\n" + text
    _emit(args, report.as_dict(), text)
    return 0 if report.verdict == SOLVED else 1


def cmd_ask(args, opts) -> int:
    theory = _theory(args, opts)
    q = args.question.strip()
    if q.lower().startswith("who "):
        wh = query_wh(theory, q, opts["max_models"])
        _emit(
            args,
            {"verdict": "ambiguous" if wh.ambiguous else "answered", "persons": list(wh.persons),
             "diagnostics": list(wh.diagnostics)},
            ", ".join(wh.persons) if wh.persons else "; ".join(wh.diagnostics) or "nobody",
        )
        return 1 if wh.ambiguous else 0
    answer = answer_question(theory, q, opts["max_seconds"])
    if args.emit_proof and answer.proof is not None:
        Path(args.emit_proof).write_text(export_proof_dot(answer.proof, theory.formulas), encoding="utf-8")
    _emit(args, answer.as_dict(), answer.render(args.show_proof))
    return 0 if answer.verdict != UNKNOWN else 1


def cmd_models(args, opts) -> int:
    theory = _theory(args, opts)
    models = enumerate_models(theory, opts["max_models"])
    if args.json:
        payload = {
            "model_count": len(models),
            "models": [
                {p: sorted(map(list, ext)) for p, ext in sorted(m.predicate_extensions.items())}
                for m in models
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for i, m in enumerate(models, 1):
            print(f"model {i}")
            print(m.describe())
        print(f"{len(models)} model(s)")
    return 0 if models else 1


def cmd_parse(args, opts) -> int:
    theory = _theory(args, opts)
    failed = False
    rows = []
    for sp in theory.parses:
        rows.append({"sentence": sp.index, "text": sp.text, "parses": sp.parse_count,
                     "formula": str(sp.formula) if sp.formula else None})
        failed |= sp.formula is None
        if not args.json:
            print(f"[{sp.index + 1}] {sp.text}")
            print(f"    {sp.formula if sp.formula else 'NO FORMULA'}  ({sp.parse_count} parse(s))")
            if args.dump_tree and sp.tree is not None:
                print(sp.tree.pretty(2))
    if args.json:
        print(json.dumps({"sentences": rows, "diagnostics": [d.as_dict() for d in theory.diagnostics]},
                         indent=2, sort_keys=True))
    else:
        for d in theory.diagnostics:
            print(d)
    return 1 if failed else 0


def cmd_check(args, opts) -> int:
    directory = Path(args.corpus) if args.corpus else corpus_dir()
    report = check_corpus(
        directory,
        jobs=args.jobs,
        grammar=opts["grammar"],
        synonyms=opts["synonyms"],
        gazetteer=opts["gazetteer"],
        domain=opts["domain"],
    )
    _emit(args, report.as_dict(), report.render())
    return 0 if report.total and report.solved == report.total else 1


COMMANDS = {"solve": cmd_solve, "ask": cmd_ask, "models": cmd_models, "parse": cmd_parse, "check": cmd_check}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        opts = _options(args)
        return COMMANDS[args.command](args, opts)
    except NoPersonsError as e:
        return _fail(args, "ner", str(e))
    except (QuestionError, UnknownPredicateError) as e:
        return _fail(args, "question", str(e))
    except (OSError, ValueError) as e:
        return _fail(args, "error", str(e))


def _fail(args, stage: str, message: str) -> int:
    if getattr(args, "json", False):
        print(json.dumps({"verdict": "failed", "diagnostics": [{"stage": stage, "message": message}]},
                         indent=2, sort_keys=True))
    else:
        print(f"error: {message}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
