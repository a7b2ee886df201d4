"""Command-line interface.

Every command builds one JSON document (stable key order, no timings unless
``--timings``) and prints it, or a table derived from it with
``--format table``.  Exit codes: 0 ok, 1 usage, 2 input, 3 budget, 4
internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, corpus, oracle
from .arity import Analyzer, check_arit_hypotheses
from .config import RunConfig
from .errors import (
    AritylabError,
    BudgetExceeded,
    InvariantViolation,
    NotInvariantError,
    StructureError,
)
from .expansions import MODES
from .relations import graph_of, relation_of
from .structures import FAMILIES, classify, gen_family, parse_structure, serialize_structure

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET, EXIT_INTERNAL = 0, 1, 2, 3, 4

INFINITE_NOTE = "behaviour of infinite members (e.g. infinite groups) is not desk-testable"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# helpers


def load_input(ref: str):
    """A path, or ``corpus:<name>`` for a bundled structure."""
    if ref.startswith("corpus:"):
        try:
            return corpus.load(ref.split(":", 1)[1])
        except KeyError as exc:
            raise StructureError(str(exc.args[0])) from None
    try:
        text = Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise StructureError(f"cannot read {ref}: {exc.strerror}") from None
    try:
        return parse_structure(text)
    except StructureError as exc:
        raise StructureError(f"{ref}: {exc}") from None


def make_config(args) -> RunConfig:
    return RunConfig(
        aut_cap=args.aut_cap,
        max_tuples=args.max_tuples,
        max_m=getattr(args, "max_m", None),
        max_n=getattr(args, "max_n", None),
        oracle=getattr(args, "oracle", False),
        threads=args.threads,
        output=args.output,
    )


def envelope(command: str, config: RunConfig, structure=None) -> dict:
    doc = {"tool": "aritylab", "version": __version__, "command": command, "config": config.as_dict()}
    if structure is not None:
        doc["input"] = {"name": structure.name, "size": structure.size}
    return doc


def arity_section(an: Analyzer, config: RunConfig, timings: bool) -> dict:
    report = an.theory_arity(threads=config.threads)
    d = report.as_dict(timings)
    d["source"] = "engine"
    d["bound_holds"] = report.theory_arity is not None and report.theory_arity <= an.s
    return d


def oracle_theory_section(structure, max_m: int, engine_value) -> dict:
    caps = oracle.THEORY_CAPS
    if structure.size > caps.max_size or max_m > caps.max_m:
        return {"source": "oracle", "status": "skipped: exceeds oracle caps"}
    value = oracle.brute_theory_arity(structure, max_m)
    return {"source": "oracle", "status": "ok", "theory_arity": value, "agrees": value == engine_value}


def parse_sweep(text: str) -> range:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise UsageError(f"--sweep expects a..b, got {text!r}") from None
    if lo > hi:
        raise UsageError("--sweep: empty range")
    return range(lo, hi + 1)


def parse_params(items) -> dict[str, int]:
    out = {}
    for item in items or []:
        for part in item.split(","):
            if not part:
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise UsageError(f"--params expects name=value, got {part!r}")
            try:
                out[key.strip()] = int(value)
            except ValueError:
                raise UsageError(f"--params: {key} must be an integer") from None
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, config):
    s = load_input(args.file)
    doc = envelope("validate", config, s)
    doc["signature"] = [
        {"name": sym.name, "kind": sym.kind, "arity": sym.arity} for sym in s.signature
    ]
    warnings = []
    if s.operation is not None:
        report = classify(s)
        doc["classification"] = report.as_dict()
        if not report.is_associative:
            warnings.append(f"operation {report.operation} is not associative")
    else:
        doc["classification"] = None
    doc["warnings"] = warnings
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return doc


def cmd_arity(args, config):
    s = load_input(args.file)
    an = Analyzer(s, config)
    doc = envelope("arity", config, s)
    doc["automorphisms"] = an.aut.as_dict()
    doc["arity"] = arity_section(an, config, args.timings)
    if config.oracle:
        doc["oracle"] = oracle_theory_section(s, doc["arity"]["max_m"], doc["arity"]["theory_arity"])
    return doc


def cmd_rel_arity(args, config):
    s = load_input(args.file)
    if args.graph_of:
        rel = graph_of(s, args.graph_of, args.power)
    else:
        if args.power is not None:
            raise UsageError("--power applies to --graph-of only")
        if args.relation not in s.signature:
            raise StructureError(f"no symbol named {args.relation!r}")
        rel = relation_of(s, args.relation)
    an = Analyzer(s, config)
    doc = envelope("rel-arity", config, s)
    doc["relation"] = {"name": rel.name, "m": rel.m, "size": len(rel)}
    arity = an.relation_arity(rel)
    levels = []
    for n in range(0, rel.m + 1):
        v = an.is_n_ary_relation(rel, n)
        levels.append({"n": n, **v.as_dict()})
    doc["result"] = {"source": "engine", "relation_arity": arity, "levels": levels}
    if config.oracle:
        caps = oracle.ARITY_CAPS
        if s.size > caps.max_size or rel.m > caps.max_m:
            doc["oracle"] = {"source": "oracle", "status": "skipped: exceeds oracle caps"}
        else:
            value = oracle.brute_relation_arity(s, rel)
            doc["oracle"] = {"source": "oracle", "status": "ok", "relation_arity": value, "agrees": value == arity}
    if args.check_hypotheses:
        hyp = check_arit_hypotheses(rel, args.sol_bound, args.cofinite_slack)
        doc["hypotheses"] = {"source": "engine", **hyp.as_dict()}
    return doc


def cmd_expand(args, config):
    s = load_input(args.file)
    if args.mode == "finite-range":
        exp = MODES[args.mode](s, exclude_identity=not args.include_identity)
    else:
        if args.include_identity:
            raise UsageError("--include-identity applies to --mode finite-range only")
        exp = MODES[args.mode](s)
    if args.emit:
        Path(args.emit).write_text(serialize_structure(exp.combined), encoding="utf-8")
    # the emitted file must reparse to the same structure
    if parse_structure(serialize_structure(exp.combined)) != exp.combined:
        raise InvariantViolation("expansion does not round-trip through the file format")
    doc = envelope("expand", config, s)
    doc["expansion"] = exp.as_dict()
    doc["emitted"] = args.emit
    an = Analyzer(exp.combined, config)
    doc["automorphisms"] = {"order": an.aut.order}
    doc["arity"] = arity_section(an, config, args.timings)
    if config.oracle:
        doc["oracle"] = oracle_theory_section(exp.combined, doc["arity"]["max_m"], doc["arity"]["theory_arity"])
    return doc


def cmd_family(args, config):
    kind = args.kind
    if kind not in FAMILIES:
        raise UsageError(f"unknown family {kind!r}; choose from {', '.join(sorted(FAMILIES))}")
    _, pnames = FAMILIES[kind]
    given = parse_params(args.params)
    unknown = set(given) - set(pnames)
    if unknown:
        raise UsageError(f"family {kind} has no parameter {sorted(unknown)[0]!r}")
    free = [p for p in pnames if p not in given]
    if len(free) != 1:
        raise UsageError(f"family {kind}: give all parameters but one of {pnames} via --params")
    sweep = parse_sweep(args.sweep)
    rows = []
    for value in sweep:
        params = {**given, free[0]: value}
        s = gen_family(kind, *(params[p] for p in pnames))
        an = Analyzer(s, config)
        report = an.theory_arity(threads=config.threads)
        row = {
            "params": params,
            "name": s.name,
            "size": s.size,
            "aut_order": an.aut.order,
            "theory_arity": report.theory_arity if report.theory_arity is not None else "exceeds max_n",
            "exact": report.exact,
            "bound_holds": report.theory_arity is not None and report.theory_arity <= s.size,
        }
        if kind in ("flat-monoid", "finite-range"):
            exp = MODES["finite-range"](s)
            er = Analyzer(exp.combined, config).theory_arity(threads=config.threads)
            row["range_R"] = list(exp.range_R)
            row["expanded_arity"] = er.theory_arity if er.theory_arity is not None else "exceeds max_n"
        if config.oracle:
            row["oracle"] = oracle_theory_section(s, report.max_m, report.theory_arity)
        rows.append(row)
    doc = envelope("family", config)
    doc["family"] = {"kind": kind, "sweep": free[0], "fixed": given}
    doc["rows"] = rows
    doc["notes"] = [INFINITE_NOTE]
    return doc


def cmd_corpus(args, config):
    doc = envelope("corpus", config)
    doc["structures"] = [{"name": n, "size": corpus.load(n).size} for n in corpus.names()]
    return doc


# ---------------------------------------------------------------------------
# table rendering


def render_table(doc: dict) -> str:
    lines = [f"aritylab {doc['version']} -- {doc['command']}"]
    if "input" in doc:
        lines.append(f"structure {doc['input']['name']} (size {doc['input']['size']})")
    cmd = doc["command"]
    if cmd == "validate":
        c = doc["classification"]
        if c:
            lines.append(f"operation {c['operation']}: {c['kind']}, identity={c['identity']}, R={c['range_R']}")
        for w in doc["warnings"]:
            lines.append(f"warning: {w}")
    if "arity" in doc:
        a = doc["arity"]
        lines.append(f"{'n':>3} {'m':>3} {'pass':>5} {'sig':>8} {'orbits':>8}  counterexample")
        for c in a["checks"]:
            ce = "" if c["counterexample"] is None else f"{c['counterexample'][0]} vs {c['counterexample'][1]}"
            lines.append(
                f"{c['n']:>3} {c['m']:>3} {str(c['passed']):>5} {c['signature_classes']:>8} {c['orbit_classes']:>8}  {ce}"
            )
        lines.append(f"theory arity: {a['theory_arity']} (exact: {a['exact']})")
    if "result" in doc:
        lines.append(f"relation {doc['relation']['name']} (m={doc['relation']['m']}): arity {doc['result']['relation_arity']}")
    if "hypotheses" in doc:
        h = doc["hypotheses"]
        lines.append(
            f"condition (1): {h['condition1']} (completions {h['min_completions']}..{h['max_completions']}, F={h['sol_bound']})"
        )
        lines.append(f"condition (2): {h['condition2']} (missing {h['missing_per_coordinate']}, C={h['cofinite_slack']})")
    if "oracle" in doc:
        lines.append(f"oracle: {doc['oracle']}")
    if cmd == "family":
        extra = "expanded_arity" in (doc["rows"][0] if doc["rows"] else {})
        header = f"{'name':<20} {'size':>4} {'|Aut|':>6} {'arity':>6}" + (f" {'expanded':>9}" if extra else "")
        lines.append(header)
        for r in doc["rows"]:
            line = f"{r['name']:<20} {r['size']:>4} {r['aut_order']:>6} {str(r['theory_arity']):>6}"
            if extra:
                line += f" {str(r['expanded_arity']):>9}"
            lines.append(line)
        lines.extend(doc["notes"])
    if cmd == "corpus":
        lines.extend(f"{s['name']:<20} {s['size']:>4}" for s in doc["structures"])
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads for per-m sweeps")
    common.add_argument("--max-tuples", type=int, default=None, help="tuple-space cap (env ARITYLAB_MAX_TUPLES)")
    common.add_argument("--aut-cap", type=int, default=12, help="largest structure for automorphism search")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-stability)")

    def bounds(p):
        p.add_argument("--max-m", type=int, default=None, help="largest tuple length checked (default: size)")
        p.add_argument("--max-n", type=int, default=None, help="largest arity tried (default: size)")
        p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")

    parser = _Parser(prog="aritylab", description="Arity of theories of finite structures.")
    parser.add_argument("--version", action="version", version=f"aritylab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="parse and classify a structure file")
    p.add_argument("file")

    p = sub.add_parser("arity", parents=[common], help="theory arity report")
    p.add_argument("file")
    bounds(p)

    p = sub.add_parser("rel-arity", parents=[common], help="arity of one relation")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--graph-of", metavar="FN")
    g.add_argument("--relation", metavar="NAME")
    p.add_argument("--power", type=int, default=None, help="graph of y = x1*...*xn")
    p.add_argument("--check-hypotheses", action="store_true")
    p.add_argument("--sol-bound", type=int, default=1, help="F: max completions per substitution")
    p.add_argument("--cofinite-slack", type=int, default=0, help="C: max tuples missed by a projection")
    p.add_argument("--oracle", action="store_true")

    p = sub.add_parser("expand", parents=[common], help="build and verify an expansion")
    p.add_argument("file")
    p.add_argument("--mode", choices=sorted(MODES), required=True)
    p.add_argument("--include-identity", action="store_true", help="finite-range: groupoid variant over M^2")
    p.add_argument("--emit", metavar="PATH", help="write the expanded structure file")
    bounds(p)

    p = sub.add_parser("family", parents=[common], help="sweep a family of structures")
    p.add_argument("kind", help=", ".join(sorted(FAMILIES)))
    p.add_argument("--params", action="append", help="fixed parameters, e.g. r=2")
    p.add_argument("--sweep", required=True, help="range a..b of the free parameter")
    bounds(p)

    sub.add_parser("corpus", parents=[common], help="list bundled structures")
    return parser


COMMANDS = {
    "validate": cmd_validate,
    "arity": cmd_arity,
    "rel-arity": cmd_rel_arity,
    "expand": cmd_expand,
    "family": cmd_family,
    "corpus": cmd_corpus,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = make_config(args)
        doc = COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"aritylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"aritylab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"aritylab: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (StructureError, NotInvariantError) as exc:
        print(f"aritylab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # option values rejected by RunConfig
        print(f"aritylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AritylabError as exc:  # pragma: no cover
        print(f"aritylab: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    text = json.dumps(doc, indent=2) + "\n" if args.format == "json" else render_table(doc) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
