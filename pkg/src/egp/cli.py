"""Command-line frontend.

Exit codes separate three failure families so shell pipelines can
branch on them:

* 0 - the requested analysis ran and its verdict, if any, is positive
* 1 - the analysis ran but the verdict is negative (connected instead
  of separated, invalid instrument, no admissible set, incompatible
  data, replay failures)
* 2 - the query itself is malformed (bad flags, unknown nodes,
  overlapping sets)
* 3 - the input could not be read (missing file, parse error, bad CSV)

Every subcommand accepts ``--json`` to emit the same report envelope
the HTTP service returns, byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import report as rpt
from .dsl import ParseError
from .errors import CorruptCorpus, DataError, EgpError
from .graph import CausalGraph
from .sem import Dataset

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_QUERY = 2
EXIT_INPUT = 3


class _InputFailure(Exception):
    """Wraps file-level problems so main() can map them to exit 3."""

    def __init__(self, message: str):
        super().__init__(message)


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _InputFailure(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_graph(path: str) -> CausalGraph:
    text = _read_text(path)
    try:
        parsed = rpt.parse_source(text)
    except ParseError as exc:
        raise _InputFailure(
            f"{path}:{exc.span.line}:{exc.span.column}: {exc.kind} error: {exc}"
        ) from exc
    for w in parsed.warnings:
        print(f"warning: {path}: {w.display()}", file=sys.stderr)
    return parsed.graph


def _load_dataset(path: str) -> Dataset:
    text = _read_text(path)
    try:
        return Dataset.from_csv(text, source=path)
    except DataError as exc:
        raise _InputFailure(f"{path}: {exc}") from exc


def _split(value: str | None) -> list[str]:
    """Comma-separated flag value to a clean name list."""
    if not value:
        return []
    return [part.strip() for part in value.split(",") if part.strip()]


def _parse_do(value: str) -> tuple[str, float]:
    node, sep, raw = value.partition("=")
    if not sep or not node.strip():
        raise argparse.ArgumentTypeError(
            f"expected NODE=VALUE, got {value!r}"
        )
    try:
        return node.strip(), float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value in {value!r} is not a number")


def _parse_coef(value: str) -> tuple[tuple[str, str], float]:
    lhs, sep, raw = value.partition("=")
    src, arrow, dst = lhs.partition("->")
    if not sep or not arrow or not src.strip() or not dst.strip():
        raise argparse.ArgumentTypeError(
            f"expected SRC->DST=VALUE, got {value!r}"
        )
    try:
        return (src.strip(), dst.strip()), float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value in {value!r} is not a number")


def _parse_floats(value: str) -> list[float]:
    try:
        return [float(p) for p in value.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def _emit(args, report: dict, text_lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(rpt.encode_report(report))
    else:
        for line in text_lines:
            print(line)


def _fmt_path(p: dict) -> str:
    return f"{p['status']:<7} {p['display']}"


# -- subcommand bodies: each returns the process exit code --------------


def _cmd_check(args) -> int:
    text = _read_text(args.dag)
    try:
        report = rpt.parse_report(text)
    except ParseError as exc:
        raise _InputFailure(
            f"{args.dag}:{exc.span.line}:{exc.span.column}: {exc.kind} error: {exc}"
        ) from exc
    for w in report["result"]["warnings"]:
        print(f"warning: {args.dag}: {w}", file=sys.stderr)
    if args.json:
        sys.stdout.write(rpt.encode_report(report))
    else:
        sys.stdout.write(report["result"]["canonical"])
    return EXIT_OK


def _cmd_dsep(args) -> int:
    g = _load_graph(args.dag)
    report = rpt.dsep_report(
        g, _split(args.x), _split(args.y), _split(args.given), max_paths=args.max_paths
    )
    res = report["result"]
    lines = ["separated" if res["separated"] else "connected"]
    if res["paths"] is not None:
        lines += [_fmt_path(p) for p in res["paths"]]
        if res["truncated"]:
            lines.append(f"... truncated at {args.max_paths} paths")
    _emit(args, report, lines)
    return EXIT_OK if res["separated"] else EXIT_NEGATIVE


def _cmd_paths(args) -> int:
    g = _load_graph(args.dag)
    report = rpt.paths_report(g, args.x, args.y, _split(args.given), max_paths=args.max_paths)
    res = report["result"]
    lines = [_fmt_path(p) for p in res["paths"]]
    if res["truncated"]:
        lines.append(f"... truncated at {args.max_paths} paths")
    if not lines:
        lines = ["no paths"]
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_adjust(args) -> int:
    g = _load_graph(args.dag)
    if args.z is not None:
        report = rpt.backdoor_report(g, _split(args.z), args.exposure, args.outcome)
        res = report["result"]
        if res["admissible"]:
            lines = [f"admissible: {{{', '.join(res['z'])}}}"]
        else:
            lines = [f"not admissible: {res['violated']}"]
            if res["witness"]:
                lines.append(f"witness: {res['witness']['display']}")
        _emit(args, report, lines)
        return EXIT_OK if res["admissible"] else EXIT_NEGATIVE

    report = rpt.adjustment_report(
        g, args.exposure, args.outcome, max_size=args.max_size, max_count=args.max_sets
    )
    res = report["result"]
    lines = [f"{{{', '.join(s)}}}" for s in res["sets"]]
    if not lines:
        lines = ["no admissible set"]
    lines.append(f"search: {res['marker']}")
    _emit(args, report, lines)
    return EXIT_OK if res["sets"] else EXIT_NEGATIVE


def _cmd_iv(args) -> int:
    g = _load_graph(args.dag)
    report = rpt.iv_report(g, args.instrument, _split(args.given), args.exposure, args.outcome)
    res = report["result"]
    lines = [
        f"instrument {res['instrument']} for {res['exposure']} -> {res['outcome']}"
        + (f" given {{{', '.join(res['given'])}}}" if res["given"] else ""),
        f"relevant: {'yes' if res['relevant'] else 'no'}",
        f"excluded_exogenous: {'yes' if res['excluded_exogenous'] else 'no'}",
        f"verdict: {'valid' if res['valid'] else 'invalid'}",
    ]
    if res["witness"]:
        lines.append(f"witness: {res['witness']['display']}")
    _emit(args, report, lines)
    return EXIT_OK if res["valid"] else EXIT_NEGATIVE


def _cmd_implications(args) -> int:
    g = _load_graph(args.dag)
    report = rpt.implications_report(g, max_cond=args.max_cond)
    stmts = report["result"]["statements"]
    lines = [s["display"] for s in stmts] or ["no testable implications"]
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_factorize(args) -> int:
    g = _load_graph(args.dag)
    report = rpt.factorize_report(g, _split(args.do))
    _emit(args, report, [report["result"]["rendered"]])
    return EXIT_OK


def _cmd_simulate(args) -> int:
    g = _load_graph(args.dag)
    coefficients = dict(args.coef) if args.coef else None
    report = rpt.simulate_report(
        g, args.n, seed=args.seed, do=args.do, coefficients=coefficients
    )
    csv_text = report["result"]["csv"]
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        except OSError as exc:
            raise _InputFailure(f"cannot write {args.out}: {exc.strerror or exc}") from exc
        if args.json:
            sys.stdout.write(rpt.encode_report(report))
        else:
            print(f"wrote {report['result']['n']} rows to {args.out}")
    elif args.json:
        sys.stdout.write(rpt.encode_report(report))
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    g = _load_graph(args.dag)
    data = _load_dataset(args.data)
    report = rpt.estimate_report(
        g,
        data,
        args.method,
        d=args.exposure,
        y=args.outcome,
        adjust_set=_split(args.adjust),
        instrument=args.instrument,
        given=_split(args.given),
    )
    res = report["result"]
    line = (
        f"{res['method']}: {res['exposure']} -> {res['outcome']} = "
        f"{res['estimate']:.6f} (se {res['stderr']:.6f}, n {res['n']})"
    )
    lines = [line] + [f"warning: {w}" for w in res["warnings"]]
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_testfit(args) -> int:
    g = _load_graph(args.dag)
    data = _load_dataset(args.data)
    report = rpt.testfit_report(
        g, data, max_cond=args.max_cond, alpha=args.alpha, correction=args.correction
    )
    res = report["result"]
    lines = []
    for row in res["tests"]:
        flag = "REJECT" if row["reject_adjusted"] else "ok"
        lines.append(
            f"{flag:<7} {row['statement']['display']}  p={row['p_value']:.4g}"
        )
    if res["untestable"]:
        lines.append("no testable implications; vacuously compatible")
    lines.append(
        f"verdict: {'compatible' if res['compatible'] else 'incompatible'} "
        f"(alpha {res['alpha']}, {res['correction']})"
    )
    _emit(args, report, lines)
    return EXIT_OK if res["compatible"] else EXIT_NEGATIVE


def _cmd_sensitivity(args) -> int:
    g = _load_graph(args.dag)
    coefficients = dict(args.coef) if args.coef else None
    report = rpt.sensitivity_report(
        g,
        z=_split(args.z),
        strengths=args.strengths,
        d=args.exposure,
        y=args.outcome,
        n=args.n,
        seed=args.seed,
        coefficients=coefficients,
    )
    res = report["result"]
    lines = [
        f"confounder {res['confounder']} on {res['exposure']} -> {res['outcome']}, "
        f"adjusting for {{{', '.join(res['z'])}}}, n={res['n']}"
    ]
    lines.append(f"{'strength':>9}  {'estimate':>9}  {'true':>9}  {'bias':>9}")
    for row in res["rows"]:
        lines.append(
            f"{row['strength']:>9.3f}  {row['estimate']:>9.4f}  "
            f"{row['true_effect']:>9.4f}  {row['bias']:>9.4f}"
        )
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_corpus(args) -> int:
    if args.replay:
        report = rpt.corpus_replay_report()
        res = report["result"]
        lines = []
        for r in res["results"]:
            status = "ok" if r["passed"] else "FAIL"
            lines.append(f"{status:<5} {r['id']} ({len(r['checks'])} checks)")
        lines.append(
            f"replayed {res['total']} entries, {res['failures']} failing"
        )
        _emit(args, report, lines)
        return EXIT_OK if res["passed"] else EXIT_NEGATIVE
    if args.id:
        report = rpt.corpus_entry_report(args.id)
        res = report["result"]
        lines = [f"{res['id']}: {res['provenance']}", "", res["dag_source"].rstrip()]
        _emit(args, report, lines)
        return EXIT_OK
    report = rpt.corpus_report()
    lines = [
        f"{e['id']:<22} {e['provenance'].splitlines()[0]}"
        for e in report["result"]["entries"]
    ]
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# -- parser wiring -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egp",
        description="Graph-based identification workbench for causal questions.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, help_: str, func, dag: bool = True):
        p = sub.add_parser(name, help=help_, description=help_)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="emit the JSON report envelope")
        if dag:
            p.add_argument("dag", help="path to a .dag file")
        return p

    p = add("check", "Parse a graph file and print its canonical form.", _cmd_check)

    p = add("dsep", "Test whether two node sets are separated.", _cmd_dsep)
    p.add_argument("--x", required=True, help="first node set, comma separated")
    p.add_argument("--y", required=True, help="second node set, comma separated")
    p.add_argument("--given", default="", help="conditioning set, comma separated")
    p.add_argument("--max-paths", type=int, default=64, dest="max_paths")

    p = add("paths", "List simple paths between two nodes with open/blocked status.", _cmd_paths)
    p.add_argument("--x", required=True, help="path start node")
    p.add_argument("--y", required=True, help="path end node")
    p.add_argument("--given", default="", help="conditioning set, comma separated")
    p.add_argument("--max-paths", type=int, default=64, dest="max_paths")

    p = add("adjust", "Search admissible adjustment sets, or test one with --z.", _cmd_adjust)
    p.add_argument("--z", default=None, help="candidate set to test, comma separated")
    p.add_argument("--exposure", default=None)
    p.add_argument("--outcome", default=None)
    p.add_argument("--max-size", type=int, default=6, dest="max_size")
    p.add_argument("--max-sets", type=int, default=64, dest="max_sets")

    p = add("iv", "Validate a candidate (conditional) instrument.", _cmd_iv)
    p.add_argument("--instrument", required=True)
    p.add_argument("--given", default="", help="conditioning set, comma separated")
    p.add_argument("--exposure", default=None)
    p.add_argument("--outcome", default=None)

    p = add("implications", "List the graph's testable independence implications.", _cmd_implications)
    p.add_argument("--max-cond", type=int, default=3, dest="max_cond")

    p = add("factorize", "Print the (truncated) factorization of the graph.", _cmd_factorize)
    p.add_argument("--do", default="", help="intervened nodes, comma separated")

    p = add("simulate", "Draw a linear-Gaussian sample that respects the graph.", _cmd_simulate)
    p.add_argument("--n", type=int, required=True, help="number of rows")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--do", type=_parse_do, default=None, metavar="NODE=VALUE")
    p.add_argument(
        "--coef",
        type=_parse_coef,
        action="append",
        metavar="SRC->DST=VALUE",
        help="pin a structural coefficient (repeatable)",
    )
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")

    p = add("estimate", "Estimate the exposure effect from a CSV dataset.", _cmd_estimate)
    p.add_argument("--data", required=True, help="path to a CSV file")
    p.add_argument("--method", required=True, choices=["naive", "adjust", "iv"])
    p.add_argument("--adjust", default="", help="adjustment set, comma separated")
    p.add_argument("--instrument", default=None)
    p.add_argument("--given", default="", help="iv conditioning set, comma separated")
    p.add_argument("--exposure", default=None)
    p.add_argument("--outcome", default=None)

    p = add("testfit", "Test a dataset against the graph's implications.", _cmd_testfit)
    p.add_argument("--data", required=True, help="path to a CSV file")
    p.add_argument("--max-cond", type=int, default=3, dest="max_cond")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--correction", choices=["holm", "none"], default="holm")

    p = add("sensitivity", "Sweep a synthetic confounder across strengths.", _cmd_sensitivity)
    p.add_argument("--z", default="", help="adjustment set, comma separated")
    p.add_argument(
        "--strengths",
        type=_parse_floats,
        required=True,
        metavar="S1,S2,...",
        help="confounder strengths to sweep; use --strengths=-0.5,0,0.5 for negatives",
    )
    p.add_argument("--exposure", default=None)
    p.add_argument("--outcome", default=None)
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--coef",
        type=_parse_coef,
        action="append",
        metavar="SRC->DST=VALUE",
        help="pin a structural coefficient (repeatable)",
    )

    p = add("corpus", "List, show, or replay the bundled example graphs.", _cmd_corpus, dag=False)
    p.add_argument("--id", default=None, help="show one entry")
    p.add_argument("--replay", action="store_true", help="re-run all recorded expectations")

    p = add("serve", "Run the HTTP service.", _cmd_serve, dag=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputFailure as exc:
        print(f"egp: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CorruptCorpus, DataError) as exc:
        print(f"egp: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EgpError as exc:
        print(f"egp: {exc}", file=sys.stderr)
        return EXIT_QUERY


if __name__ == "__main__":
    sys.exit(main())
