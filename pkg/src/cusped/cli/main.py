"""``cusped`` command-line entry point.

Exit codes: 0 success, 1 spec or usage error, 2 analysis error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from ..errors import ConfigurationError, CuspedError, ExportError
from ..export import export_graph
from ..sampling import set_threads
from .runner import build_pair, build_space, run_spec
from .spec import SpecError, parse_spec

EXIT_OK, EXIT_SPEC, EXIT_ANALYSIS, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("build", "delta", "distortion", "perfection", "extend", "export", "run")
ONLY = {"delta": "delta", "distortion": "distortion", "perfection": "perfection", "extend": "extension"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SPEC, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cusped", description="Finite truncations of cusped spaces and their coarse invariants.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "build": "build the truncation and write its size summary",
        "delta": "run only the delta analyses of the run spec",
        "distortion": "run only the horoball distortion analyses of the run spec",
        "perfection": "run only the perfection analyses of the run spec",
        "extend": "run only the extension analyses of the run spec",
        "export": "write the built graph as DOT or CSV",
        "run": "run every analysis in the run spec",
    }
    for name in COMMANDS:
        s = sub.add_parser(name, help=helps[name])
        s.add_argument("--spec", required=True, help="run spec (.json or .toml)")
        s.add_argument("--out", help="output directory (default: the run spec's output.dir)")
        s.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
        choices = ("dot", "csv") if name == "export" else ("json", "csv")
        s.add_argument("--format", choices=choices, help="output format")
    return p


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _fail(code: int, msg: str) -> int:
    print(f"cusped: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.threads < 1:
        return _fail(EXIT_SPEC, "--threads must be at least 1")
    set_threads(args.threads)
    try:
        spec = parse_spec(args.spec)
    except SpecError as exc:
        for e in exc.errors:
            print(f"spec error: {e}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read spec {args.spec}: {exc.strerror or exc}")
    out = Path(args.out or spec.output.dir)

    try:
        if args.command in ("build", "export"):
            return _build_or_export(args, spec, out)
        report, timings, tables, code = run_spec(spec, ONLY.get(args.command))
        _write(out / "report.json", canonical_json(report))
        _write(out / "timings.json", canonical_json(timings))
        if args.format == "csv":
            for name, rows in sorted(tables.items()):
                _write(out / name, _csv_text(rows))
        if args.command == "run" and spec.output.graph_format and code == EXIT_OK:
            X = build_space(build_pair(spec.pair), spec.truncation)
            _export(X, spec.output.graph_format, out)
        for a in report["analyses"]:
            if a["status"] != "ok":
                print(f"analysis {a['type']} failed: {a['error']['message']}", file=sys.stderr)
        if report["build"]["status"] != "ok":
            print(f"build failed: {report['build']['error']['message']}", file=sys.stderr)
        return code
    except ConfigurationError as exc:
        return _fail(EXIT_SPEC, f"spec error: {exc}")
    except ExportError as exc:
        return _fail(EXIT_IO, str(exc))
    except CuspedError as exc:
        return _fail(EXIT_ANALYSIS, f"{type(exc).__name__}: {exc}")


def _export(X, fmt: str, out: Path) -> list[Path]:
    return export_graph(X, fmt, out / "graph.dot" if fmt == "dot" else out)


def _build_or_export(args, spec, out: Path) -> int:
    try:
        pair = build_pair(spec.pair)
    except CuspedError as exc:
        return _fail(EXIT_SPEC, f"pair: {exc}")
    X = build_space(pair, spec.truncation)
    if args.command == "export":
        fmt = args.format or spec.output.graph_format or "dot"
        for p in _export(X, fmt, out):
            print(p)
        return EXIT_OK
    summary = X.summary()
    if args.format == "csv":
        rows = [["key", "value"]] + [[k, json.dumps(v, sort_keys=True)] for k, v in sorted(summary.items())]
        _write(out / "build.csv", _csv_text(rows))
    else:
        _write(out / "build.json", canonical_json(summary))
    print(canonical_json(summary), end="")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
