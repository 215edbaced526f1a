"""Command-line driver: check, flatten, run, verify-flat.

Exit codes: 0 success, 1 semantic failure (type error, failed verification,
contract violation, compile-time error), 2 usage, parse or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .deep import run_deep
from .errors import ContraitError, ContractViolation, EvalFault, MetaError, ParseError, show_value
from .metaeval import eval_program
from .nodes import Program
from .parser import parse_expr, parse_program
from .printer import pretty
from .runtime import CHECKED, UNCHECKED, eval_expr
from .typecheck import check_program, check_run_expr
from .verifier import PASS, VerifyConfig, reverify_flattened, verify_program_sources

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_DIAGNOSTIC = {
    "type": "object",
    "required": ["file", "line", "col", "code", "message"],
    "properties": {
        "file": {"type": ["string", "null"]},
        "line": {"type": ["integer", "null"]},
        "col": {"type": ["integer", "null"]},
        "code": {"type": "string"},
        "message": {"type": "string"},
    },
}

_METHOD_REPORT = {
    "type": "object",
    "required": ["method", "status", "inputs", "scenarios", "counterexample", "warnings"],
    "properties": {
        "method": {"type": "string"},
        "status": {"enum": ["Pass", "Fail", "Vacuous", "Inconclusive"]},
        "inputs": {"type": "integer"},
        "scenarios": {"type": "integer"},
        "counterexample": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["kind", "inputs", "predicate", "bindings", "trace", "choices"],
                    "properties": {
                        "kind": {"enum": ["Ensures", "CalleeRequires", "RuntimeFault"]},
                        "inputs": {"type": "object", "additionalProperties": {"type": "string"}},
                        "predicate": {"type": ["string", "null"]},
                        "callee": {"type": ["string", "null"]},
                        "bindings": {"type": "object", "additionalProperties": {"type": "string"}},
                        "trace": {"type": "array", "items": {"type": "string"}},
                        "choices": {"type": "array", "items": {"type": "integer"}},
                        "message": {"type": "string"},
                    },
                },
            ]
        },
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}

# Every command prints one object of this shape with --json.
JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "ok", "exit_code", "diagnostics", "warnings", "error"],
    "properties": {
        "command": {"enum": ["check", "flatten", "run", "verify-flat"]},
        "ok": {"type": "boolean"},
        "exit_code": {"enum": [0, 1, 2]},
        "diagnostics": {"type": "array", "items": _DIAGNOSTIC},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "reports": {
            "type": "object",
            "additionalProperties": {"type": "object", "additionalProperties": _METHOD_REPORT},
        },
        "classes": {"type": "object", "additionalProperties": {"type": "string"}},
        "value": {"type": "string"},
        "error": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["kind", "message"],
                    "properties": {
                        "kind": {"type": "string"},
                        "message": {"type": "string"},
                        "meta_stack": {"type": "array", "items": {"type": "string"}},
                        "details": {"type": "object"},
                    },
                },
            ]
        },
    },
}


@dataclass
class Outcome:
    command: str
    exit_code: int = EXIT_OK
    diagnostics: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    reports: Optional[dict] = None
    classes: Optional[dict] = None
    value: Optional[str] = None
    error: Optional[dict] = None
    text: list = field(default_factory=list)  # stdout
    notes: list = field(default_factory=list)  # stderr, before the error line

    def fail(self, code: int, kind: str, message: str, **extra) -> "Outcome":
        self.exit_code = code
        self.error = {"kind": kind, "message": message, **extra}
        return self

    def to_dict(self) -> dict:
        d = {
            "command": self.command,
            "ok": self.exit_code == EXIT_OK,
            "exit_code": self.exit_code,
            "diagnostics": self.diagnostics,
            "warnings": self.warnings,
            "error": self.error,
        }
        for key in ("reports", "classes", "value"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        return d


class _Stop(Exception):
    """Ends a command early; the outcome already records why."""


def parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None
    if lo_i > hi_i:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo_i, hi_i


def positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="contrait", description="Contract-carrying trait compiler.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, verify: bool = False):
        p.add_argument("files", nargs="*", help=".trait source files (concatenated in order)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if verify:
            p.add_argument("--int-domain", type=parse_range, default=(-4, 4), metavar="LO..HI")
            p.add_argument("--havoc-domain", type=parse_range, default=(-16, 16), metavar="LO..HI")
            p.add_argument("--max-scenarios", type=positive_int, default=512, metavar="N")

    common(sub.add_parser("check", help="typecheck and verify source traits"), verify=True)
    fl = sub.add_parser("flatten", help="print the flattened classes")
    common(fl)
    fl.add_argument("--emit", metavar="NAME", help="print only this class")
    run = sub.add_parser("run", help="evaluate an expression against the classes")
    common(run)
    run.add_argument("-e", dest="expr", required=True, metavar="EXPR")
    mode = run.add_mutually_exclusive_group()
    mode.add_argument("--checked", dest="checked", action="store_true", default=True)
    mode.add_argument("--unchecked", dest="checked", action="store_false")
    common(sub.add_parser("verify-flat", help="re-verify every materialized class"), verify=True)
    return ap


def verify_config(args) -> VerifyConfig:
    return VerifyConfig(int_domain=args.int_domain, havoc_domain=args.havoc_domain,
                        max_scenarios=args.max_scenarios)


# ---------------------------------------------------------------- pipeline

def load(paths, out: Outcome) -> Program:
    program = Program(())
    for path in paths:
        try:
            with open(path, encoding="utf-8") as fh:
                source = fh.read()
        except OSError as exc:
            out.fail(EXIT_USAGE, "IOError", f"{path}: {exc.strerror or exc}")
            raise _Stop() from None
        try:
            program = program + parse_program(source, path)
        except ParseError as exc:
            out.diagnostics.append({
                "file": exc.span.file, "line": exc.span.start_line, "col": exc.span.start_col,
                "code": "ParseError", "message": exc.message,
            })
            out.fail(EXIT_USAGE, "ParseError", str(exc))
            raise _Stop() from None
    errors = check_program(program)
    if errors:
        out.diagnostics.extend(e.to_dict() for e in errors)
        out.notes.extend(str(e) for e in errors)
        out.fail(EXIT_FAIL, "TypeError", f"{len(errors)} type error(s)")
        raise _Stop()
    return program


def meta(program: Program, out: Outcome):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            env = eval_program(program)
        except MetaError as exc:
            _record_warnings(caught, out)
            cause = exc.cause
            extra = {"meta_stack": exc.stack_text()}
            if hasattr(cause, "details"):
                extra["details"] = cause.details()
            elif isinstance(cause, ContractViolation):
                extra["details"] = cause.to_dict()
            kind = getattr(cause, "kind", type(cause).__name__)
            if isinstance(cause, ContractViolation):
                kind = f"{cause.kind}Violation"
            out.fail(EXIT_FAIL, kind, str(exc), **extra)
            details = extra.get("details", {})
            if details.get("left"):
                out.notes += [f"left:  {details['left']}", f"right: {details['right']}"]
            raise _Stop() from None
    _record_warnings(caught, out)
    return env


def _record_warnings(caught, out: Outcome):
    for w in caught:
        if str(w.message) not in out.warnings:
            out.warnings.append(str(w.message))


def _report_text(label: str, reports: dict, out: Outcome):
    for name in sorted(reports):
        out.text.append(f"{label} {name}")
        rep = reports[name]
        for mname in sorted(rep.methods):
            r = rep.methods[mname]
            out.text.append(f"  {mname:<20} {r.status}")
            if r.counterexample:
                out.text.extend("    " + line for line in r.counterexample.describe().splitlines())
            out.text.extend(f"    warning: {w}" for w in r.warnings)


def _finish_reports(label: str, reports: dict, out: Outcome):
    out.reports = {name: reports[name].to_dict() for name in sorted(reports)}
    _report_text(label, reports, out)
    bad = sorted(f"{n}.{m}" for n, rep in reports.items()
                 for m, r in rep.methods.items() if r.status != PASS)
    if bad:
        out.fail(EXIT_FAIL, "VerificationFailed", "not verified: " + ", ".join(bad))
    else:
        out.text.append(f"all {len(reports)} {label}(s) verified")


# ---------------------------------------------------------------- commands

def cmd_check(args, out: Outcome):
    program = load(args.files, out)
    _finish_reports("trait", verify_program_sources(program, verify_config(args)), out)


def cmd_flatten(args, out: Outcome):
    env = meta(load(args.files, out), out)
    classes = env.classes
    if args.emit is not None:
        if args.emit not in classes:
            out.fail(EXIT_USAGE, "UnknownClass", f"no class named {args.emit}")
            raise _Stop()
        classes = {args.emit: classes[args.emit]}
    out.classes = {name: pretty(c.body) for name, c in sorted(classes.items())}
    for name, text in out.classes.items():
        out.text.append(f"class {name}: {text.rstrip()}")


def cmd_run(args, out: Outcome):
    env = meta(load(args.files, out), out)
    try:
        e = parse_expr(args.expr, "<expr>")
    except ParseError as exc:
        out.fail(EXIT_USAGE, "ParseError", str(exc))
        raise _Stop() from None
    errors = check_run_expr(e, env.classes)
    if errors:
        out.diagnostics.extend(err.to_dict() for err in errors)
        out.notes.extend(str(err) for err in errors)
        out.fail(EXIT_FAIL, "TypeError", f"{len(errors)} type error(s)")
        raise _Stop()
    try:
        value = run_deep(eval_expr, e, env.classes, CHECKED if args.checked else UNCHECKED)
    except ContractViolation as exc:
        out.fail(EXIT_FAIL, f"{exc.kind}Violation", str(exc), details=exc.to_dict())
        raise _Stop() from None
    except EvalFault as exc:
        out.fail(EXIT_FAIL, exc.kind, f"runtime error: {exc}")
        raise _Stop() from None
    out.value = show_value(value)
    out.text.append(out.value)


def cmd_verify_flat(args, out: Outcome):
    env = meta(load(args.files, out), out)
    _finish_reports("class", reverify_flattened(env, verify_config(args)), out)


COMMANDS = {"check": cmd_check, "flatten": cmd_flatten, "run": cmd_run, "verify-flat": cmd_verify_flat}


def execute(argv=None) -> Outcome:
    args = build_parser().parse_args(argv)
    out = Outcome(args.command)
    try:
        COMMANDS[args.command](args, out)
    except _Stop:
        pass
    except ContraitError as exc:  # anything not classified above
        out.fail(EXIT_FAIL, type(exc).__name__, str(exc))
    out.json = args.json  # type: ignore[attr-defined]
    return out


def main(argv=None) -> int:
    out = execute(argv)
    if out.json:
        print(json.dumps(out.to_dict(), indent=2, sort_keys=True))
    else:
        for line in out.text:
            print(line)
        for w in out.warnings:
            print(f"warning: {w}", file=sys.stderr)
        for line in out.notes:
            print(line, file=sys.stderr)
        if out.error:
            print(f"error: {out.error['message']}", file=sys.stderr)
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
