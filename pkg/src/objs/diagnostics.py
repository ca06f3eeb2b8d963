"""Diagnostics: codes, sink, duplicate-case debug check, and rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .source import Span

ERROR = "error"
WARNING = "warning"
NOTE = "note"

# Stable codes. Never renumber; add new ones at the end of a family.
E_SYNTAX = "OBJS-E-SYNTAX"
E_LEX = "OBJS-E-LEX"
E_UNTERMINATED = "OBJS-E-UNTERMINATED"
E_BAD_DECORATED = "OBJS-E-BAD-DECORATED"
E_ENCODING = "OBJS-E-ENCODING"
E_INCLUDE_NONE = "OBJS-E-INCLUDE-NONE"
E_INCLUDE_CYCLE = "OBJS-E-INCLUDE-CYCLE"
E_INCLUDE_READ = "OBJS-E-INCLUDE-READ"
E_INCLUDE_ESCAPE = "OBJS-E-INCLUDE-ESCAPE"
E_DIRECTIVE_PLACEMENT = "OBJS-E-DIRECTIVE-PLACEMENT"
E_DIRECTIVE_MALFORMED = "OBJS-E-DIRECTIVE-MALFORMED"
E_DUPLICATE_OVERLOAD = "OBJS-E-DUPLICATE-OVERLOAD"
E_UNKNOWN_EVENT = "OBJS-E-UNKNOWN-EVENT"
E_RESERVED_MAP = "OBJS-E-RESERVED-MAP"
E_NOT_ELIGIBLE = "OBJS-E-NOT-ELIGIBLE"
E_WILDCARD_POSITION = "OBJS-E-WILDCARD-POSITION"
E_ARITY_MISMATCH = "OBJS-E-ARITY-MISMATCH"
E_SLICE_ORDER = "OBJS-E-SLICE-ORDER"
E_PARENT_DEPTH = "OBJS-E-PARENT-DEPTH"
E_PARENT_PARAM = "OBJS-E-PARENT-PARAM"
E_PARENT_UNBOUND = "OBJS-E-PARENT-UNBOUND"
E_ZIP_LENGTH = "OBJS-E-ZIP-LENGTH"
E_NAMESPACE_EXIT = "OBJS-E-NAMESPACE-EXIT"
E_NAMESPACE_MEMBER = "OBJS-E-NAMESPACE-MEMBER"
E_ALIAS_COLLISION = "OBJS-E-ALIAS-COLLISION"
E_NO_OPERATOR = "OBJS-E-NO-OPERATOR"
E_NO_CAST = "OBJS-E-NO-CAST"
E_BAD_SLOT = "OBJS-E-BAD-SLOT"
E_BYREF_CALLSITE = "OBJS-E-BYREF-CALLSITE"
E_SEQ_ENDPOINTS = "OBJS-E-SEQ-ENDPOINTS"
E_RESERVED_PREFIX = "OBJS-E-RESERVED-PREFIX"
E_TYPE_NAME = "OBJS-E-TYPE-NAME"
E_USAGE = "OBJS-E-USAGE"
E_IO = "OBJS-E-IO"

W_NOMATCH = "OBJS-W-NOMATCH"
W_DUPLICATE_CASE = "OBJS-W-DUPLICATE-CASE"
W_DIV_ZERO = "OBJS-W-DIV-ZERO"
W_COUNT_TYPE = "OBJS-W-COUNT-TYPE"
W_NO_RETURN = "OBJS-W-NO-RETURN"
W_EVENT_TARGET = "OBJS-W-EVENT-TARGET"
W_BYREF_DYNAMIC = "OBJS-W-BYREF-DYNAMIC"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    span: Span | None = None
    related: tuple[Span, ...] = ()

    def sort_key(self) -> tuple:
        if self.span is None:
            return ("", 0, 0, self.code)
        return (self.span.file, self.span.line, self.span.col, self.code)


class CompileError(Exception):
    """Fatal, per-unit: compilation of the unit stops and nothing is emitted."""

    def __init__(self, diag: Diagnostic):
        super().__init__(diag.message)
        self.diag = diag


class DiagnosticSink:
    """Ordered collector shared by every stage of one build."""

    def __init__(self) -> None:
        self.diagnostics: list[Diagnostic] = []

    def emit(self, diag: Diagnostic) -> Diagnostic:
        self.diagnostics.append(diag)
        return diag

    def error(self, code: str, message: str, span: Span | None = None,
              related: tuple[Span, ...] = ()) -> Diagnostic:
        return self.emit(Diagnostic(ERROR, code, message, span, related))

    def warn(self, code: str, message: str, span: Span | None = None,
             related: tuple[Span, ...] = ()) -> Diagnostic:
        return self.emit(Diagnostic(WARNING, code, message, span, related))

    @property
    def has_errors(self) -> bool:
        return any(d.severity == ERROR for d in self.diagnostics)

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == ERROR]

    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == WARNING]

    def sorted(self) -> list[Diagnostic]:
        return sorted(self.diagnostics, key=Diagnostic.sort_key)


def render_text(diags: list[Diagnostic]) -> str:
    lines = []
    for d in sorted(diags, key=Diagnostic.sort_key):
        where = f"{d.span}: " if d.span is not None else ""
        lines.append(f"{where}{d.severity}: {d.message} [{d.code}]")
        for rel in d.related:
            lines.append(f"  {rel}: note: related location")
    return "\n".join(lines) + ("\n" if lines else "")


def check_duplicate_cases(switch_node, sink: DiagnosticSink) -> list[Diagnostic]:
    """Debug-mode analysis: two `case` heads with equal constant-folded values
    (or identical regex source+flags) get a warning pairing both spans."""
    from .nodes import BoolLit, NullLit, NumberLit, RegexLit, StringLit
    from .optimizer import OptimizeContext, fold_constants

    import copy

    seen: dict = {}
    out = []
    for case in switch_node.cases:
        if case.test is None:
            continue
        test = case.test
        if isinstance(test, RegexLit):
            key = ("regex", test.pattern, test.flags)
        else:
            folded = fold_constants(copy.deepcopy(test), OptimizeContext())
            if isinstance(folded, NumberLit):
                key = ("number", folded.value)
            elif isinstance(folded, StringLit):
                key = ("string", folded.value)
            elif isinstance(folded, BoolLit):
                key = ("boolean", folded.value)
            elif isinstance(folded, NullLit):
                key = ("null",)
            else:
                continue  # not statically comparable
        if key in seen:
            out.append(sink.warn(
                W_DUPLICATE_CASE,
                "a same case has been mentioned twice in this switch",
                case.test.span, related=(seen[key],)))
        else:
            seen[key] = case.test.span
    return out


def run_debug_checks(program, sink: DiagnosticSink) -> None:
    from .nodes import Switch, walk

    for node in walk(program):
        if isinstance(node, Switch):
            check_duplicate_cases(node, sink)


def render_json_lines(diags: list[Diagnostic]) -> str:
    out = []
    for d in sorted(diags, key=Diagnostic.sort_key):
        obj: dict = {"code": d.code, "severity": d.severity, "message": d.message}
        if d.span is not None:
            obj["file"] = d.span.file
            obj["line"] = d.span.line
            obj["col"] = d.span.col
        if d.related:
            obj["related"] = [
                {"file": s.file, "line": s.line, "col": s.col} for s in d.related
            ]
        out.append(json.dumps(obj, sort_keys=True))
    return "\n".join(out) + ("\n" if out else "")
