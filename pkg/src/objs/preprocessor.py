"""Preprocessor: `#include` expansion (textual, pre-parse), `#overload` and
`#pragma` directive collection, and overload-registry construction.

Includes are spliced line-wise into a merged SourceUnit whose origin map keeps
diagnostics pointing at the original files. Directives are parsed off the
token stream and must sit outside compound statements (brace depth zero).
"""

from __future__ import annotations

import fnmatch
import os
import re
from dataclasses import dataclass, field

from . import diagnostics as dg
from . import lexer as lx
from .diagnostics import CompileError, DiagnosticSink
from .parser import BP_ADD, BP_POSTFIX, BP_REL, BP_UNARY, OperatorSyntax
from .source import SourceUnit, Span

VALID_EVENTS = frozenset(
    ["assign", "decl", "new", "delete", "function_call", "method_call",
     "array_push", "array_pop"]
)

_INCLUDE_RE = re.compile(r'^\s*#include\s*"([^"]*)"\s*;?\s*$')


# --------------------------------------------------------------------------
# directives
# --------------------------------------------------------------------------

@dataclass
class OperatorOverload:
    spelling: str = ""
    fixity: str = "infix"  # prefix | postfix | infix
    is_self: bool = False
    priority: int | None = None
    ret_type: str = ""
    param_types: list = field(default_factory=list)
    slots: list = field(default_factory=list)  # decorated slot names, in order
    body: list = field(default_factory=list)   # token slice, braces excluded
    span: Span = None

    @property
    def arity(self) -> int:
        return len(self.param_types)


@dataclass
class CommandOverload:
    name: str = ""
    kind: str = "command"  # command | polyadic
    ret_type: str = ""
    param_types: list = field(default_factory=list)
    slots: list = field(default_factory=list)
    body: list = field(default_factory=list)
    span: Span = None


@dataclass
class FunctionOverload:
    base: str = ""
    aliases: list = field(default_factory=list)
    ret_type: str = ""
    param_types: list = field(default_factory=list)
    slots: list = field(default_factory=list)
    body: list = field(default_factory=list)
    span: Span = None


@dataclass
class EventOverload:
    events: list = field(default_factory=list)   # e.g. ["on_decl", "on_assign"]
    targets: list = field(default_factory=list)  # names, type names, keywords, "@all"
    body: list = field(default_factory=list)
    span: Span = None


@dataclass
class CastOverload:
    src: str = ""
    dst: str = ""
    body: list = field(default_factory=list)
    span: Span = None


@dataclass
class ReservedOverload:
    lang: str = ""
    word: str = ""
    replacement: str = ""  # token text or DROPPABLE
    span: Span = None


@dataclass
class Pragma:
    name: str = ""
    arg: str | None = None
    span: Span = None


@dataclass
class Directive:
    kind: str = ""
    payload: object = None
    span: Span = None


@dataclass
class CompileOptions:
    optimize: bool = False
    translator_lang: str | None = None
    debug: bool = False
    include_paths: list = field(default_factory=list)
    emit_runtime: bool = False
    emit_map: bool = True
    runtime_ns: str = "__objs_rt"
    sandbox_root: str | None = None
    diag_format: str = "text"


# --------------------------------------------------------------------------
# include expansion
# --------------------------------------------------------------------------

def resolve_include_pattern(pattern: str, base_dir: str, include_paths: list,
                            sink: DiagnosticSink, span: Span | None = None,
                            sandbox_root: str | None = None) -> list:
    """Resolve one include pattern to an ordered file list.

    Shapes: plain file, trailing `/` (whole folder), `/*`, `g*`, `*.js`.
    Matches are sorted lexicographically by filename for determinism. Roots
    are searched in order: the including file's folder, then include_paths.
    """
    roots = [base_dir] + list(include_paths)
    dir_part, name_part = os.path.split(pattern.rstrip("/")) if pattern.rstrip("/") else ("", "")
    wants_listing = pattern.endswith("/") or "*" in name_part

    for root in roots:
        if wants_listing:
            folder = os.path.join(root, pattern.rstrip("/")) if pattern.endswith("/") \
                else os.path.join(root, dir_part)
            if not os.path.isdir(folder):
                continue
            names = sorted(os.listdir(folder))
            if not pattern.endswith("/"):
                names = [n for n in names if fnmatch.fnmatchcase(n, name_part)]
            files = [os.path.join(folder, n) for n in names
                     if os.path.isfile(os.path.join(folder, n))]
            if files:
                files = [f for f in files
                         if _inside_sandbox(f, sandbox_root, sink, span)]
                return files
        else:
            candidate = os.path.join(root, pattern)
            if os.path.isfile(candidate):
                if not _inside_sandbox(candidate, sandbox_root, sink, span):
                    return []
                return [candidate]
    sink.error(dg.E_INCLUDE_NONE, f'include pattern "{pattern}" matched no files', span)
    return []


def _inside_sandbox(path: str, sandbox_root: str | None, sink: DiagnosticSink,
                    span: Span | None) -> bool:
    if sandbox_root is None:
        return True
    real = os.path.realpath(path)
    root = os.path.realpath(sandbox_root)
    if real == root or real.startswith(root + os.sep):
        return True
    sink.error(dg.E_INCLUDE_ESCAPE, f'include path "{path}" escapes the sandbox root', span)
    return False


def expand_includes(entry_path: str, options: CompileOptions,
                    sink: DiagnosticSink) -> SourceUnit:
    """Build the merged unit for an entry file, splicing `#include` lines."""
    name = entry_path
    lines: list[str] = []
    origins: list[tuple[str, int]] = []
    try:
        _expand_file(entry_path, options, sink, [], lines, origins)
    except CompileError:
        pass  # recorded in the sink; the unit still carries what was merged
    return SourceUnit(name, "\n".join(lines), origins)


def expand_text(name: str, text: str, options: CompileOptions, sink: DiagnosticSink,
                base_dir: str = ".") -> SourceUnit:
    lines: list[str] = []
    origins: list[tuple[str, int]] = []
    try:
        _expand_lines(name, text, base_dir, options, sink, [], lines, origins)
    except CompileError:
        pass
    return SourceUnit(name, "\n".join(lines), origins)


def _expand_file(path: str, options: CompileOptions, sink: DiagnosticSink,
                 stack: list, lines: list, origins: list) -> None:
    real = os.path.realpath(path)
    if real in stack:
        cycle = [os.path.basename(p) for p in stack[stack.index(real):]] + \
                [os.path.basename(real)]
        diag = sink.error(dg.E_INCLUDE_CYCLE,
                          "inclusion cycle: " + " -> ".join(cycle))
        raise CompileError(diag)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError:
        diag = sink.error(dg.E_ENCODING, f'"{path}" is not valid UTF-8')
        raise CompileError(diag)
    except OSError as exc:
        diag = sink.error(dg.E_INCLUDE_READ, f'cannot read "{path}": {exc.strerror}')
        raise CompileError(diag)
    stack.append(real)
    try:
        _expand_lines(path, text, os.path.dirname(path) or ".", options, sink,
                      stack, lines, origins)
    finally:
        stack.pop()


def _expand_lines(name: str, text: str, base_dir: str, options: CompileOptions,
                  sink: DiagnosticSink, stack: list, lines: list, origins: list) -> None:
    for lineno, line in enumerate(text.split("\n"), start=1):
        m = _INCLUDE_RE.match(line)
        if m is None:
            lines.append(line)
            origins.append((name, lineno))
            continue
        span = Span(name, lineno, line.index("#") + 1, len(line.strip()))
        targets = resolve_include_pattern(m.group(1), base_dir, options.include_paths,
                                          sink, span, options.sandbox_root)
        for target in targets:
            _expand_file(target, options, sink, stack, lines, origins)


# --------------------------------------------------------------------------
# directive collection
# --------------------------------------------------------------------------

class _DirectiveScanner:
    def __init__(self, tokens: list, sink: DiagnosticSink):
        self.toks = tokens
        self.sink = sink
        self.i = 0

    def peek(self, j: int = 0):
        k = min(self.i + j, len(self.toks) - 1)
        return self.toks[k]

    def next(self):
        tok = self.toks[self.i]
        if self.i < len(self.toks) - 1:
            self.i += 1
        return tok

    def fail(self, message: str, span=None):
        diag = self.sink.error(dg.E_DIRECTIVE_MALFORMED, message,
                               span or self.peek().span)
        raise CompileError(diag)

    def expect_word(self) -> str:
        tok = self.peek()
        if tok.kind in (lx.IDENTIFIER, lx.RESERVED):
            return self.next().lexeme
        self.fail(f"expected a name but found '{tok.lexeme or 'end of file'}'")

    def expect_op(self, lexeme: str):
        tok = self.peek()
        if tok.is_op(lexeme):
            return self.next()
        self.fail(f"expected '{lexeme}' but found '{tok.lexeme or 'end of file'}'")

    def symbolic_run(self) -> tuple[str, Span]:
        """Join adjacent operator tokens into one spelling: an unregistered
        custom operator lexes as several small tokens on the first pass."""
        tok = self.peek()
        if tok.kind not in (lx.SYMOP, lx.PUNCT) or tok.is_op("(", "{"):
            self.fail(f"expected an operator spelling but found '{tok.lexeme}'")
        first = self.next()
        spelling = first.lexeme
        end = first.offset + len(first.lexeme)
        while True:
            nxt = self.peek()
            if (nxt.kind in (lx.SYMOP, lx.PUNCT) and not nxt.is_op("(", "{")
                    and nxt.offset == end and not nxt.trivia):
                spelling += nxt.lexeme
                end += len(nxt.lexeme)
                self.next()
            else:
                break
        return spelling, first.span

    def param_list(self, first_slot: int = 1) -> tuple[list, list]:
        """`( Type @1, Type @2, ... )` -> (type names, slot names)."""
        self.expect_op("(")
        types, slots = [], []
        while not self.peek().is_op(")"):
            t = self.expect_word()
            slot_tok = self.peek()
            if slot_tok.kind != lx.DECORATED:
                self.fail(f"expected a decorated slot like @1 but found '{slot_tok.lexeme}'")
            self.next()
            types.append(t)
            slots.append(slot_tok.lexeme)
            if self.peek().is_op(","):
                self.next()
        self.expect_op(")")
        for n, slot in enumerate(slots, start=first_slot):
            if slot != f"@{n}":
                self.fail(f"parameter slots must be @1..@N in order; found '{slot}'")
        return types, slots

    def body_slice(self) -> list:
        open_tok = self.expect_op("{")
        depth = 1
        body = []
        while depth > 0:
            tok = self.peek()
            if tok.kind == lx.EOF:
                self.fail("unterminated overload body", open_tok.span)
            if tok.is_op("{"):
                depth += 1
            elif tok.is_op("}"):
                depth -= 1
                if depth == 0:
                    self.next()
                    break
            body.append(self.next())
        return body


def collect_directives(tokens: list, sink: DiagnosticSink) -> tuple[list, list]:
    """Split the stream into (directives, remaining tokens).

    Directives must appear outside compound statements; the check is brace
    depth at collection time.
    """
    directives: list[Directive] = []
    stripped: list = []
    sc = _DirectiveScanner(tokens, sink)
    depth = 0
    while True:
        tok = sc.peek()
        if tok.kind == lx.EOF:
            stripped.append(tok)
            return directives, stripped
        if tok.is_op("#"):
            if depth > 0:
                sink.error(dg.E_DIRECTIVE_PLACEMENT,
                           "directives must be declared outside compound statements",
                           tok.span)
            try:
                directives.append(_parse_directive(sc))
            except CompileError:
                _skip_to_next_hash_or_eof(sc)
            continue
        if tok.is_op("{"):
            depth += 1
        elif tok.is_op("}"):
            depth = max(0, depth - 1)
        stripped.append(sc.next())


def _skip_to_next_hash_or_eof(sc: _DirectiveScanner):
    # recover at the next directive or the next source line
    while sc.peek().kind != lx.EOF and not sc.peek().is_op("#") \
            and "\n" not in sc.peek().trivia:
        sc.next()


def _parse_directive(sc: _DirectiveScanner) -> Directive:
    hash_tok = sc.next()
    head = sc.expect_word()
    if head == "pragma":
        name = sc.expect_word()
        if name == "optimize":
            return Directive("Pragma", Pragma("optimize", span=hash_tok.span), hash_tok.span)
        if name == "translator":
            lang = sc.expect_word()
            return Directive("Pragma", Pragma("translator", lang, hash_tok.span), hash_tok.span)
        if name == "debug":
            return Directive("Pragma", Pragma("debug", span=hash_tok.span), hash_tok.span)
        sc.fail(f"unknown pragma '{name}'")
    if head == "include":
        tok = sc.peek()
        if tok.kind == lx.STRING:
            sc.next()
            return Directive("Include", tok.value, hash_tok.span)
        sc.fail("expected a quoted path after #include")
    if head != "overload":
        sc.fail(f"unknown directive '#{head}'")
    return _parse_overload(sc, hash_tok.span)


def _parse_overload(sc: _DirectiveScanner, span: Span) -> Directive:
    fixity = None
    is_self = False
    priority = None
    while True:
        tok = sc.peek()
        if tok.is_word("prefix", "postfix") and fixity is None:
            fixity = sc.next().lexeme
        elif tok.is_word("self") and not is_self:
            is_self = True
            sc.next()
        elif tok.kind == lx.NUMBER and priority is None:
            priority = int(sc.next().value)
        else:
            break

    family = sc.peek().lexeme
    if family == "reserved":
        sc.next()
        lang_kw = sc.expect_word()
        if lang_kw != "LANG":
            sc.fail(f"expected 'LANG' but found '{lang_kw}'")
        lang = sc.expect_word()
        word = sc.expect_word()
        as_kw = sc.expect_word()
        if as_kw != "as":
            sc.fail(f"expected 'as' but found '{as_kw}'")
        repl_tok = sc.peek()
        if repl_tok.kind in (lx.IDENTIFIER, lx.RESERVED):
            repl = sc.next().lexeme
        else:
            repl, _ = sc.symbolic_run()
        payload = ReservedOverload(lang, word, repl, span)
        return Directive("OverloadReserved", payload, span)

    if family == "typecasting":
        sc.next()
        src = sc.expect_word()
        to_kw = sc.expect_word()
        if to_kw != "to":
            sc.fail(f"expected 'to' but found '{to_kw}'")
        dst = sc.expect_word()
        body = sc.body_slice()
        return Directive("OverloadTypecast", CastOverload(src, dst, body, span), span)

    if family == "event":
        sc.next()
        events = [sc.expect_word()]
        while sc.peek().is_op(","):
            sc.next()
            events.append(sc.expect_word())
        to_kw = sc.expect_word()
        if to_kw != "to":
            sc.fail(f"expected 'to' but found '{to_kw}'")
        targets = [_event_target(sc)]
        while sc.peek().is_op(","):
            sc.next()
            targets.append(_event_target(sc))
        body = sc.body_slice()
        return Directive("OverloadEvent", EventOverload(events, targets, body, span), span)

    if family == "function":
        sc.next()
        ret = sc.expect_word()
        base = sc.expect_word()
        aliases = []
        if sc.peek().is_word("alias"):
            sc.next()
            aliases.append(sc.expect_word())
            while sc.peek().is_op(","):
                sc.next()
                aliases.append(sc.expect_word())
        types, slots = sc.param_list()
        body = sc.body_slice()
        payload = FunctionOverload(base, aliases, ret, types, slots, body, span)
        return Directive("OverloadFunction", payload, span)

    if family == "polyadic":
        sc.next()
        ret = sc.expect_word()
        head_types, head_slots = sc.param_list()
        name = sc.expect_word()
        tail_types, tail_slots = sc.param_list(first_slot=len(head_slots) + 1)
        types = head_types + tail_types
        slots = head_slots + tail_slots
        body = sc.body_slice()
        payload = CommandOverload(name, "polyadic", ret, types, slots, body, span)
        return Directive("OverloadPolyadic", payload, span)

    if family == "command":
        sc.next()
        ret = sc.expect_word()
        name = sc.expect_word()
        types, slots = sc.param_list()
        body = sc.body_slice()
        payload = CommandOverload(name, "command", ret, types, slots, body, span)
        return Directive("OverloadCommand", payload, span)

    # operator family; an explicit `operator` role word is optional
    if family == "operator":
        sc.next()
    ret = sc.expect_word()
    spelling, sp_span = sc.symbolic_run()
    if not lx.is_symbolic_spelling(spelling):
        sc.fail(f"'{spelling}' is not a legal symbolic operator spelling", sp_span)
    types, slots = sc.param_list()
    body = sc.body_slice()
    if fixity is None:
        fixity = "infix" if len(types) == 2 else "prefix"
    if len(types) not in (1, 2):
        sc.fail("operator overloads take one or two arguments", sp_span)
    if fixity in ("prefix", "postfix") and len(types) != 1:
        sc.fail(f"{fixity} operators take exactly one argument", sp_span)
    payload = OperatorOverload(spelling, fixity, is_self, priority, ret,
                               types, slots, body, span)
    return Directive("OverloadOperator", payload, span)


def _event_target(sc: _DirectiveScanner) -> str:
    tok = sc.peek()
    if tok.kind == lx.DECORATED and tok.lexeme == "@all":
        sc.next()
        return "@all"
    if tok.kind in (lx.IDENTIFIER, lx.RESERVED):
        return sc.next().lexeme
    sc.fail(f"expected an event target but found '{tok.lexeme}'")


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

@dataclass
class OverloadRegistry:
    operators: dict = field(default_factory=dict)   # (spelling, arity, fixity) -> [OperatorOverload]
    reversed_ops: dict = field(default_factory=dict)  # derived reverse spelling -> base spelling
    commands: dict = field(default_factory=dict)    # name -> [CommandOverload]
    functions: dict = field(default_factory=dict)   # base -> [FunctionOverload]
    aliases: dict = field(default_factory=dict)     # alias -> base
    events: list = field(default_factory=list)      # [EventOverload]
    casts: dict = field(default_factory=dict)       # (src, dst) -> CastOverload
    reserved: dict = field(default_factory=dict)    # lang -> {word: replacement}
    type_names: set = field(default_factory=set)

    def extra_symbolic_ops(self) -> frozenset:
        extra = set()
        for (spelling, _, _) in self.operators:
            if spelling not in lx.BUILTIN_OPS:
                extra.add(spelling)
        for spelling in self.reversed_ops:
            if spelling not in lx.BUILTIN_OPS:
                extra.add(spelling)
        return frozenset(extra)

    def syntax(self) -> OperatorSyntax:
        syn = OperatorSyntax()
        for (spelling, arity, fixity), entries in self.operators.items():
            priority = next((e.priority for e in entries if e.priority is not None), None)
            if fixity == "infix":
                if spelling not in lx.BUILTIN_OPS:
                    syn.infix[spelling] = priority if priority is not None else BP_ADD
            elif fixity == "prefix":
                if spelling not in lx.BUILTIN_OPS or spelling not in ("!", "~", "+", "-", "++", "--"):
                    syn.prefix.setdefault(spelling, priority if priority is not None else BP_UNARY)
            else:
                syn.postfix[spelling] = priority if priority is not None else BP_POSTFIX
        for spelling, base in self.reversed_ops.items():
            if spelling not in lx.BUILTIN_OPS:
                syn.infix.setdefault(spelling, BP_ADD)
        for name, entries in self.commands.items():
            syn.words[name] = entries[0].kind
        syn.type_names = set(self.type_names)
        return syn

    def operator_entries(self) -> list:
        out = []
        for entries in self.operators.values():
            out.extend(entries)
        out.sort(key=lambda e: (e.span.file, e.span.line, e.span.col))
        return out

    def find_operator(self, spelling: str, fixity: str, arg_types: list):
        entries = self.operators.get((spelling, len(arg_types), fixity), [])
        for entry in entries:
            if _types_match(entry.param_types, arg_types):
                return entry
        return None

    def find_command(self, name: str, arg_types: list):
        for entry in self.commands.get(name, []):
            if _types_match(entry.param_types, arg_types):
                return entry
        return None


def _types_match(params: list, args: list) -> bool:
    if len(params) != len(args):
        return False
    for p, a in zip(params, args):
        if p == "generic":
            continue
        if p != a:
            return False
    return True


_BUILTIN_CANON = {name.lower(): name for name in
                  ("Number", "String", "Boolean", "Array", "Object", "Function", "JSON")}


def canon_type(name: str) -> str:
    """Builtin datatype names are recognized case-insensitively (the dialect
    writes both `Boolean` and `boolean`); user names pass through."""
    return _BUILTIN_CANON.get(name.lower(), name)


def build_registry(directives: list, sink: DiagnosticSink) -> OverloadRegistry:
    reg = OverloadRegistry()

    def check_type(name: str, span) -> str:
        name = canon_type(name)
        if "$" in name or not name:
            sink.error(dg.E_TYPE_NAME, f"'{name}' is not a legal datatype name", span)
        return name

    for d in directives:
        p = d.payload
        if d.kind == "OverloadOperator":
            p.ret_type = check_type(p.ret_type, d.span)
            p.param_types = [check_type(t, d.span) for t in p.param_types]
            key = (p.spelling, p.arity, p.fixity)
            entries = reg.operators.setdefault(key, [])
            dup = next((e for e in entries if e.param_types == p.param_types), None)
            if dup is not None:
                sink.error(dg.E_DUPLICATE_OVERLOAD,
                           f"operator '{p.spelling}' is already overloaded for "
                           f"({', '.join(p.param_types)})",
                           d.span, related=(dup.span,))
                continue
            entries.append(p)
            reg.type_names.update(t for t in p.param_types + [p.ret_type]
                                  if t not in ("generic",))
            if p.is_self and p.spelling.endswith("="):
                reg.reversed_ops["=" + p.spelling[:-1]] = p.spelling
        elif d.kind in ("OverloadCommand", "OverloadPolyadic"):
            p.ret_type = check_type(p.ret_type, d.span)
            p.param_types = [check_type(t, d.span) for t in p.param_types]
            entries = reg.commands.setdefault(p.name, [])
            dup = next((e for e in entries if e.param_types == p.param_types), None)
            if dup is not None:
                sink.error(dg.E_DUPLICATE_OVERLOAD,
                           f"'{p.name}' is already overloaded for "
                           f"({', '.join(p.param_types)})",
                           d.span, related=(dup.span,))
                continue
            entries.append(p)
            reg.type_names.update(t for t in p.param_types + [p.ret_type]
                                  if t not in ("generic",))
        elif d.kind == "OverloadFunction":
            p.ret_type = check_type(p.ret_type, d.span)
            p.param_types = [check_type(t, d.span) for t in p.param_types]
            entries = reg.functions.setdefault(p.base, [])
            dup = next((e for e in entries if e.param_types == p.param_types), None)
            if dup is not None:
                sink.error(dg.E_DUPLICATE_OVERLOAD,
                           f"function '{p.base}' is already overloaded for "
                           f"({', '.join(p.param_types)})",
                           d.span, related=(dup.span,))
                continue
            entries.append(p)
            for alias in p.aliases:
                existing = reg.aliases.get(alias)
                if existing is not None and existing != p.base:
                    sink.error(dg.E_DUPLICATE_OVERLOAD,
                               f"alias '{alias}' already points at '{existing}'", d.span)
                    continue
                reg.aliases[alias] = p.base
            reg.type_names.update(t for t in p.param_types + [p.ret_type]
                                  if t not in ("generic",))
        elif d.kind == "OverloadEvent":
            ok = True
            for name in p.events:
                base = name
                for prefix in ("on_before_", "on_"):
                    if name.startswith(prefix):
                        base = name[len(prefix):]
                        break
                else:
                    base = None
                if base not in VALID_EVENTS:
                    sink.error(dg.E_UNKNOWN_EVENT,
                               f"'{name}' is not an overloadable event", d.span)
                    ok = False
            if ok:
                reg.events.append(p)
        elif d.kind == "OverloadTypecast":
            p.src = check_type(p.src, d.span)
            p.dst = check_type(p.dst, d.span)
            key = (p.src, p.dst)
            if key in reg.casts:
                sink.error(dg.E_DUPLICATE_OVERLOAD,
                           f"typecasting {p.src} to {p.dst} is already registered",
                           d.span, related=(reg.casts[key].span,))
                continue
            reg.casts[key] = p
            reg.type_names.update([p.src, p.dst])
        elif d.kind == "OverloadReserved":
            if not lx.validate_replacement(p.replacement):
                sink.error(dg.E_RESERVED_MAP,
                           f"'{p.replacement}' is not a reserved word or operator",
                           d.span)
                continue
            table = reg.reserved.setdefault(p.lang, {})
            if p.word in table and table[p.word] != p.replacement:
                sink.error(dg.E_DUPLICATE_OVERLOAD,
                           f"'{p.word}' already maps to '{table[p.word]}' for {p.lang}",
                           d.span)
                continue
            table[p.word] = p.replacement

    for entries in reg.operators.values():
        entries.sort(key=lambda e: (e.span.file, e.span.line, e.span.col))
    for entries in reg.commands.values():
        entries.sort(key=lambda e: (e.span.file, e.span.line, e.span.col))
    for entries in reg.functions.values():
        entries.sort(key=lambda e: (e.span.file, e.span.line, e.span.col))
    reg.events.sort(key=lambda e: (e.span.file, e.span.line, e.span.col))
    reg.type_names = {t for t in reg.type_names if t not in ("generic",)}
    return reg


def apply_pragmas(directives: list, options: CompileOptions) -> CompileOptions:
    """In-file pragmas override build flags, per unit."""
    for d in directives:
        if d.kind != "Pragma":
            continue
        if d.payload.name == "optimize":
            options.optimize = True
        elif d.payload.name == "translator":
            options.translator_lang = d.payload.arg
        elif d.payload.name == "debug":
            options.debug = True
    return options
