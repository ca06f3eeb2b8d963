"""Per-unit compilation pipeline: expand includes, tokenize, collect
directives, build the registry, apply reserved-word translation, parse,
lower, optimize, emit.

Directive symbols can extend the lexer's operator table, so tokenization runs
twice: a scratch pass to discover directives, then the real pass with the
registry's symbolic operators active.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from . import diagnostics as dg
from .diagnostics import DiagnosticSink
from .emitter import EmittedUnit, emit
from .lexer import LexConfig, apply_reserved_map, tokenize
from .lowering import Lowerer, LoweredUnit
from .nodes import Program
from .optimizer import OptimizeContext, run_pipeline
from .parser import parse_program
from .preprocessor import (
    CompileOptions,
    OverloadRegistry,
    apply_pragmas,
    build_registry,
    collect_directives,
    expand_includes,
    expand_text,
)
from .source import SourceUnit, unit_from_text

__all__ = ["CompileOptions", "CompileResult", "compile_text", "compile_unit",
           "compile_file"]


@dataclass
class CompileResult:
    name: str = ""
    ok: bool = False
    emitted: EmittedUnit | None = None
    program: Program | None = None          # lowered (and optimized) AST
    parsed: Program | None = None           # pre-lowering AST
    options: CompileOptions | None = None
    sink: DiagnosticSink = field(default_factory=DiagnosticSink)

    @property
    def code(self) -> str | None:
        return self.emitted.code if self.emitted else None


def compile_unit(unit: SourceUnit, options: CompileOptions | None = None,
                 sink: DiagnosticSink | None = None,
                 out_name: str | None = None) -> CompileResult:
    options = options or CompileOptions()
    sink = sink if sink is not None else DiagnosticSink()
    result = CompileResult(name=unit.name, sink=sink, options=options)

    # pass 1 (scratch): discover directives so the real lex pass knows the
    # registered symbolic operators
    scratch = DiagnosticSink()
    pre_tokens = tokenize(unit, LexConfig(), scratch)
    pre_directives, _ = collect_directives(pre_tokens, scratch)
    pre_registry = build_registry(pre_directives, DiagnosticSink())

    cfg = LexConfig(extra_symbolic_ops=pre_registry.extra_symbolic_ops())
    tokens = tokenize(unit, cfg, sink)
    directives, stripped = collect_directives(tokens, sink)
    registry = build_registry(directives, sink)
    options = apply_pragmas(directives, options)
    result.options = options

    if options.translator_lang is not None:
        table = registry.reserved.get(options.translator_lang)
        if not table:
            sink.error(dg.E_RESERVED_MAP,
                       f"translator language '{options.translator_lang}' has no "
                       "reserved-word table")
        else:
            cfg = LexConfig(extra_symbolic_ops=registry.extra_symbolic_ops(),
                            reserved_map=dict(table),
                            active_lang=options.translator_lang)
            stripped = apply_reserved_map(stripped, cfg, sink)

    program = parse_program(unit, stripped, sink, registry.syntax())
    result.parsed = program
    if options.debug:
        dg.run_debug_checks(program, sink)
    if sink.has_errors:
        return result

    lowerer = Lowerer(unit, registry, options, sink)
    lowered: LoweredUnit = lowerer.lower_program(program)
    if sink.has_errors:
        return result

    opt_ctx = OptimizeContext(sink=sink,
                              protected=lowered.event_targets | lowered.handler_names)
    final = run_pipeline(lowered.program, optimize=options.optimize, ctx=opt_ctx)
    result.program = final
    if sink.has_errors:
        return result

    base = out_name or os.path.basename(unit.name)
    if base.endswith(".ojs"):
        base = base[:-4] + ".js"
    elif not base.endswith(".js"):
        base = base + ".js"
    try:
        result.emitted = emit(final, base, lowered.helpers_used,
                              with_map=options.emit_map)
    except ValueError as exc:
        sink.error(dg.E_SYNTAX, str(exc))
        return result
    result.ok = not sink.has_errors
    return result


def compile_text(text: str, name: str = "<text>",
                 options: CompileOptions | None = None,
                 sink: DiagnosticSink | None = None,
                 base_dir: str = ".") -> CompileResult:
    options = options or CompileOptions()
    sink = sink if sink is not None else DiagnosticSink()
    unit = expand_text(name, text, options, sink, base_dir)
    if sink.has_errors:
        result = CompileResult(name=name, sink=sink, options=options)
        return result
    return compile_unit(unit, options, sink)


def compile_file(path: str, options: CompileOptions | None = None,
                 sink: DiagnosticSink | None = None) -> CompileResult:
    options = options or CompileOptions()
    sink = sink if sink is not None else DiagnosticSink()
    unit = expand_includes(path, options, sink)
    if sink.has_errors:
        return CompileResult(name=path, sink=sink, options=options)
    return compile_unit(unit, options, sink)
