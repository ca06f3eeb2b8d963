"""objs: a source-to-source compiler for an extended ECMAScript dialect.

The dialect adds typified declarations and functions, operator/command/
reserved-word/event overloading, multiple-action patterns, array range
operators, JSON zip and parent/root references, namespaces, preprocessor
directives, and an optional optimization pipeline. Output is standard
ECMAScript plus a v3 source map, backed by a small runtime helper library.
"""

from .diagnostics import Diagnostic, DiagnosticSink, render_json_lines, render_text
from .pipeline import CompileOptions, CompileResult, compile_file, compile_text, compile_unit
from .source import SourceUnit, Span, unit_from_text

__version__ = "0.1.0"

__all__ = [
    "Diagnostic",
    "DiagnosticSink",
    "CompileOptions",
    "CompileResult",
    "compile_file",
    "compile_text",
    "compile_unit",
    "render_json_lines",
    "render_text",
    "SourceUnit",
    "Span",
    "unit_from_text",
    "__version__",
]
