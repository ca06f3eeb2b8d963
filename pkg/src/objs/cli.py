"""Batch driver: `objs build <inputs...>`.

Exit codes: 0 success, 1 errors present, 2 usage error. Outputs one `.js`
(plus `.js.map` unless --no-map) per input unit; `--emit-runtime` writes the
helper library once. Options come from objs.config.json, then flags, then
in-file pragmas, each layer overriding the last.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from dataclasses import dataclass, field

from . import diagnostics as dg
from .diagnostics import DiagnosticSink, render_json_lines, render_text
from .emitter import map_to_json
from .pipeline import CompileOptions, compile_file
from .runtime import runtime_source

EXIT_OK = 0
EXIT_ERRORS = 1
EXIT_USAGE = 2

CONFIG_NAME = "objs.config.json"


@dataclass
class BuildRequest:
    inputs: list = field(default_factory=list)
    out_dir: str = "."
    options: CompileOptions = field(default_factory=CompileOptions)
    emit_runtime: bool = False
    emit_map: bool = True


class UsageError(Exception):
    pass


def _arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="objs",
        description="Compile extended-dialect .ojs (or plain .js) files to "
                    "standard ECMAScript plus source maps.")
    sub = parser.add_subparsers(dest="command")
    build = sub.add_parser("build", help="compile one or more units")
    build.add_argument("inputs", nargs="*", help="input files or globs")
    build.add_argument("-o", "--out", default=None, metavar="DIR",
                       help="output directory (default: alongside each input)")
    build.add_argument("--optimize", action="store_true",
                       help="enable the optimization pipeline "
                            "(same as `#pragma optimize`)")
    build.add_argument("--debug", action="store_true",
                       help="enable debug-mode analyses (duplicate case check)")
    build.add_argument("--lang", default=None, metavar="XX",
                       help="activate a reserved-word translation table "
                            "(same as `#pragma translator XX`)")
    build.add_argument("-I", dest="include_paths", action="append", default=[],
                       metavar="PATH", help="additional include search path")
    build.add_argument("--emit-runtime", action="store_true",
                       help="also write the runtime helper library")
    build.add_argument("--no-map", action="store_true",
                       help="do not write .js.map sidecar files")
    build.add_argument("--diag-format", choices=["text", "json"], default="text")
    return parser


def load_config(start_dir: str) -> dict:
    path = os.path.join(start_dir, CONFIG_NAME)
    if not os.path.isfile(path):
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {CONFIG_NAME}: {exc}")


def parse_args(argv: list, cwd: str = ".") -> BuildRequest:
    parser = _arg_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            raise UsageError("invalid arguments")
        raise
    if ns.command != "build":
        raise UsageError("expected the 'build' subcommand")
    config = load_config(cwd)

    inputs: list[str] = []
    for pattern in ns.inputs:
        matches = sorted(glob.glob(pattern))
        if matches:
            inputs.extend(matches)
        else:
            inputs.append(pattern)
    if not inputs:
        raise UsageError("no input files")

    out_dir = ns.out if ns.out is not None else config.get("out", None)
    options = CompileOptions(
        optimize=ns.optimize or bool(config.get("optimize", False)),
        debug=ns.debug or bool(config.get("debug", False)),
        translator_lang=ns.lang if ns.lang is not None else config.get("lang"),
        include_paths=list(config.get("include_paths", [])) + list(ns.include_paths),
        emit_runtime=ns.emit_runtime,
        emit_map=not ns.no_map,
        diag_format=ns.diag_format,
    )
    request = BuildRequest(inputs=inputs, out_dir=out_dir if out_dir is not None else "",
                           options=options, emit_runtime=ns.emit_runtime,
                           emit_map=not ns.no_map)
    for path in inputs:
        resolved_out = request.out_dir or os.path.dirname(path) or "."
        if os.path.realpath(resolved_out) == os.path.realpath(path):
            raise UsageError(f"output directory equals input file path: {path}")
    return request


def _out_paths(request: BuildRequest, input_path: str) -> tuple[str, str]:
    base = os.path.basename(input_path)
    if base.endswith(".ojs"):
        base = base[:-4] + ".js"
    elif not base.endswith(".js"):
        base += ".js"
    out_dir = request.out_dir or os.path.dirname(input_path) or "."
    return os.path.join(out_dir, base), os.path.join(out_dir, base + ".map")


def build(request: BuildRequest, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    all_diags = []
    any_errors = False
    out_dir = request.out_dir
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)

    for input_path in request.inputs:
        sink = DiagnosticSink()
        # per-unit option copy: in-file pragmas override flags for that unit only
        options = CompileOptions(
            optimize=request.options.optimize,
            debug=request.options.debug,
            translator_lang=request.options.translator_lang,
            include_paths=list(request.options.include_paths),
            emit_runtime=request.options.emit_runtime,
            emit_map=request.options.emit_map,
            diag_format=request.options.diag_format,
        )
        out_path, map_path = _out_paths(request, input_path)
        if os.path.realpath(out_path) == os.path.realpath(input_path):
            sink.error(dg.E_USAGE, f"refusing to overwrite input '{input_path}'")
            result_ok = False
        else:
            result = compile_file(input_path, options, sink)
            result_ok = result.ok
        all_diags.extend(sink.diagnostics)
        if not result_ok:
            any_errors = True
            continue  # outputs withheld for failing units; others still written
        code = result.emitted.code
        if request.emit_map and result.emitted.source_map is not None:
            code += f"//# sourceMappingURL={os.path.basename(map_path)}\n"
            with open(map_path, "w", encoding="utf-8") as fh:
                fh.write(map_to_json(result.emitted.source_map))
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(code)

    if request.emit_runtime:
        runtime_path = os.path.join(request.out_dir or ".", "objs_runtime.js")
        with open(runtime_path, "w", encoding="utf-8") as fh:
            fh.write(runtime_source())

    if all_diags:
        rendered = (render_json_lines(all_diags)
                    if request.options.diag_format == "json"
                    else render_text(all_diags))
        stderr.write(rendered)
    return EXIT_ERRORS if any_errors else EXIT_OK


def main(argv: list | None = None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    try:
        request = parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"objs: {exc}\n")
        return EXIT_USAGE
    except SystemExit:
        return EXIT_OK
    return build(request)


if __name__ == "__main__":
    sys.exit(main())
