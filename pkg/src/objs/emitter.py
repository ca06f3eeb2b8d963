"""Final emission: deterministic pretty-printing plus a v3 source map.

The map carries one segment per statement head, pointing back through the
include-expansion origin map at the original files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .nodes import Program, is_standard, walk
from .printer import Printer

_B64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/"


def _vlq_encode(value: int) -> str:
    """Base64 VLQ as used by source map v3."""
    vlq = (abs(value) << 1) | (1 if value < 0 else 0)
    out = []
    while True:
        digit = vlq & 0x1F
        vlq >>= 5
        if vlq:
            digit |= 0x20
        out.append(_B64[digit])
        if not vlq:
            break
    return "".join(out)


@dataclass
class EmittedUnit:
    code: str = ""
    source_map: dict | None = None
    helpers_used: set = field(default_factory=set)
    mappings: list = field(default_factory=list)  # (gen_line, gen_col, file, line, col)


def build_source_map(file_name: str, mappings: list) -> dict:
    sources: list[str] = []
    index: dict[str, int] = {}
    for (_, _, src, _, _) in mappings:
        if src not in index:
            index[src] = len(sources)
            sources.append(src)
    segments_by_line: dict[int, list] = {}
    for (gl, gc, src, line, col) in sorted(mappings):
        segments_by_line.setdefault(gl, []).append((gc, index[src], line - 1,
                                                    max(0, col - 1)))
    max_line = max(segments_by_line) if segments_by_line else 0
    prev_src = prev_line = prev_col = 0
    encoded_lines = []
    for gl in range(1, max_line + 1):
        segs = []
        prev_gc = 0
        for (gc, src_i, line0, col0) in segments_by_line.get(gl, []):
            seg = (_vlq_encode(gc - prev_gc) + _vlq_encode(src_i - prev_src)
                   + _vlq_encode(line0 - prev_line) + _vlq_encode(col0 - prev_col))
            segs.append(seg)
            prev_gc, prev_src, prev_line, prev_col = gc, src_i, line0, col0
        encoded_lines.append(",".join(segs))
    return {
        "version": 3,
        "file": file_name,
        "sources": sources,
        "names": [],
        "mappings": ";".join(encoded_lines),
    }


def decode_mappings(map_obj: dict) -> list:
    """Inverse of build_source_map, for tests: -> [(gl, gc, source, line, col)]."""
    out = []
    rev = {c: i for i, c in enumerate(_B64)}
    prev_src = prev_line = prev_col = 0
    for line_no, line in enumerate(map_obj["mappings"].split(";"), start=1):
        prev_gc = 0
        for seg in line.split(","):
            if not seg:
                continue
            values = []
            shift = 0
            current = 0
            for c in seg:
                digit = rev[c]
                current |= (digit & 0x1F) << shift
                if digit & 0x20:
                    shift += 5
                else:
                    values.append((current >> 1) * (-1 if current & 1 else 1))
                    shift = 0
                    current = 0
            gc, src_d, line_d, col_d = values
            prev_gc += gc
            prev_src += src_d
            prev_line += line_d
            prev_col += col_d
            out.append((line_no, prev_gc, map_obj["sources"][prev_src],
                        prev_line + 1, prev_col + 1))
    return out


def emit(program: Program, out_name: str = "out.js",
         helpers_used: set | None = None, with_map: bool = True) -> EmittedUnit:
    """Emit standard code; the program must be fully lowered."""
    extended = [type(n).__name__ for n in walk(program) if not is_standard(n)]
    if extended:
        raise ValueError(f"emit: non-standard nodes remain: {sorted(set(extended))}")
    printer = Printer()
    code = printer.print_program(program)
    mappings = [(gl, gc, span.file, span.line, span.col)
                for (gl, gc, span) in printer.mappings]
    source_map = build_source_map(out_name, mappings) if with_map else None
    return EmittedUnit(code=code, source_map=source_map,
                       helpers_used=set(helpers_used or ()), mappings=mappings)


def map_to_json(map_obj: dict) -> str:
    return json.dumps(map_obj, sort_keys=True)
