"""Source units and spans.

A SourceUnit is the text a unit pipeline works on: the entry file with all
`#include` lines spliced in. Line origins map each merged line back to the
file/line it came from so every downstream span points at real source.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """A resolved source position: original file, 1-based line/column, length."""

    file: str
    line: int
    col: int
    length: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


@dataclass
class SourceUnit:
    """Merged source text plus the per-line origin map built during include expansion."""

    name: str
    text: str
    # origins[i] = (file, line) for merged line i+1; empty means "all lines from name"
    origins: list[tuple[str, int]] = field(default_factory=list)

    def origin_of(self, merged_line: int) -> tuple[str, int]:
        if 1 <= merged_line <= len(self.origins):
            return self.origins[merged_line - 1]
        return (self.name, merged_line)

    def span(self, merged_line: int, col: int, length: int = 0) -> Span:
        file, line = self.origin_of(merged_line)
        return Span(file, line, col, length)


def unit_from_text(name: str, text: str) -> SourceUnit:
    """Wrap plain text as a unit whose lines all originate in `name`."""
    n = text.count("\n") + 1
    return SourceUnit(name, text, [(name, i + 1) for i in range(n)])
