"""Tokenizer for the extended dialect.

Lossless: every token records the trivia (whitespace/comments) that precedes
it, so concatenating trivia+lexeme over the stream reproduces the input text
exactly. Symbolic operators are matched by maximal munch over the builtin
table merged with dynamically registered spellings.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import diagnostics as dg
from .diagnostics import DiagnosticSink
from .source import SourceUnit, Span

IDENTIFIER = "identifier"
NUMBER = "number"
STRING = "string"
REGEX = "regex-literal"
PUNCT = "punctuator"
SYMOP = "symbolic-op"
DECORATED = "decorated"
RESERVED = "reserved"
EOF = "eof"

# Standard keywords carry the `reserved` kind. Dialect statement words
# (ifchain, namespace, use, exit, as, of) stay identifiers and are recognized
# contextually so standard programs may keep using them as names.
RESERVED_WORDS = frozenset(
    """break case catch class const continue debugger default delete do else
    extends finally for function if in instanceof let new return super switch
    this throw try typeof var void while with yield true false null
    """.split()
)

# Structural single characters; everything operator-like is a symbolic-op.
STRUCTURAL = frozenset("()[]{};,.#\\:")

# Builtin operator spellings. Dialect additions: array range/push/pop ops,
# fork, reverse self-operators, conditional ?-family, sequence `...`.
BUILTIN_OPS = (
    "<-->", ">--<", "?===", ">>>=",
    "-->", "<--", "===", "!==", "?==", "**=", "<<=", ">>=", ">>>", "...", "?<=", "?>=",
    "][", "[]", "|<", "=+", "=-", "=*", "=/", "?:", "??", "?<", "?>",
    "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "<<", ">>", "=>", "++", "--", "**",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?",
)


@dataclass
class Token:
    kind: str
    lexeme: str
    span: Span
    offset: int = 0          # char offset in the merged unit text
    trivia: str = ""         # whitespace/comments preceding this token
    value: object = None     # decoded string value / numeric value / (pattern, flags)

    def is_op(self, *lexemes: str) -> bool:
        return self.kind in (PUNCT, SYMOP) and self.lexeme in lexemes

    def is_word(self, *words: str) -> bool:
        return self.kind in (IDENTIFIER, RESERVED) and self.lexeme in words

    def __repr__(self) -> str:  # compact, test-friendly
        return f"Token({self.kind}, {self.lexeme!r})"


@dataclass
class LexConfig:
    extra_symbolic_ops: frozenset[str] = frozenset()
    reserved_map: dict[str, str] = field(default_factory=dict)  # word -> replacement or DROPPABLE
    active_lang: str | None = None


DROPPABLE = "DROPPABLE"


def is_symbolic_spelling(text: str) -> bool:
    """True for legal custom operator spellings: non-empty, no alphanumerics,
    none of the excluded punctuators (comma, full stop, parentheses, quotes,
    semicolon, hyphen) and no characters the grammar reserves structurally."""
    if not text:
        return False
    excluded = set(",.()'\"`;-") | set("{}[]@#\\") | {" ", "\t", "\n", "\r"}
    return all((not c.isalnum()) and c not in excluded for c in text)


def _ident_start(c: str) -> bool:
    return c.isascii() and (c.isalpha() or c in "_$") or ("À" <= c <= "ÿ" and c not in "×÷")


def _is_digit(c: str) -> bool:
    return c.isascii() and c.isdigit()


def _ident_part(c: str) -> bool:
    return _ident_start(c) or _is_digit(c)


class _OpTable:
    """First-char indexed operator spellings, longest first."""

    def __init__(self, extra: frozenset[str]):
        spellings = set(BUILTIN_OPS) | set(extra)
        self.by_first: dict[str, list[str]] = {}
        for s in spellings:
            self.by_first.setdefault(s[0], []).append(s)
        for lst in self.by_first.values():
            lst.sort(key=lambda s: (-len(s), s))

    def match(self, text: str, i: int) -> str | None:
        for cand in self.by_first.get(text[i], ()):
            if text.startswith(cand, i):
                return cand
        return None


class Lexer:
    def __init__(self, unit: SourceUnit, cfg: LexConfig | None = None,
                 sink: DiagnosticSink | None = None):
        self.unit = unit
        self.text = unit.text
        self.cfg = cfg or LexConfig()
        self.sink = sink or DiagnosticSink()
        self.ops = _OpTable(self.cfg.extra_symbolic_ops)
        self.i = 0
        self.line = 1
        self.col = 1
        self.square_depth = 0
        self.tokens: list[Token] = []

    # -- low-level -----------------------------------------------------

    def _peek(self, j: int = 0) -> str:
        k = self.i + j
        return self.text[k] if k < len(self.text) else ""

    def _advance(self, n: int = 1) -> str:
        s = self.text[self.i:self.i + n]
        for c in s:
            if c == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.i += n
        return s

    def _span(self, line: int, col: int, length: int) -> Span:
        return self.unit.span(line, col, length)

    # -- trivia ---------------------------------------------------------

    def _skip_trivia(self) -> str:
        start = self.i
        while self.i < len(self.text):
            c = self._peek()
            if c in " \t\r\n\v\f":
                self._advance()
            elif c == "/" and self._peek(1) == "/":
                while self.i < len(self.text) and self._peek() != "\n":
                    self._advance()
            elif c == "/" and self._peek(1) == "*":
                line, col = self.line, self.col
                self._advance(2)
                while self.i < len(self.text) and not (self._peek() == "*" and self._peek(1) == "/"):
                    self._advance()
                if self.i >= len(self.text):
                    self.sink.error(dg.E_UNTERMINATED, "unterminated block comment",
                                    self._span(line, col, 2))
                else:
                    self._advance(2)
            else:
                break
        return self.text[start:self.i]

    # -- token scanners ---------------------------------------------------

    def _scan_string(self) -> tuple[str, str, object]:
        quote = self._peek()
        line, col = self.line, self.col
        start = self.i
        self._advance()
        value_chars: list[str] = []
        while self.i < len(self.text):
            c = self._peek()
            if c == quote:
                self._advance()
                return STRING, self.text[start:self.i], "".join(value_chars)
            if c == "\\":
                self._advance()
                esc = self._advance() if self.i < len(self.text) else ""
                value_chars.append(_decode_escape(esc, self))
                continue
            if c == "\n" and quote != "`":
                break
            value_chars.append(c)
            self._advance()
        self.sink.error(dg.E_UNTERMINATED, "unterminated string literal",
                        self._span(line, col, self.i - start))
        return STRING, self.text[start:self.i], "".join(value_chars)

    def _scan_number(self) -> tuple[str, str, object]:
        start = self.i
        t = self.text
        for marker, digits, base in (("xX", "0123456789abcdefABCDEF", 16),
                                     ("bB", "01", 2), ("oO", "01234567", 8)):
            if (self._peek() == "0" and self._peek(1) != "" and self._peek(1) in marker
                    and self._peek(2) != "" and self._peek(2) in digits):
                self._advance(2)
                while self.i < len(t) and t[self.i] in digits:
                    self._advance()
                lex = t[start:self.i]
                return NUMBER, lex, float(int(lex[2:], base))
        while self.i < len(t) and _is_digit(t[self.i]):
            self._advance()
        if self._peek() == "." and _is_digit(self._peek(1)):
            self._advance()
            while self.i < len(t) and _is_digit(t[self.i]):
                self._advance()
        if self._peek() != "" and self._peek() in "eE" and (
                _is_digit(self._peek(1))
                or (self._peek(1) != "" and self._peek(1) in "+-" and _is_digit(self._peek(2)))):
            self._advance()
            if self._peek() in "+-":
                self._advance()
            while self.i < len(t) and _is_digit(t[self.i]):
                self._advance()
        lex = t[start:self.i]
        return NUMBER, lex, float(lex)

    def _scan_regex_at(self, start: int) -> tuple[str, str, object] | None:
        """Scan /pattern/flags beginning at `start` (which must hold '/')."""
        t = self.text
        i = start + 1
        in_class = False
        while i < len(t):
            c = t[i]
            if c == "\\":
                i += 2
                continue
            if c == "\n":
                return None
            if in_class:
                if c == "]":
                    in_class = False
            elif c == "[":
                in_class = True
            elif c == "/":
                j = i + 1
                while j < len(t) and _ident_part(t[j]):
                    j += 1
                pattern = t[start + 1:i]
                flags = t[i + 1:j]
                return REGEX, t[start:j], (pattern, flags)
            i += 1
        return None

    # -- main loop --------------------------------------------------------

    def _next_token(self) -> Token:
        trivia = self._skip_trivia()
        line, col, offset = self.line, self.col, self.i
        if self.i >= len(self.text):
            return Token(EOF, "", self._span(line, col, 0), offset, trivia)
        c = self._peek()

        if _ident_start(c):
            start = self.i
            while self.i < len(self.text) and _ident_part(self.text[self.i]):
                self._advance()
            lex = self.text[start:self.i]
            kind = RESERVED if lex in RESERVED_WORDS else IDENTIFIER
            return Token(kind, lex, self._span(line, col, len(lex)), offset, trivia)

        if _is_digit(c) or (c == "." and _is_digit(self._peek(1))):
            kind, lex, value = self._scan_number()
            return Token(kind, lex, self._span(line, col, len(lex)), offset, trivia, value)

        if c in "'\"`":
            kind, lex, value = self._scan_string()
            return Token(kind, lex, self._span(line, col, len(lex)), offset, trivia, value)

        if c == "@":
            if _ident_start(self._peek(1)):
                start = self.i
                self._advance()
                while self.i < len(self.text) and _ident_part(self.text[self.i]):
                    self._advance()
                lex = self.text[start:self.i]
                return Token(DECORATED, lex, self._span(line, col, len(lex)), offset, trivia)
            if _is_digit(self._peek(1)):
                start = self.i
                self._advance()
                while self.i < len(self.text) and _is_digit(self.text[self.i]):
                    self._advance()
                lex = self.text[start:self.i]
                return Token(DECORATED, lex, self._span(line, col, len(lex)), offset, trivia)
            self.sink.error(dg.E_BAD_DECORATED, "'@' must be followed by a name",
                            self._span(line, col, 1))
            self._advance()
            return Token(PUNCT, "@", self._span(line, col, 1), offset, trivia)

        # Square brackets need depth tracking so `a[0][1]` keeps its standard
        # meaning while `_a][` (no open bracket) becomes the pop operator and
        # an adjacent `[]` pair becomes the push/empty-array token.
        if c == "[":
            if self._peek(1) == "]":
                self._advance(2)
                return Token(SYMOP, "[]", self._span(line, col, 2), offset, trivia)
            self.square_depth += 1
            self._advance()
            return Token(PUNCT, "[", self._span(line, col, 1), offset, trivia)
        if c == "]":
            if self.square_depth > 0:
                self.square_depth -= 1
                self._advance()
                return Token(PUNCT, "]", self._span(line, col, 1), offset, trivia)
            if self._peek(1) == "[":
                self._advance(2)
                return Token(SYMOP, "][", self._span(line, col, 2), offset, trivia)
            self._advance()
            return Token(PUNCT, "]", self._span(line, col, 1), offset, trivia)

        op = self.ops.match(self.text, self.i)
        if op is not None and (len(op) > 1 or op not in STRUCTURAL):
            self._advance(len(op))
            return Token(SYMOP, op, self._span(line, col, len(op)), offset, trivia)

        if c in STRUCTURAL:
            self._advance()
            return Token(PUNCT, c, self._span(line, col, 1), offset, trivia)

        self.sink.error(dg.E_LEX, f"unexpected character {c!r}", self._span(line, col, 1))
        self._advance()
        # Unknown characters become trivia of the following token (lossless).
        tok = self._next_token()
        return replace(tok, trivia=trivia + c + tok.trivia)

    def run(self) -> list[Token]:
        while True:
            tok = self._next_token()
            self.tokens.append(tok)
            if tok.kind == EOF:
                return self.tokens


def _decode_escape(esc: str, lexer: Lexer) -> str:
    simple = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0"}
    if esc in simple:
        return simple[esc]
    if esc == "x":
        h = lexer.text[lexer.i:lexer.i + 2]
        if len(h) == 2 and all(ch in "0123456789abcdefABCDEF" for ch in h):
            lexer._advance(2)
            return chr(int(h, 16))
        return "x"
    if esc == "u":
        h = lexer.text[lexer.i:lexer.i + 4]
        if len(h) == 4 and all(ch in "0123456789abcdefABCDEF" for ch in h):
            lexer._advance(4)
            return chr(int(h, 16))
        return "u"
    return esc


def tokenize(unit: SourceUnit, cfg: LexConfig | None = None,
             sink: DiagnosticSink | None = None) -> list[Token]:
    """Tokenize a unit; the stream always ends with a single EOF token."""
    return Lexer(unit, cfg, sink).run()


def lossless_join(tokens: list[Token]) -> str:
    """Reassemble the exact source text from a token stream."""
    return "".join(t.trivia + t.lexeme for t in tokens)


def apply_reserved_map(tokens: list[Token], cfg: LexConfig,
                       sink: DiagnosticSink | None = None) -> list[Token]:
    """Replace identifier tokens per the active translation table.

    DROPPABLE entries are deleted. Replacement tokens keep the span of the
    original so diagnostics still point at what the author wrote.
    """
    if not cfg.reserved_map or cfg.active_lang is None:
        return list(tokens)
    out: list[Token] = []
    pending_trivia = ""
    for tok in tokens:
        if tok.kind == IDENTIFIER and tok.lexeme in cfg.reserved_map:
            repl = cfg.reserved_map[tok.lexeme]
            if repl == DROPPABLE:
                pending_trivia += tok.trivia
                continue
            kind = _classify_replacement(repl)
            out.append(Token(kind, repl, tok.span, tok.offset, pending_trivia + tok.trivia))
            pending_trivia = ""
        else:
            if pending_trivia:
                tok = replace(tok, trivia=pending_trivia + tok.trivia)
                pending_trivia = ""
            out.append(tok)
    return out


def _classify_replacement(repl: str) -> str:
    if repl in RESERVED_WORDS:
        return RESERVED
    if repl and all(_ident_part(c) for c in repl):
        return IDENTIFIER
    return SYMOP if repl not in STRUCTURAL else PUNCT


def validate_replacement(repl: str) -> bool:
    """A translation target must be a reserved word or an operator spelling."""
    if repl == DROPPABLE or repl in RESERVED_WORDS:
        return True
    return repl in BUILTIN_OPS or repl in STRUCTURAL or is_symbolic_spelling(repl)


def relex_regex_context(unit: SourceUnit, tokens: list[Token], index: int,
                        sink: DiagnosticSink) -> list[Token]:
    """Re-scan the token at `index` (a '/' in a `case` head) as a regex literal.

    Subsequent tokens that fell inside the literal are dropped; the stream
    after the literal is re-synchronized by offset.
    """
    tok = tokens[index]
    sub = Lexer(unit, LexConfig(), sink)
    scanned = sub._scan_regex_at(tok.offset)
    if scanned is None:
        sink.error(dg.E_UNTERMINATED, "unterminated regular expression", tok.span)
        return tokens
    kind, lex, value = scanned
    span = Span(tok.span.file, tok.span.line, tok.span.col, len(lex))
    regex_tok = Token(kind, lex, span, tok.offset, tok.trivia, value)
    end = tok.offset + len(lex)
    rest = index + 1
    while rest < len(tokens) and tokens[rest].offset < end:
        rest += 1
    return tokens[:index] + [regex_tok] + tokens[rest:]
