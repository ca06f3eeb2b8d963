"""Recursive-descent parser with a Pratt expression core.

The operator table is assembled per parse from the builtin ECMAScript
precedence bands merged with registry-declared spellings (custom symbolic
operators, commands, polyadics), so registered operators become parseable at
their declared priority and nothing else changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import diagnostics as dg
from . import lexer as lx
from .diagnostics import DiagnosticSink
from .nodes import *  # noqa: F401,F403 -- the node vocabulary is the point
from .source import SourceUnit, Span

# Precedence bands (binding powers). Custom operators default to the band
# matching their arity; commands and polyadics sit at the comparison band.
BP_SEQ = 5
BP_FORK = 15
BP_ZIP = 18
BP_ASSIGN = 20
BP_TERNARY = 30
BP_BINCOND = 35
BP_OR = 40
BP_AND = 45
BP_BITOR = 50
BP_BITXOR = 52
BP_BITAND = 54
BP_EQ = 60
BP_REL = 70
BP_SHIFT = 75
BP_ADD = 80
BP_MUL = 85
BP_EXP = 90
BP_UNARY = 95
BP_POSTFIX = 100
BP_CALL = 110

ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=", "**="}
REVERSE_SELF_OPS = {"=+": "+", "=-": "-", "=*": "*", "=/": "/"}
BINCOND_OPS = {"??", "?:", "?==", "?===", "?<", "?>", "?<=", "?>="}

_BINARY_LBP = {
    "||": BP_OR, "&&": BP_AND,
    "|": BP_BITOR, "^": BP_BITXOR, "&": BP_BITAND,
    "==": BP_EQ, "!=": BP_EQ, "===": BP_EQ, "!==": BP_EQ,
    "<": BP_REL, ">": BP_REL, "<=": BP_REL, ">=": BP_REL,
    "<<": BP_SHIFT, ">>": BP_SHIFT, ">>>": BP_SHIFT,
    "+": BP_ADD, "-": BP_ADD,
    "*": BP_MUL, "/": BP_MUL, "%": BP_MUL,
    "**": BP_EXP,
}

BUILTIN_TYPE_NAMES = {"Number", "String", "Boolean", "Array", "Object", "Function", "JSON"}
RUNTIME_TYPE_NAMES = {"complex", "segment", "quaternion"}


class ParseError(Exception):
    def __init__(self, diag):
        super().__init__(diag.message)
        self.diag = diag


@dataclass
class OperatorSyntax:
    """What the parser needs to know about registry entries."""

    infix: dict[str, int] = field(default_factory=dict)      # spelling -> lbp
    prefix: dict[str, int] = field(default_factory=dict)     # spelling -> rbp
    postfix: dict[str, int] = field(default_factory=dict)    # spelling -> lbp
    words: dict[str, str] = field(default_factory=dict)      # name -> command|polyadic
    type_names: set[str] = field(default_factory=set)


def _starts_operand(tok) -> bool:
    if tok.kind in (lx.IDENTIFIER, lx.NUMBER, lx.STRING, lx.DECORATED, lx.REGEX):
        return True
    if tok.kind == lx.RESERVED:
        return tok.lexeme in {"new", "this", "function", "typeof", "void", "delete",
                              "true", "false", "null", "class"}
    return tok.lexeme in {"(", "[", "{", "[]", "!", "-", "+", "~", "--", "++", "\\"}


class Parser:
    def __init__(self, unit: SourceUnit, tokens: list, sink: DiagnosticSink | None = None,
                 syntax: OperatorSyntax | None = None):
        self.unit = unit
        self.toks = list(tokens)
        self.pos = 0
        self.sink = sink or DiagnosticSink()
        self.syntax = syntax or OperatorSyntax()
        self.known_types = BUILTIN_TYPE_NAMES | RUNTIME_TYPE_NAMES | set(self.syntax.type_names)
        self.no_in = 0
        self.group_depth = 0
        self.stmt_head = False
        self.const_names: set[str] = set()
        self.func_names: set[str] = set()
        self._prescan()

    # ------------------------------------------------------------------
    # token plumbing
    # ------------------------------------------------------------------

    def peek(self, j: int = 0):
        k = min(self.pos + j, len(self.toks) - 1)
        return self.toks[k]

    def next(self):
        tok = self.toks[self.pos]
        if self.pos < len(self.toks) - 1:
            self.pos += 1
        return tok

    def at(self, *lexemes: str) -> bool:
        return self.peek().is_op(*lexemes)

    def at_word(self, *words: str) -> bool:
        return self.peek().is_word(*words)

    def at_eof(self) -> bool:
        return self.peek().kind == lx.EOF

    def error(self, message: str, span: Span | None = None, code: str = dg.E_SYNTAX):
        diag = self.sink.error(code, message, span or self.peek().span)
        return ParseError(diag)

    def expect(self, lexeme: str):
        if self.at(lexeme):
            return self.next()
        raise self.error(f"expected '{lexeme}' but found '{self.peek().lexeme or 'end of file'}'")

    def expect_word(self, word: str):
        if self.at_word(word):
            return self.next()
        raise self.error(f"expected '{word}' but found '{self.peek().lexeme or 'end of file'}'")

    def expect_ident(self) -> str:
        tok = self.peek()
        if tok.kind == lx.IDENTIFIER:
            return self.next().lexeme
        raise self.error(f"expected a name but found '{tok.lexeme or 'end of file'}'")

    def _newline_before(self, j: int = 0) -> bool:
        return "\n" in self.peek(j).trivia

    def same_line(self, j: int = 1) -> bool:
        return not self._newline_before(j)

    def expect_semi(self):
        if self.at(";"):
            self.next()
            return
        tok = self.peek()
        if tok.kind == lx.EOF or tok.is_op("}") or self._newline_before():
            return  # automatic semicolon insertion
        raise self.error(f"expected ';' but found '{tok.lexeme}'")

    def find_matching(self, open_idx: int) -> int:
        """Index of the token closing the group opened at open_idx; -1 if none."""
        pairs = {"(": ")", "[": "]", "{": "}"}
        close = pairs[self.toks[open_idx].lexeme]
        depth = 0
        for i in range(open_idx, len(self.toks)):
            lex = self.toks[i].lexeme
            kind = self.toks[i].kind
            if kind in (lx.PUNCT,) and lex in pairs:
                depth += 1
            elif kind in (lx.PUNCT,) and lex in (")", "]", "}"):
                depth -= 1
                if depth == 0 and lex == close:
                    return i
        return -1

    def _prescan(self):
        """Collect const/function/class names for eligibility checks and the
        parse-time type-name set (class declarations register datatypes)."""
        toks = self.toks
        for i, t in enumerate(toks[:-1]):
            nxt = toks[i + 1]
            if t.is_word("class") and nxt.kind == lx.IDENTIFIER:
                self.known_types.add(nxt.lexeme)
            elif t.is_word("function") and nxt.kind == lx.IDENTIFIER:
                self.func_names.add(nxt.lexeme)
            elif t.is_word("const"):
                j = i + 1
                expecting_name = True
                depth = 0
                while j < len(toks) and not toks[j].is_op(";") and not toks[j].kind == lx.EOF:
                    tk = toks[j]
                    if tk.is_op("(", "[", "{"):
                        depth += 1
                    elif tk.is_op(")", "]", "}"):
                        if depth == 0:
                            break
                        depth -= 1
                    elif depth == 0 and expecting_name and tk.kind == lx.IDENTIFIER:
                        self.const_names.add(tk.lexeme)
                        expecting_name = False
                    elif depth == 0 and tk.is_op(","):
                        expecting_name = True
                    if "\n" in tk.trivia and tk.kind == lx.RESERVED:
                        break
                    j += 1

    # ------------------------------------------------------------------
    # program / statements
    # ------------------------------------------------------------------

    def parse_program(self) -> Program:
        body = []
        start = self.peek().span
        while not self.at_eof():
            stmt = self._statement_recovering()
            if stmt is not None:
                body.append(stmt)
        return Program(span=start, body=body)

    def _statement_recovering(self):
        before = self.pos
        try:
            return self.parse_statement()
        except ParseError:
            if self.pos == before:
                self.next()
            self._synchronize()
            return None

    def _synchronize(self):
        while not self.at_eof():
            if self.at(";"):
                self.next()
                return
            if self.at("}"):
                return
            tok = self.peek()
            if tok.kind == lx.RESERVED and tok.lexeme in {
                    "var", "let", "const", "function", "class", "if", "for", "while",
                    "do", "switch", "return", "break", "continue", "throw", "try"}:
                return
            self.next()

    def parse_statement(self):
        tok = self.peek()
        if tok.is_op(";"):
            return EmptyStmt(span=self.next().span)
        if tok.is_op("{"):
            return self.parse_block()
        if tok.kind == lx.RESERVED:
            return self._reserved_statement(tok)
        if tok.kind == lx.IDENTIFIER:
            stmt = self._contextual_statement(tok)
            if stmt is not None:
                return stmt
        if tok.is_op("#"):
            raise self.error("directive is not allowed here", tok.span,
                             dg.E_DIRECTIVE_PLACEMENT)
        return self._expression_statement()

    def _reserved_statement(self, tok):
        word = tok.lexeme
        if word in ("var", "let", "const"):
            if self.peek(1).is_op("("):
                return self._multi_action_decl()
            return self._var_statement()
        if word == "function":
            return self._function_decl(ret_type=None)
        if word == "class":
            return self._class_decl()
        if word == "if":
            return self._if_statement()
        if word == "for":
            return self._for_statement()
        if word == "while":
            self.next()
            self.expect("(")
            cond = self.parse_expression(0)
            self.expect(")")
            return While(span=tok.span, cond=cond, body=self.parse_statement())
        if word == "do":
            self.next()
            body = self.parse_statement()
            self.expect_word("while")
            self.expect("(")
            cond = self.parse_expression(0)
            self.expect(")")
            if self.at(";"):
                self.next()
            return DoWhile(span=tok.span, body=body, cond=cond)
        if word == "switch":
            return self._switch_statement()
        if word == "return":
            self.next()
            arg = None
            if not self.at(";") and not self.at("}") and not self.at_eof() and self.same_line(0):
                arg = self.parse_expression(0)
            self.expect_semi()
            return Return(span=tok.span, arg=arg)
        if word in ("break", "continue"):
            self.next()
            label = None
            if self.peek().kind == lx.IDENTIFIER and self.same_line(0):
                label = self.next().lexeme
            self.expect_semi()
            node = Break if word == "break" else Continue
            return node(span=tok.span, label=label)
        if word == "throw":
            self.next()
            arg = self.parse_expression(0)
            self.expect_semi()
            return Throw(span=tok.span, arg=arg)
        if word == "try":
            return self._try_statement()
        if word == "debugger":
            self.next()
            self.expect_semi()
            return Debugger(span=tok.span)
        return self._expression_statement()

    def _contextual_statement(self, tok):
        word = tok.lexeme
        nxt = self.peek(1)
        if word == "namespace" and (nxt.kind == lx.IDENTIFIER or nxt.is_op("\\")):
            return self._namespace_statement()
        if word == "exit" and nxt.is_word("namespace"):
            raise self.error("'exit namespace' without an open namespace",
                             tok.span, dg.E_NAMESPACE_EXIT)
        if word == "use" and nxt.is_op("\\"):
            return self._use_statement()
        if word == "ifchain" and nxt.is_op("("):
            return self._ifchain_statement()
        if nxt.is_op(":") and not self.peek(2).is_op(":"):
            label = self.next().lexeme
            self.next()
            return Labeled(span=tok.span, label=label, stmt=self.parse_statement())
        if nxt.is_word("function"):
            ret = self.next().lexeme
            return self._function_decl(ret_type=ret)
        if nxt.kind == lx.IDENTIFIER and self.same_line(1):
            return self._typified_decl()
        return None

    def _expression_statement(self):
        tok = self.peek()
        self.stmt_head = True
        try:
            expr = self.parse_expression(0)
        finally:
            self.stmt_head = False
        if self.at("*") and self.peek(1).is_op("{"):
            self.next()
            body = self.parse_block()
            return BlockRepeat(span=tok.span, count=expr, body=body)
        self.expect_semi()
        return ExprStmt(span=tok.span, expr=expr)

    def parse_block(self) -> Block:
        start = self.expect("{")
        body = []
        while not self.at("}") and not self.at_eof():
            stmt = self._statement_recovering()
            if stmt is not None:
                body.append(stmt)
        self.expect("}")
        return Block(span=start.span, body=body)

    # -- declarations ----------------------------------------------------

    def _var_statement(self):
        tok = self.next()
        decl = self._var_declarators(tok.lexeme)
        self.expect_semi()
        return decl

    def _var_declarators(self, kind: str) -> VarDecl:
        declarators = []
        while True:
            name_tok = self.peek()
            if name_tok.kind != lx.IDENTIFIER:
                raise self.error(f"expected a variable name but found '{name_tok.lexeme}'")
            self.next()
            init = None
            if self.at("="):
                self.next()
                init = self.parse_expression(BP_SEQ + 1)
            declarators.append(Declarator(span=name_tok.span,
                                          name=Ident(span=name_tok.span, name=name_tok.lexeme),
                                          init=init))
            if self.at(","):
                self.next()
                continue
            break
        return VarDecl(span=declarators[0].span, kind=kind, declarators=declarators)

    def _function_decl(self, ret_type):
        start = self.expect_word("function")
        name = self.expect_ident()
        params = self._param_list()
        body = self.parse_block()
        return FuncDecl(span=start.span, name=name, params=params, body=body,
                        ret_type=ret_type)

    def _param_list(self) -> list:
        self.expect("(")
        params = []
        while not self.at(")"):
            params.append(self._param())
            if self.at(","):
                self.next()
        self.expect(")")
        return params

    def _param(self) -> Param:
        tok = self.peek()
        if tok.kind != lx.IDENTIFIER:
            raise self.error(f"expected a parameter but found '{tok.lexeme}'")
        first = self.next().lexeme
        if self.at("&"):
            self.next()
            name = self.expect_ident()
            return Param(span=tok.span, name=name, type_name=first, by_ref=True)
        if self.peek().kind == lx.DECORATED:
            deco = self.next()
            if deco.lexeme == "@arg" or deco.lexeme[1:].isidentifier():
                return Param(span=tok.span, name=deco.lexeme[1:], type_name=first, safe=True)
            raise self.error(f"invalid safe-argument name '{deco.lexeme}'", deco.span)
        if self.peek().kind == lx.IDENTIFIER:
            name = self.next().lexeme
            return Param(span=tok.span, name=name, type_name=first)
        return Param(span=tok.span, name=first)

    def _class_decl(self):
        start = self.expect_word("class")
        name = None
        if self.peek().kind == lx.IDENTIFIER:
            name = self.next().lexeme
            self.known_types.add(name)
        superclass = None
        if self.at_word("extends"):
            self.next()
            superclass = self.parse_expression(BP_CALL)
        self.expect("{")
        members = []
        while not self.at("}") and not self.at_eof():
            if self.at(";"):
                self.next()
                continue
            member = self._class_member()
            if isinstance(member, list):
                members.extend(member)
            else:
                members.append(member)
        self.expect("}")
        return ClassDecl(span=start.span, name=name, superclass=superclass, members=members)

    def _class_member(self):
        tok = self.peek()
        static = False
        if tok.is_word("static") and not self.peek(1).is_op("(", "="):
            self.next()
            static = True
            tok = self.peek()
        if tok.is_word("var", "let", "const"):
            self.next()
            decl = self._var_declarators(tok.lexeme)
            self.expect_semi()
            return [FieldDef(span=d.span, name=d.name.name, init=d.init, static=static)
                    for d in decl.declarators]
        if tok.kind in (lx.IDENTIFIER, lx.RESERVED):
            # `Type name(params)` strong method, `name(params)` method,
            # `name = expr` / `name;` field
            if self.peek(1).kind == lx.IDENTIFIER and self.peek(2).is_op("("):
                ret = self.next().lexeme
                name = self.next().lexeme
                params = self._param_list()
                body = self.parse_block()
                kind = "constructor" if name == "constructor" else "method"
                return MethodDef(span=tok.span, name=name, params=params, body=body,
                                 ret_type=ret, static=static, kind=kind)
            if self.peek(1).is_op("("):
                name = self.next().lexeme
                params = self._param_list()
                body = self.parse_block()
                kind = "constructor" if name == "constructor" else "method"
                return MethodDef(span=tok.span, name=name, params=params, body=body,
                                 static=static, kind=kind)
            if self.peek(1).is_op("="):
                name = self.next().lexeme
                self.next()
                init = self.parse_expression(BP_SEQ + 1)
                self.expect_semi()
                return FieldDef(span=tok.span, name=name, init=init, static=static)
            if self.peek(1).is_op(";") or "\n" in self.peek(1).trivia:
                name = self.next().lexeme
                self.expect_semi()
                return FieldDef(span=tok.span, name=name, static=static)
        raise self.error(f"unexpected token '{tok.lexeme}' in class body")

    def _typified_decl(self):
        type_tok = self.next()
        type_name = type_tok.lexeme
        self.known_types.add(type_name)
        declarators = []
        while True:
            name_tok = self.peek()
            if name_tok.kind != lx.IDENTIFIER:
                raise self.error(f"expected a variable name but found '{name_tok.lexeme}'")
            self.next()
            args = None
            if self.at("="):
                self.next()
                args = self._typified_init()
            declarators.append(TypifiedDeclarator(span=name_tok.span,
                                                  name=name_tok.lexeme, args=args))
            if self.at(","):
                self.next()
                continue
            break
        self.expect_semi()
        return TypifiedDecl(span=type_tok.span, type_name=type_name, declarators=declarators)

    def _typified_init(self) -> list:
        """Initializer of a typified declarator: a single value, a parenthesized
        constructor argument list (whose elements may be nested typed inits),
        or a typified function expression (arrow)."""
        if self.at("("):
            close = self.find_matching(self.pos)
            if close >= 0 and self.toks[close + 1].is_op("=>"):
                return [self.parse_expression(BP_SEQ + 1)]
            self.next()
            args = []
            while not self.at(")"):
                args.append(self._typified_init_element())
                if self.at(","):
                    self.next()
            self.expect(")")
            return args
        return [self.parse_expression(BP_SEQ + 1)]

    def _typified_init_element(self):
        tok = self.peek()
        if tok.kind == lx.IDENTIFIER and self.peek(1).kind == lx.IDENTIFIER:
            t = self.next().lexeme
            name = self.next().lexeme
            args = []
            if self.at("="):
                self.next()
                args = [self.parse_expression(BP_SEQ + 1)]
            return TypedInit(span=tok.span, type_name=t, name=name, args=args)
        if (tok.kind == lx.IDENTIFIER and tok.lexeme in self.known_types
                and self.peek(1).is_op("(")):
            t = self.next().lexeme
            self.next()
            args = []
            while not self.at(")"):
                args.append(self.parse_expression(BP_SEQ + 1))
                if self.at(","):
                    self.next()
            self.expect(")")
            return TypedInit(span=tok.span, type_name=t, args=args)
        return self.parse_expression(BP_SEQ + 1)

    # -- control flow ----------------------------------------------------

    def _if_statement(self):
        start = self.expect_word("if")
        self.expect("(")
        cond = self.parse_expression(0)
        self.expect(")")
        then = self.parse_statement()
        else_ = None
        if self.at_word("else"):
            self.next()
            else_ = self.parse_statement()
        return If(span=start.span, cond=cond, then=then, else_=else_)

    def _ifchain_statement(self):
        start = self.next()  # ifchain
        self.expect("(")
        conds = [self.parse_expression(BP_SEQ + 1)]
        while self.at(","):
            self.next()
            conds.append(self.parse_expression(BP_SEQ + 1))
        self.expect(")")
        then = self.parse_statement()
        else_ = None
        if self.at_word("else"):
            self.next()
            else_ = self.parse_statement()
        return IfChain(span=start.span, conds=conds, then=then, else_=else_)

    def _for_statement(self):
        start = self.expect_word("for")
        self.expect("(")
        init = None
        if self.at(";"):
            self.next()
        else:
            if self.at_word("var", "let", "const"):
                kind_tok = self.next()
                self.no_in += 1
                try:
                    decl = self._var_declarators(kind_tok.lexeme)
                finally:
                    self.no_in -= 1
                if self.at_word("in") or self.at_word("of"):
                    of = self.next().lexeme == "of"
                    obj = self.parse_expression(0)
                    self.expect(")")
                    return ForIn(span=start.span, decl_kind=kind_tok.lexeme,
                                 target=decl.declarators[0].name, obj=obj,
                                 body=self.parse_statement(), of=of)
                init = decl
            else:
                self.no_in += 1
                try:
                    expr = self.parse_expression(0)
                finally:
                    self.no_in -= 1
                if self.at_word("in") or self.at_word("of"):
                    of = self.next().lexeme == "of"
                    obj = self.parse_expression(0)
                    self.expect(")")
                    return ForIn(span=start.span, decl_kind=None, target=expr, obj=obj,
                                 body=self.parse_statement(), of=of)
                init = ExprStmt(span=expr.span, expr=expr)
            self.expect(";")
        test = None if self.at(";") else self.parse_expression(0)
        self.expect(";")
        update = None if self.at(")") else self.parse_expression(0)
        self.expect(")")
        return For(span=start.span, init=init, test=test, update=update,
                   body=self.parse_statement())

    def _switch_statement(self):
        start = self.expect_word("switch")
        self.expect("(")
        disc = self.parse_expression(0)
        self.expect(")")
        self.expect("{")
        cases = []
        while not self.at("}") and not self.at_eof():
            if self.at_word("case"):
                case_tok = self.next()
                if self.at("/") or self.at("/="):
                    self.toks = lx.relex_regex_context(self.unit, self.toks, self.pos, self.sink)
                test = self.parse_expression(BP_ZIP)
                self.expect(":")
                cases.append(SwitchCase(span=case_tok.span, test=test,
                                        body=self._case_body()))
            elif self.at_word("default"):
                d = self.next()
                self.expect(":")
                cases.append(SwitchCase(span=d.span, test=None, body=self._case_body()))
            else:
                raise self.error(f"expected 'case' or 'default' but found '{self.peek().lexeme}'")
        self.expect("}")
        return Switch(span=start.span, disc=disc, cases=cases)

    def _case_body(self) -> list:
        body = []
        while not self.at("}") and not self.at_word("case") and not self.at_word("default") \
                and not self.at_eof():
            stmt = self._statement_recovering()
            if stmt is not None:
                body.append(stmt)
        return body

    def _try_statement(self):
        start = self.expect_word("try")
        block = self.parse_block()
        param = None
        handler = None
        finalizer = None
        if self.at_word("catch"):
            self.next()
            if self.at("("):
                self.next()
                param = self.expect_ident()
                self.expect(")")
            handler = self.parse_block()
        if self.at_word("finally"):
            self.next()
            finalizer = self.parse_block()
        return TryStmt(span=start.span, block=block, param=param, handler=handler,
                       finalizer=finalizer)

    # -- namespaces -------------------------------------------------------

    def _namespace_path(self) -> list:
        segments = []
        if self.at("\\"):
            self.next()
        segments.append(self.expect_ident())
        while self.at("\\"):
            self.next()
            segments.append(self.expect_ident())
        return segments

    def _namespace_statement(self):
        start = self.next()  # namespace
        path = self._namespace_path()
        if self.at(";"):
            self.next()
        if self.at("{"):
            block = self.parse_block()
            return Namespace(span=start.span, path=path, body=block.body)
        body = []
        while not self.at_eof() and not self.at("}"):
            if self.at_word("namespace") and (self.peek(1).kind == lx.IDENTIFIER
                                              or self.peek(1).is_op("\\")):
                break
            if self.at_word("exit") and self.peek(1).is_word("namespace"):
                self.next()
                self.next()
                if self.at(";"):
                    self.next()
                break
            stmt = self._statement_recovering()
            if stmt is not None:
                body.append(stmt)
        return Namespace(span=start.span, path=path, body=body)

    def _use_statement(self):
        start = self.next()  # use
        path = self._namespace_path()
        self.expect_word("as")
        alias = self.expect_ident()
        self.expect_semi()
        return UseAlias(span=start.span, path=path, alias=alias)

    # ------------------------------------------------------------------
    # expressions (Pratt core)
    # ------------------------------------------------------------------

    def parse_expression(self, rbp: int):
        stmt_head = self.stmt_head
        self.stmt_head = False
        try:
            left = self._nud()
            while True:
                lbp = self._lbp(self.peek(), stmt_head)
                if lbp <= rbp:
                    break
                left = self._led(left)
            return left
        finally:
            self.stmt_head = stmt_head

    def _lbp(self, tok, stmt_head: bool = False) -> int:
        lex = tok.lexeme
        if tok.kind in (lx.SYMOP, lx.PUNCT):
            if lex == "*" and stmt_head and self.group_depth == 0 and self.peek(1).is_op("{"):
                return 0  # block repeater: `count * { ... }` at statement head
            if lex in ASSIGN_OPS or lex in REVERSE_SELF_OPS:
                return BP_ASSIGN
            if lex in BINCOND_OPS:
                return BP_BINCOND
            if lex in _BINARY_LBP:
                return _BINARY_LBP[lex]
            if lex == "|<":
                return BP_FORK
            if lex == "?":
                return BP_TERNARY
            if lex == ":":
                return BP_ZIP
            if lex == ",":
                return BP_SEQ
            if lex in ("++", "--"):
                return BP_POSTFIX
            if lex in ("(", "[", ".", "[]", "]["):
                return BP_CALL
            if lex in self.syntax.infix:
                return self.syntax.infix[lex]
            if lex in self.syntax.postfix:
                return self.syntax.postfix[lex]
            return 0
        if tok.kind == lx.RESERVED and lex == "instanceof":
            return BP_REL
        if tok.kind == lx.RESERVED and lex == "in":
            return 0 if self.no_in else BP_REL
        if tok.kind == lx.IDENTIFIER and lex in self.syntax.words:
            return BP_REL
        return 0

    # -- prefix / primary --------------------------------------------------

    def _nud(self):
        tok = self.peek()
        kind, lex = tok.kind, tok.lexeme

        if kind == lx.NUMBER:
            self.next()
            return NumberLit(span=tok.span, value=tok.value)
        if kind == lx.STRING:
            self.next()
            if lex.startswith("`"):
                return TemplateLit(span=tok.span, raw=lex)
            return StringLit(span=tok.span, value=tok.value)
        if kind == lx.REGEX:
            self.next()
            return RegexLit(span=tok.span, pattern=tok.value[0], flags=tok.value[1])
        if kind == lx.DECORATED:
            return self._decorated()
        if kind == lx.IDENTIFIER:
            if self.peek(1).is_op("=>") and self.same_line(1):
                name = self.next()
                self.next()
                return self._arrow_tail([Param(span=name.span, name=name.lexeme)], None)
            if self.peek(1).is_word("function"):
                ret = self.next().lexeme
                return self._function_expr(ret_type=ret)
            if self.peek(1).is_op("\\"):
                return self._namespace_ref(absolute=False)
            self.next()
            return Ident(span=tok.span, name=lex)
        if kind == lx.RESERVED:
            return self._reserved_nud(tok)
        if lex == "(":
            return self._paren_nud()
        if lex == "[":
            return self._array_literal()
        if lex == "[]":
            self.next()
            return ArrayLit(span=tok.span, elements=[])
        if lex == "{":
            return self._object_literal()
        if lex == "\\":
            return self._namespace_ref(absolute=True)
        if lex in ("!", "~", "+", "-"):
            self.next()
            return Unary(span=tok.span, op=lex, arg=self.parse_expression(BP_UNARY))
        if lex in ("++", "--"):
            self.next()
            return Update(span=tok.span, op=lex, arg=self.parse_expression(BP_UNARY),
                          prefix=True)
        if lex in self.syntax.prefix:
            self.next()
            return Unary(span=tok.span, op=lex,
                         arg=self.parse_expression(self.syntax.prefix[lex]))
        raise self.error(f"unexpected token '{lex or 'end of file'}'")

    def _reserved_nud(self, tok):
        lex = tok.lexeme
        if lex == "true" or lex == "false":
            self.next()
            return BoolLit(span=tok.span, value=(lex == "true"))
        if lex == "null":
            self.next()
            return NullLit(span=tok.span)
        if lex == "this":
            self.next()
            return ThisExpr(span=tok.span)
        if lex == "function":
            return self._function_expr(ret_type=None)
        if lex == "new":
            self.next()
            callee = self._new_callee()
            args = None
            if self.at("("):
                args = self._call_args()
            return New(span=tok.span, callee=callee, args=args)
        if lex in ("typeof", "void", "delete"):
            self.next()
            return Unary(span=tok.span, op=lex, arg=self.parse_expression(BP_UNARY))
        if lex == "class":
            return self._class_decl()
        if lex == "super":
            self.next()
            return Ident(span=tok.span, name="super")
        raise self.error(f"unexpected keyword '{lex}'")

    def _new_callee(self):
        """Member chain without call arguments (NewExpression grammar)."""
        tok = self.peek()
        if tok.is_op("\\"):
            base = self._namespace_ref(absolute=True)
        elif tok.kind == lx.IDENTIFIER:
            if self.peek(1).is_op("\\"):
                base = self._namespace_ref(absolute=False)
            else:
                self.next()
                base = Ident(span=tok.span, name=tok.lexeme)
        elif tok.is_word("new"):
            base = self._reserved_nud(tok)
        else:
            base = self._nud()
        while True:
            if self.at("."):
                self.next()
                prop = self.next()
                base = Member(span=base.span, obj=base,
                              prop=Ident(span=prop.span, name=prop.lexeme))
            elif self.at("["):
                self.next()
                idx = self.parse_expression(0)
                self.expect("]")
                base = Member(span=base.span, obj=base, prop=idx, computed=True)
            else:
                return base

    def _function_expr(self, ret_type):
        start = self.expect_word("function")
        name = None
        if self.peek().kind == lx.IDENTIFIER:
            name = self.next().lexeme
        params = self._param_list()
        body = self.parse_block()
        return FuncExpr(span=start.span, name=name, params=params, body=body,
                        ret_type=ret_type)

    def _decorated(self):
        tok = self.next()
        arg = None
        if tok.lexeme == "@parent" and self.at("("):
            open_span = self.peek().span
            self.next()
            arg = self.parse_expression(0)
            self.expect(")")
            if not isinstance(arg, NumberLit) or arg.value < 1 or arg.value != int(arg.value):
                raise self.error("@parent takes a literal integer distance of at least 1",
                                 open_span, dg.E_PARENT_PARAM)
        return Decorated(span=tok.span, name=tok.lexeme, arg=arg)

    def _namespace_ref(self, absolute: bool):
        tok = self.peek()
        segments = self._namespace_path()
        return NamespaceRef(span=tok.span, segments=segments, absolute=absolute)

    def _array_literal(self):
        start = self.expect("[")
        elements = []
        while not self.at("]"):
            if self.at("..."):
                s = self.next()
                elements.append(Spread(span=s.span, arg=self.parse_expression(BP_SEQ + 1)))
            else:
                elements.append(self.parse_expression(BP_SEQ + 1))
            if self.at(","):
                self.next()
        self.expect("]")
        return ArrayLit(span=start.span, elements=elements)

    def _object_literal(self):
        start = self.expect("{")
        self.group_depth += 1
        props = []
        try:
            while not self.at("}"):
                props.append(self._object_prop())
                if self.at(","):
                    self.next()
                elif not self.at("}"):
                    raise self.error(f"expected ',' or '}}' but found '{self.peek().lexeme}'")
        finally:
            self.group_depth -= 1
        self.expect("}")
        return ObjectLit(span=start.span, props=props)

    def _object_prop(self):
        tok = self.peek()
        # typed JSON method: `Type name : function(...)`
        if tok.kind == lx.IDENTIFIER and self.peek(1).kind == lx.IDENTIFIER \
                and self.peek(2).is_op(":"):
            ret = self.next().lexeme
            name_tok = self.next()
            self.next()  # :
            value = self.parse_expression(BP_SEQ + 1)
            return ObjectProp(span=tok.span, key=Ident(span=name_tok.span, name=name_tok.lexeme),
                              value=value, ret_type=ret)
        if tok.kind in (lx.IDENTIFIER, lx.RESERVED, lx.STRING, lx.NUMBER):
            if tok.kind == lx.STRING:
                key = StringLit(span=tok.span, value=tok.value)
            elif tok.kind == lx.NUMBER:
                key = NumberLit(span=tok.span, value=tok.value)
            else:
                key = Ident(span=tok.span, name=tok.lexeme)
            self.next()
            if self.at(":"):
                self.next()
                value = self.parse_expression(BP_SEQ + 1)
                return ObjectProp(span=tok.span, key=key, value=value)
            if self.at("("):
                params = self._param_list()
                body = self.parse_block()
                fn = FuncExpr(span=tok.span, params=params, body=body)
                return ObjectProp(span=tok.span, key=key, value=fn, method=True)
            if isinstance(key, Ident):
                return ObjectProp(span=tok.span, key=key,
                                  value=Ident(span=tok.span, name=key.name), shorthand=True)
        raise self.error(f"invalid object literal entry at '{tok.lexeme}'")

    # -- parenthesized forms -----------------------------------------------

    def _paren_nud(self):
        open_tok = self.peek()
        close = self.find_matching(self.pos)
        if close < 0:
            raise self.error("unmatched '('", open_tok.span)
        after = self.toks[close + 1] if close + 1 < len(self.toks) else self.toks[-1]

        if after.is_op("=>"):
            return self._arrow_from_paren()
        # cast: `(TypeName)` directly followed by an operand
        if (close == self.pos + 2 and self.toks[self.pos + 1].kind == lx.IDENTIFIER
                and self.toks[self.pos + 1].lexeme in self.known_types
                and _starts_operand(after)):
            return self._cast_expr()
        if after.is_op("=", "==", "===") and self._paren_element_count() >= 2:
            return self._multi_action_expr(decl_kind=None)
        if self._paren_is_seq_literal(close):
            return self._seq_literal()
        self.next()
        self.group_depth += 1
        try:
            expr = self.parse_expression(0)
        finally:
            self.group_depth -= 1
        self.expect(")")
        return expr

    def _paren_element_count(self) -> int:
        """Top-level comma count + 1 inside the group starting at self.pos."""
        depth = 0
        count = 1
        for i in range(self.pos, len(self.toks)):
            t = self.toks[i]
            if t.is_op("(", "[", "{"):
                depth += 1
            elif t.is_op(")", "]", "}"):
                depth -= 1
                if depth == 0:
                    return count
            elif t.is_op(",") and depth == 1:
                count += 1
        return count

    def _paren_is_seq_literal(self, close: int) -> bool:
        depth = 0
        for i in range(self.pos, close):
            t = self.toks[i]
            if t.is_op("(", "[", "{"):
                depth += 1
            elif t.is_op(")", "]", "}"):
                depth -= 1
            elif t.is_op("...") and depth == 1:
                return True
        return False

    def _seq_literal(self):
        start = self.expect("(")
        a = self.parse_expression(BP_SEQ + 1)
        self.expect(",")
        self.expect("...")
        self.expect(",")
        b = self.parse_expression(BP_SEQ + 1)
        self.expect(")")
        return SeqLiteral(span=start.span, start=a, end=b)

    def _cast_expr(self):
        start = self.expect("(")
        type_name = self.expect_ident()
        self.expect(")")
        if self.at("("):
            # `(T)(...)`: construct unless the parens themselves hold a cast
            inner_close = self.find_matching(self.pos)
            inner_is_cast = (
                inner_close == self.pos + 2
                and self.toks[self.pos + 1].kind == lx.IDENTIFIER
                and self.toks[self.pos + 1].lexeme in self.known_types
                and inner_close + 1 < len(self.toks)
                and _starts_operand(self.toks[inner_close + 1])
            )
            if not inner_is_cast:
                args = self._call_args()
                return CastExpr(span=start.span, type_name=type_name, args=args)
        operand = self.parse_expression(BP_UNARY)
        return CastExpr(span=start.span, type_name=type_name, operand=operand)

    def _arrow_from_paren(self):
        self.expect("(")
        params = []
        while not self.at(")"):
            params.append(self._param())
            if self.at(","):
                self.next()
        self.expect(")")
        self.expect("=>")
        return self._arrow_tail(params, None)

    def _arrow_tail(self, params, ret_type):
        if self.at("{"):
            body = self.parse_block()
        else:
            body = self.parse_expression(BP_SEQ + 1)
        return ArrowFunc(span=params[0].span if params else body.span,
                         params=params, body=body, ret_type=ret_type)

    # -- multiple actions ---------------------------------------------------

    def _multi_action_decl(self):
        kind_tok = self.next()
        node = self._multi_action_expr(decl_kind=kind_tok.lexeme)
        self.expect_semi()
        return node

    def _multi_action_expr(self, decl_kind):
        start = self.expect("(")
        targets = []
        while not self.at(")"):
            targets.append(self._multi_action_target())
            if self.at(","):
                self.next()
        self.expect(")")
        op_tok = self.peek()
        if not op_tok.is_op("=", "==", "==="):
            raise self.error(f"expected '=', '==' or '===' but found '{op_tok.lexeme}'")
        self.next()
        values, one_to_many, wildcard = self._multi_action_values()
        node = MultiAction(span=start.span, op=op_tok.lexeme, decl_kind=decl_kind,
                           targets=targets, values=values, one_to_many=one_to_many,
                           wildcard_index=wildcard)
        if decl_kind is None:
            return node
        return node

    def _multi_action_target(self):
        tok = self.peek()
        if tok.kind == lx.RESERVED:
            self.sink.error(dg.E_NOT_ELIGIBLE,
                            f"'{tok.lexeme}' is not an eligible container: no reserved words",
                            tok.span)
            self.next()
            raise ParseError(self.sink.diagnostics[-1])
        expr = self.parse_expression(BP_SEQ + 1)
        self._check_eligibility(expr)
        return expr

    def _check_eligibility(self, expr):
        """Targets must be plain value containers. Rejections mirror the
        documented list: formulas, constants, strings, method objects,
        function calls, functions, const variables."""
        msg = None
        if isinstance(expr, (Binary, Logical, Unary, Ternary, Update, BinCond)):
            msg = "no formulas allowed on the left"
        elif isinstance(expr, NumberLit):
            msg = "no explicit constant values"
        elif isinstance(expr, (StringLit, TemplateLit)):
            msg = "no strings"
        elif isinstance(expr, Call):
            msg = "no function calls"
        elif isinstance(expr, Member) and not expr.computed:
            msg = "no method objects"
        elif isinstance(expr, Ident) and expr.name in self.const_names:
            msg = "no constant variables"
        elif isinstance(expr, Ident) and expr.name in self.func_names:
            msg = "no functions allowed"
        elif not isinstance(expr, (Ident, Member)):
            msg = "not an eligible container"
        if msg is not None:
            raise self.error(f"not eligible container: {msg}", expr.span, dg.E_NOT_ELIGIBLE)

    def _multi_action_values(self):
        if self.at("("):
            self.next()
            values = []
            wildcard = None
            while not self.at(")"):
                if self.at("*"):
                    star = self.next()
                    if wildcard is not None:
                        raise self.error("only one wildcard is allowed", star.span,
                                         dg.E_WILDCARD_POSITION)
                    wildcard = len(values)
                    if not self.at(")"):
                        raise self.error("wildcard must be the last element", star.span,
                                         dg.E_WILDCARD_POSITION)
                    continue
                values.append(self.parse_expression(BP_SEQ + 1))
                if self.at(","):
                    self.next()
            self.expect(")")
            if wildcard is not None and not values:
                raise self.error("wildcard needs a preceding value", self.peek().span,
                                 dg.E_WILDCARD_POSITION)
            return values, False, wildcard
        value = self.parse_expression(BP_SEQ + 1)
        return [value], True, None

    # -- infix / postfix -----------------------------------------------------

    def _led(self, left):
        tok = self.peek()
        lex = tok.lexeme

        if tok.kind == lx.RESERVED and lex in ("in", "instanceof"):
            self.next()
            right = self.parse_expression(BP_REL)
            return Binary(span=left.span, op=lex, left=left, right=right)

        if tok.kind == lx.IDENTIFIER and lex in self.syntax.words:
            self.next()
            if self.syntax.words[lex] == "polyadic":
                if not self.at("("):
                    raise self.error(f"polyadic '{lex}' requires a parenthesized argument list")
                args = self._call_args()
                return CommandExpr(span=left.span, name=lex, args=[left] + args,
                                   polyadic=True)
            right = self.parse_expression(BP_REL)
            return CommandExpr(span=left.span, name=lex, args=[left, right])

        if lex == ",":
            self.next()
            exprs = [left, self.parse_expression(BP_SEQ)]
            while self.at(","):
                self.next()
                exprs.append(self.parse_expression(BP_SEQ))
            return Sequence(span=left.span, exprs=exprs)

        if lex in ASSIGN_OPS:
            self.next()
            value = self.parse_expression(BP_ASSIGN - 1)
            return Assign(span=left.span, op=lex, target=left, value=value)

        if lex in REVERSE_SELF_OPS:
            self.next()
            rhs = self.parse_expression(BP_ASSIGN - 1)
            return ReverseSelfOp(span=left.span, op=REVERSE_SELF_OPS[lex], lhs=left, rhs=rhs)

        if lex == "?":
            self.next()
            cons = self.parse_expression(BP_ZIP)
            self.expect(":")
            alt = self.parse_expression(BP_TERNARY - 1)
            return Ternary(span=left.span, cond=left, cons=cons, alt=alt)

        if lex in BINCOND_OPS:
            self.next()
            right = self.parse_expression(BP_BINCOND)
            return BinCond(span=left.span, op=lex, left=left, right=right)

        if lex == "|<":
            return self._fork(left)

        if lex == ":":
            self.next()
            values = self.parse_expression(BP_ZIP)
            return JsonZip(span=left.span, keys=left, values=values)

        if lex == "&&" or lex == "||":
            self.next()
            right = self.parse_expression(_BINARY_LBP[lex])
            return Logical(span=left.span, op=lex, left=left, right=right)

        if lex in _BINARY_LBP:
            self.next()
            rbp = _BINARY_LBP[lex] - (1 if lex == "**" else 0)
            right = self.parse_expression(rbp)
            return Binary(span=left.span, op=lex, left=left, right=right)

        if lex in ("++", "--"):
            self.next()
            return Update(span=left.span, op=lex, arg=left, prefix=False)

        if lex == ".":
            self.next()
            prop = self.next()
            if prop.kind not in (lx.IDENTIFIER, lx.RESERVED):
                raise self.error(f"expected a property name but found '{prop.lexeme}'")
            return Member(span=left.span, obj=left,
                          prop=Ident(span=prop.span, name=prop.lexeme))

        if lex == "(":
            args = self._call_args()
            return Call(span=left.span, callee=left, args=args)

        if lex == "[":
            return self._index_or_slice(left)

        if lex == "[]":
            return self._array_push(left)

        if lex == "][":
            return self._array_pop(left)

        if lex in self.syntax.infix:
            self.next()
            right = self.parse_expression(self.syntax.infix[lex])
            return Binary(span=left.span, op=lex, left=left, right=right)

        if lex in self.syntax.postfix:
            self.next()
            return Postfix(span=left.span, op=lex, arg=left)

        raise self.error(f"unexpected operator '{lex}'")

    def _call_args(self) -> list:
        self.expect("(")
        self.group_depth += 1
        args = []
        try:
            while not self.at(")"):
                if self.at("..."):
                    s = self.next()
                    args.append(Spread(span=s.span, arg=self.parse_expression(BP_SEQ + 1)))
                else:
                    args.append(self.parse_expression(BP_SEQ + 1))
                if self.at(","):
                    self.next()
        finally:
            self.group_depth -= 1
        self.expect(")")
        return args

    def _fork(self, cond):
        start = self.next()  # |<
        id1 = self.parse_expression(BP_ZIP)
        self.expect(":")
        id2 = self.parse_expression(BP_ZIP)
        self.expect(":")
        v1 = self.parse_expression(BP_ZIP)
        v2 = None
        if self.at(":"):
            self.next()
            v2 = self.parse_expression(BP_ZIP)
        return Fork(span=start.span, cond=cond, id1=id1, id2=id2, v1=v1, v2=v2)

    def _index_or_slice(self, base):
        open_tok = self.expect("[")
        self.group_depth += 1
        try:
            if self.at("<--"):
                self.next()
                b = self.parse_expression(BP_ZIP)
                self.expect("]")
                return ArraySlice(span=base.span, base=base,
                                  spec=SliceSpec(span=open_tok.span, variant="to", b=b))
            first = self.parse_expression(BP_ZIP)
            if self.at(":"):
                indexes = [first]
                while self.at(":"):
                    self.next()
                    indexes.append(self.parse_expression(BP_ZIP))
                self.expect("]")
                return ArraySlice(span=base.span, base=base,
                                  spec=SliceSpec(span=open_tok.span, variant="indexes",
                                                 indexes=indexes))
            if self.at("-->"):
                self.next()
                self.expect("]")
                return ArraySlice(span=base.span, base=base,
                                  spec=SliceSpec(span=open_tok.span, variant="from", a=first))
            if self.at(">--<"):
                self.next()
                b = self.parse_expression(BP_ZIP)
                self.expect("]")
                return ArraySlice(span=base.span, base=base,
                                  spec=self._checked_range("between", first, b, open_tok))
            if self.at("<-->"):
                self.next()
                b = self.parse_expression(BP_ZIP)
                self.expect("]")
                return ArraySlice(span=base.span, base=base,
                                  spec=self._checked_range("outside", first, b, open_tok))
            self.expect("]")
            return Member(span=base.span, obj=base, prop=first, computed=True)
        finally:
            self.group_depth -= 1

    def _checked_range(self, variant, a, b, open_tok) -> SliceSpec:
        if isinstance(a, NumberLit) and isinstance(b, NumberLit):
            if variant == "between" and a.value > b.value:
                raise self.error("indexes not well-ordered", open_tok.span, dg.E_SLICE_ORDER)
            if variant == "outside" and a.value >= b.value:
                raise self.error("indexes not well-ordered", open_tok.span, dg.E_SLICE_ORDER)
        return SliceSpec(span=open_tok.span, variant=variant, a=a, b=b)

    def _array_push(self, base):
        start = self.next()  # []
        count = None
        if self.at("*"):
            self.next()
            count = self.parse_expression(BP_MUL)
        if not self.at("="):
            raise self.error("push operator requires '= <value>'", start.span)
        self.next()
        value = self.parse_expression(BP_ASSIGN - 1)
        return ArrayPush(span=base.span, base=base, value=value, count=count)

    def _array_pop(self, base):
        self.next()  # ][
        count = None
        if self.at("*"):
            self.next()
            count = self.parse_expression(BP_MUL)
        return ArrayPop(span=base.span, base=base, count=count)


def parse_program(unit: SourceUnit, tokens: list, sink: DiagnosticSink | None = None,
                  syntax: OperatorSyntax | None = None) -> Program:
    return Parser(unit, tokens, sink, syntax).parse_program()


def parse_text(text: str, name: str = "<text>", sink: DiagnosticSink | None = None,
               syntax: OperatorSyntax | None = None) -> Program:
    from .source import unit_from_text

    unit = unit_from_text(name, text)
    sink = sink if sink is not None else DiagnosticSink()
    extra = frozenset()
    if syntax is not None:
        extra = frozenset(
            s for s in (set(syntax.infix) | set(syntax.prefix) | set(syntax.postfix))
            if s not in lx.BUILTIN_OPS
        )
    tokens = lx.tokenize(unit, lx.LexConfig(extra_symbolic_ops=extra), sink)
    return parse_program(unit, tokens, sink, syntax)
