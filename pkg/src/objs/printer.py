"""Deterministic pretty-printer for both the extended and the lowered AST.

Parenthesization is derived from precedence, so the printer never needs
parser-side parentheses to be recorded. Statement heads report their spans to
an optional mapping collector (the source-map builder).
"""

from __future__ import annotations

import math

from .nodes import *  # noqa: F401,F403
from .source import Span

# Printing precedence levels (higher binds tighter).
P_SEQ = 1
P_ASSIGN = 2
P_FORK = 2
P_ZIP = 2
P_TERNARY = 3
P_BINCOND = 4
P_OR = 5
P_AND = 6
P_BITOR = 7
P_BITXOR = 8
P_BITAND = 9
P_EQ = 10
P_REL = 11
P_SHIFT = 12
P_ADD = 13
P_MUL = 14
P_EXP = 15
P_UNARY = 16
P_POSTFIX = 17
P_CALL = 18
P_PRIMARY = 19

_BIN_PREC = {
    "||": P_OR, "&&": P_AND, "|": P_BITOR, "^": P_BITXOR, "&": P_BITAND,
    "==": P_EQ, "!=": P_EQ, "===": P_EQ, "!==": P_EQ,
    "<": P_REL, ">": P_REL, "<=": P_REL, ">=": P_REL, "in": P_REL,
    "instanceof": P_REL,
    "<<": P_SHIFT, ">>": P_SHIFT, ">>>": P_SHIFT,
    "+": P_ADD, "-": P_ADD, "*": P_MUL, "/": P_MUL, "%": P_MUL, "**": P_EXP,
}


def js_number(value: float) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if float(value).is_integer() and abs(value) < 2 ** 53:
        return str(int(value))
    text = repr(float(value))
    if "e" in text:  # 1e+21 -> 1e+21, 1e-07 -> 1e-7
        mantissa, exp = text.split("e")
        sign = "-" if exp.startswith("-") else "+"
        digits = exp.lstrip("+-").lstrip("0") or "0"
        text = f"{mantissa}e{sign}{digits}"
    return text


def js_string(value: str, quote: str = "'") -> str:
    out = [quote]
    for c in value:
        if c == quote:
            out.append("\\" + c)
        elif c == "\\":
            out.append("\\\\")
        elif c == "\n":
            out.append("\\n")
        elif c == "\r":
            out.append("\\r")
        elif c == "\t":
            out.append("\\t")
        elif c == "\0":
            out.append("\\0")
        elif ord(c) < 0x20:
            out.append(f"\\x{ord(c):02x}")
        else:
            out.append(c)
    out.append(quote)
    return "".join(out)


class Printer:
    def __init__(self, indent: str = "    "):
        self.indent_unit = indent
        self.lines: list[str] = []
        self.cur = ""
        self.depth = 0
        self.mappings: list[tuple[int, int, Span]] = []  # (gen line 1-based, gen col 0-based, span)

    # -- output plumbing -------------------------------------------------

    def w(self, text: str):
        self.cur += text

    def nl(self):
        # expressions may embed function bodies with real newlines; split so
        # generated line numbers stay accurate for the source map
        self.lines.extend(self.cur.split("\n"))
        self.cur = ""

    def start_line(self):
        self.cur = self.indent_unit * self.depth

    def mark(self, node: Node):
        if node.span is not NO_SPAN and node.span.line > 0:
            self.mappings.append((len(self.lines) + 1, len(self.cur), node.span))

    def text(self) -> str:
        out = "\n".join(self.lines)
        return out + "\n" if out else ""

    # -- program ----------------------------------------------------------

    def print_program(self, prog: Program) -> str:
        for stmt in prog.body:
            self.stmt(stmt)
        return self.text()

    # -- statements --------------------------------------------------------

    def stmt(self, node: Node):
        self.start_line()
        self.mark(node)
        self._stmt_inner(node)

    def _stmt_inner(self, node: Node):
        m = getattr(self, "s_" + type(node).__name__, None)
        if m is None:
            # expression used in statement position
            self.w(self.expr(node, P_SEQ) + ";")
            self.nl()
            return
        m(node)

    def s_EmptyStmt(self, n):
        self.w(";")
        self.nl()

    def s_ExprStmt(self, n):
        self.w(self.expr(n.expr, P_SEQ) + ";")
        self.nl()

    def s_VarDecl(self, n, terminate=True):
        parts = []
        for d in n.declarators:
            if d.init is None:
                parts.append(self.expr(d.name, P_PRIMARY))
            else:
                parts.append(f"{self.expr(d.name, P_PRIMARY)} = {self.expr(d.init, P_ASSIGN)}")
        self.w(f"{n.kind} " + ", ".join(parts))
        if terminate:
            self.w(";")
            self.nl()

    def s_FuncDecl(self, n):
        ret = f"{n.ret_type} " if n.ret_type else ""
        self.w(f"{ret}function {n.name}({self.params(n.params)}) ")
        self.block_inline(n.body)
        self.nl()

    def s_ClassDecl(self, n):
        self.w("class")
        if n.name:
            self.w(f" {n.name}")
        if n.superclass is not None:
            self.w(f" extends {self.expr(n.superclass, P_CALL)}")
        self.w(" {")
        self.nl()
        self.depth += 1
        for member in n.members:
            if isinstance(member, list):
                for item in member:
                    self.stmt(item)
            else:
                self.stmt(member)
        self.depth -= 1
        self.start_line()
        self.w("}")
        self.nl()

    def s_MethodDef(self, n):
        prefix = "static " if n.static else ""
        ret = f"{n.ret_type} " if n.ret_type else ""
        self.w(f"{prefix}{ret}{n.name}({self.params(n.params)}) ")
        self.block_inline(n.body)
        self.nl()

    def s_FieldDef(self, n):
        prefix = "static " if n.static else ""
        if n.init is None:
            self.w(f"{prefix}{n.name};")
        else:
            self.w(f"{prefix}{n.name} = {self.expr(n.init, P_ASSIGN)};")
        self.nl()

    def s_Block(self, n):
        self.block_inline(n)
        self.nl()

    def block_inline(self, block: Block):
        self.w("{")
        self.nl()
        self.depth += 1
        for stmt in block.body:
            self.stmt(stmt)
        self.depth -= 1
        self.start_line()
        self.w("}")

    def _nested(self, body: Node):
        """Print a statement body as a braced block (normalized style)."""
        if isinstance(body, Block):
            self.block_inline(body)
        else:
            self.w("{")
            self.nl()
            self.depth += 1
            self.stmt(body)
            self.depth -= 1
            self.start_line()
            self.w("}")

    def s_If(self, n):
        self.w(f"if ({self.expr(n.cond, P_SEQ)}) ")
        self._nested(n.then)
        if n.else_ is not None:
            self.w(" else ")
            if isinstance(n.else_, (If, IfChain)):
                self._stmt_inner(n.else_)
                return
            self._nested(n.else_)
        self.nl()

    def s_IfChain(self, n):
        conds = ", ".join(self.expr(c, P_ASSIGN) for c in n.conds)
        self.w(f"ifchain ({conds}) ")
        self._nested(n.then)
        if n.else_ is not None:
            self.w(" else ")
            if isinstance(n.else_, (If, IfChain)):
                self._stmt_inner(n.else_)
                return
            self._nested(n.else_)
        self.nl()

    def s_For(self, n):
        self.w("for (")
        if isinstance(n.init, VarDecl):
            self.s_VarDecl(n.init, terminate=False)
        elif isinstance(n.init, ExprStmt):
            self.w(self.expr(n.init.expr, P_SEQ))
        self.w("; ")
        if n.test is not None:
            self.w(self.expr(n.test, P_SEQ))
        self.w("; ")
        if n.update is not None:
            self.w(self.expr(n.update, P_SEQ))
        self.w(") ")
        self._nested(n.body)
        self.nl()

    def s_ForIn(self, n):
        kw = "of" if n.of else "in"
        decl = f"{n.decl_kind} " if n.decl_kind else ""
        self.w(f"for ({decl}{self.expr(n.target, P_ASSIGN)} {kw} {self.expr(n.obj, P_SEQ)}) ")
        self._nested(n.body)
        self.nl()

    def s_While(self, n):
        self.w(f"while ({self.expr(n.cond, P_SEQ)}) ")
        self._nested(n.body)
        self.nl()

    def s_DoWhile(self, n):
        self.w("do ")
        self._nested(n.body)
        self.w(f" while ({self.expr(n.cond, P_SEQ)});")
        self.nl()

    def s_Switch(self, n):
        self.w(f"switch ({self.expr(n.disc, P_SEQ)}) {{")
        self.nl()
        self.depth += 1
        for case in n.cases:
            self.start_line()
            if case.test is None:
                self.w("default:")
            else:
                self.w(f"case {self.expr(case.test, P_ZIP + 1)}:")
            self.nl()
            self.depth += 1
            for stmt in case.body:
                self.stmt(stmt)
            self.depth -= 1
        self.depth -= 1
        self.start_line()
        self.w("}")
        self.nl()

    def s_Return(self, n):
        if n.arg is None:
            self.w("return;")
        else:
            self.w(f"return {self.expr(n.arg, P_SEQ)};")
        self.nl()

    def s_Break(self, n):
        self.w(f"break {n.label};" if n.label else "break;")
        self.nl()

    def s_Continue(self, n):
        self.w(f"continue {n.label};" if n.label else "continue;")
        self.nl()

    def s_Throw(self, n):
        self.w(f"throw {self.expr(n.arg, P_SEQ)};")
        self.nl()

    def s_TryStmt(self, n):
        self.w("try ")
        self.block_inline(n.block)
        if n.handler is not None:
            self.w(" catch ")
            if n.param:
                self.w(f"({n.param}) ")
            self.block_inline(n.handler)
        if n.finalizer is not None:
            self.w(" finally ")
            self.block_inline(n.finalizer)
        self.nl()

    def s_Labeled(self, n):
        self.w(f"{n.label}: ")
        self._stmt_inner(n.stmt)

    def s_Debugger(self, n):
        self.w("debugger;")
        self.nl()

    # -- extended statements ------------------------------------------------

    def s_Namespace(self, n):
        self.w("namespace \\" + "\\".join(n.path) + " {")
        self.nl()
        self.depth += 1
        for stmt in n.body:
            self.stmt(stmt)
        self.depth -= 1
        self.start_line()
        self.w("}")
        self.nl()

    def s_UseAlias(self, n):
        self.w("use \\" + "\\".join(n.path) + f" as {n.alias};")
        self.nl()

    def s_TypifiedDecl(self, n):
        parts = []
        for d in n.declarators:
            if d.args is None:
                parts.append(d.name)
            else:
                parts.append(f"{d.name} = {self._typified_init(d.args)}")
        self.w(f"{n.type_name} " + ", ".join(parts) + ";")
        self.nl()

    def _typified_init(self, args: list) -> str:
        if len(args) == 1 and isinstance(args[0], (ArrowFunc, FuncExpr)):
            return self.expr(args[0], P_ASSIGN)
        if len(args) == 1 and not isinstance(args[0], TypedInit):
            return self.expr(args[0], P_ASSIGN)
        return "(" + ", ".join(self.expr(a, P_ASSIGN) for a in args) + ")"

    def s_BlockRepeat(self, n):
        self.w(f"{self.expr(n.count, P_MUL + 1)} * ")
        self.block_inline(n.body)
        self.nl()

    def s_MultiAction(self, n):
        self.w(self.expr(n, P_SEQ) + ";")
        self.nl()

    # -- expressions ---------------------------------------------------------

    def params(self, params: list) -> str:
        out = []
        for p in params:
            if p.by_ref:
                out.append(f"{p.type_name} & {p.name}")
            elif p.safe:
                out.append(f"{p.type_name} @{p.name}")
            elif p.type_name:
                out.append(f"{p.type_name} {p.name}")
            else:
                out.append(p.name)
        return ", ".join(out)

    def expr(self, node: Node, min_prec: int) -> str:
        text, prec = self._expr(node)
        if prec < min_prec:
            return f"({text})"
        return text

    def _expr(self, node: Node) -> tuple[str, int]:
        m = getattr(self, "e_" + type(node).__name__, None)
        if m is None:
            raise NotImplementedError(f"printer: no rule for {type(node).__name__}")
        return m(node)

    def e_Ident(self, n):
        return n.name, P_PRIMARY

    def e_NumberLit(self, n):
        return js_number(n.value), P_PRIMARY

    def e_StringLit(self, n):
        return js_string(n.value), P_PRIMARY

    def e_TemplateLit(self, n):
        return n.raw, P_PRIMARY

    def e_BoolLit(self, n):
        return ("true" if n.value else "false"), P_PRIMARY

    def e_NullLit(self, n):
        return "null", P_PRIMARY

    def e_RegexLit(self, n):
        return f"/{n.pattern}/{n.flags}", P_PRIMARY

    def e_ThisExpr(self, n):
        return "this", P_PRIMARY

    def e_ArrayLit(self, n):
        return "[" + ", ".join(self.expr(e, P_ASSIGN) for e in n.elements) + "]", P_PRIMARY

    def e_Spread(self, n):
        return "..." + self.expr(n.arg, P_ASSIGN), P_ASSIGN

    def e_ObjectLit(self, n):
        if not n.props:
            return "{}", P_PRIMARY
        parts = []
        for p in n.props:
            parts.append(self._prop(p))
        return "{ " + ", ".join(parts) + " }", P_PRIMARY

    def _prop(self, p: ObjectProp) -> str:
        key, _ = self._expr(p.key)
        if p.shorthand:
            return key
        if p.method and isinstance(p.value, FuncExpr):
            fn = p.value
            body = self._block_text(fn.body)
            return f"{key}({self.params(fn.params)}) {body}"
        prefix = f"{p.ret_type} " if p.ret_type else ""
        return f"{prefix}{key}: {self.expr(p.value, P_ASSIGN)}"

    def _block_text(self, block: Block) -> str:
        sub = Printer(self.indent_unit)
        sub.depth = self.depth
        sub.block_inline(block)
        sub.lines.append(sub.cur)
        return "\n".join(sub.lines).lstrip()

    def e_FuncExpr(self, n):
        ret = f"{n.ret_type} " if n.ret_type else ""
        name = f" {n.name}" if n.name else ""
        return f"{ret}function{name}({self.params(n.params)}) {self._block_text(n.body)}", P_PRIMARY

    def e_ArrowFunc(self, n):
        ret = f"{n.ret_type} " if n.ret_type else ""
        head = f"({self.params(n.params)})"
        if isinstance(n.body, Block):
            return f"{ret}{head} => {self._block_text(n.body)}", P_ASSIGN
        return f"{ret}{head} => {self.expr(n.body, P_ASSIGN)}", P_ASSIGN

    def e_Unary(self, n):
        arg = self.expr(n.arg, P_UNARY)
        if n.op.isalpha():
            return f"{n.op} {arg}", P_UNARY
        return f"{n.op}{arg}", P_UNARY

    def e_Update(self, n):
        if n.prefix:
            return f"{n.op}{self.expr(n.arg, P_UNARY)}", P_UNARY
        return f"{self.expr(n.arg, P_POSTFIX)}{n.op}", P_POSTFIX

    def e_Postfix(self, n):
        return f"{self.expr(n.arg, P_POSTFIX)}{n.op}", P_POSTFIX

    def e_Binary(self, n):
        prec = _BIN_PREC.get(n.op, P_ADD)
        if n.op == "**":  # right-assoctative
            left = self.expr(n.left, prec + 1)
            right = self.expr(n.right, prec)
        else:
            left = self.expr(n.left, prec)
            right = self.expr(n.right, prec + 1)
        return f"{left} {n.op} {right}", prec

    def e_Logical(self, n):
        prec = _BIN_PREC[n.op]
        return f"{self.expr(n.left, prec)} {n.op} {self.expr(n.right, prec + 1)}", prec

    def e_Assign(self, n):
        return (f"{self.expr(n.target, P_UNARY)} {n.op} {self.expr(n.value, P_ASSIGN)}",
                P_ASSIGN)

    def e_ReverseSelfOp(self, n):
        return (f"{self.expr(n.lhs, P_UNARY)} ={n.op} {self.expr(n.rhs, P_ASSIGN)}",
                P_ASSIGN)

    def e_Ternary(self, n):
        return (f"{self.expr(n.cond, P_TERNARY + 1)} ? {self.expr(n.cons, P_ASSIGN)}"
                f" : {self.expr(n.alt, P_TERNARY)}", P_TERNARY)

    def e_BinCond(self, n):
        return (f"{self.expr(n.left, P_BINCOND)} {n.op} {self.expr(n.right, P_BINCOND + 1)}",
                P_BINCOND)

    def e_Fork(self, n):
        parts = [self.expr(n.id1, P_BINCOND), self.expr(n.id2, P_BINCOND),
                 self.expr(n.v1, P_BINCOND)]
        if n.v2 is not None:
            parts.append(self.expr(n.v2, P_BINCOND))
        return f"{self.expr(n.cond, P_FORK + 1)} |< " + " : ".join(parts), P_FORK

    def e_JsonZip(self, n):
        return (f"{self.expr(n.keys, P_ZIP + 1)} : {self.expr(n.values, P_ZIP + 1)}",
                P_ZIP)

    def e_Sequence(self, n):
        return ", ".join(self.expr(e, P_SEQ + 1) for e in n.exprs), P_SEQ

    def e_Call(self, n):
        args = ", ".join(self.expr(a, P_ASSIGN) for a in n.args)
        return f"{self.expr(n.callee, P_CALL)}({args})", P_CALL

    def e_New(self, n):
        callee = self.expr(n.callee, P_CALL + 1)
        if n.args is None:
            return f"new {callee}", P_CALL
        args = ", ".join(self.expr(a, P_ASSIGN) for a in n.args)
        return f"new {callee}({args})", P_CALL

    def e_Member(self, n):
        obj = self.expr(n.obj, P_CALL)
        if isinstance(n.obj, NumberLit):
            obj = f"({obj})"
        if n.computed:
            return f"{obj}[{self.expr(n.prop, P_SEQ)}]", P_CALL
        return f"{obj}.{self.expr(n.prop, P_PRIMARY)}", P_CALL

    def e_NamespaceRef(self, n):
        prefix = "\\" if n.absolute else ""
        return prefix + "\\".join(n.segments), P_PRIMARY

    def e_Decorated(self, n):
        if n.arg is not None:
            return f"{n.name}({self.expr(n.arg, P_ASSIGN)})", P_PRIMARY
        return n.name, P_PRIMARY

    def e_CastExpr(self, n):
        if n.args is not None:
            args = ", ".join(self.expr(a, P_ASSIGN) for a in n.args)
            return f"({n.type_name})({args})", P_UNARY
        return f"({n.type_name}){self.expr(n.operand, P_UNARY)}", P_UNARY

    def e_CommandExpr(self, n):
        if n.polyadic or len(n.args) != 2:
            head = self.expr(n.args[0], P_REL)
            tail = ", ".join(self.expr(a, P_ASSIGN) for a in n.args[1:])
            return f"{head} {n.name}({tail})", P_REL
        return (f"{self.expr(n.args[0], P_REL)} {n.name} {self.expr(n.args[1], P_REL + 1)}",
                P_REL)

    def e_ArraySlice(self, n):
        base = self.expr(n.base, P_CALL)
        s = n.spec
        if s.variant == "indexes":
            inner = ":".join(self.expr(i, P_ZIP + 1) for i in s.indexes)
        elif s.variant == "from":
            inner = f"{self.expr(s.a, P_ZIP + 1)}-->"
        elif s.variant == "to":
            inner = f"<--{self.expr(s.b, P_ZIP + 1)}"
        elif s.variant == "between":
            inner = f"{self.expr(s.a, P_ZIP + 1)}>--<{self.expr(s.b, P_ZIP + 1)}"
        else:
            inner = f"{self.expr(s.a, P_ZIP + 1)}<-->{self.expr(s.b, P_ZIP + 1)}"
        return f"{base}[{inner}]", P_CALL

    def e_ArrayPush(self, n):
        base = self.expr(n.base, P_CALL)
        count = f" * {self.expr(n.count, P_MUL + 1)}" if n.count is not None else ""
        return f"{base}[]{count} = {self.expr(n.value, P_ASSIGN)}", P_ASSIGN

    def e_ArrayPop(self, n):
        base = self.expr(n.base, P_CALL)
        count = f" * {self.expr(n.count, P_MUL + 1)}" if n.count is not None else ""
        return f"{base}][{count}", P_POSTFIX

    def e_SeqLiteral(self, n):
        return (f"({self.expr(n.start, P_ASSIGN)}, ..., {self.expr(n.end, P_ASSIGN)})",
                P_PRIMARY)

    def e_TypedInit(self, n):
        if n.name is not None:
            if n.args:
                return f"{n.type_name} {n.name} = {self.expr(n.args[0], P_ASSIGN)}", P_ASSIGN
            return f"{n.type_name} {n.name}", P_ASSIGN
        args = ", ".join(self.expr(a, P_ASSIGN) for a in n.args)
        return f"{n.type_name} ({args})", P_ASSIGN

    def e_MultiAction(self, n):
        targets = ", ".join(self.expr(t, P_ASSIGN) for t in n.targets)
        if n.one_to_many:
            values = self.expr(n.values[0], P_ASSIGN)
        else:
            parts = [self.expr(v, P_ASSIGN) for v in n.values]
            if n.wildcard_index is not None:
                parts.insert(n.wildcard_index, "*")
            values = "(" + ", ".join(parts) + ")"
        decl = f"{n.decl_kind} " if n.decl_kind else ""
        return f"{decl}({targets}) {n.op} {values}", P_ASSIGN


def print_program(prog: Program, indent: str = "    ") -> str:
    return Printer(indent).print_program(prog)
