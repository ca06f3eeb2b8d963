"""Optimization pipeline, enabled by `pragma optimize`: constant folding,
constant propagation, unreachable-code pruning, dead-branch elimination,
unreferenced-parameter removal, and isolated-declaration deletion.

Runs after lowering, on standard AST only. Analysis is intraprocedural and
conservative: closures, event-handler targets, and side-effecting initializers
all disable the transformations that would touch them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from . import diagnostics as dg
from .diagnostics import DiagnosticSink
from .nodes import *  # noqa: F401,F403

MAX_ROUNDS = 10

_FOLDABLE_BINARY = {"+", "-", "*", "/", "%", "**", "==", "!=", "===", "!==",
                    "<", ">", "<=", ">=", "&", "|", "^", "<<", ">>", ">>>"}


def _literal_value(node):
    if isinstance(node, NumberLit):
        return node.value
    if isinstance(node, StringLit):
        return node.value
    if isinstance(node, BoolLit):
        return node.value
    if isinstance(node, NullLit):
        return None
    return _NOT_LITERAL


class _NotLiteral:
    pass


_NOT_LITERAL = _NotLiteral()


def _make_literal(value, span):
    if isinstance(value, bool):
        return BoolLit(span=span, value=value)
    if isinstance(value, (int, float)):
        return NumberLit(span=span, value=float(value))
    if isinstance(value, str):
        return StringLit(span=span, value=value)
    if value is None:
        return NullLit(span=span)
    return None


@dataclass
class OptimizeContext:
    sink: DiagnosticSink = field(default_factory=DiagnosticSink)
    protected: set = field(default_factory=set)  # event targets and handlers


def _map_children(node, fn):
    for f in fields(node):
        if f.name == "span":
            continue
        v = getattr(node, f.name)
        if isinstance(v, Node):
            setattr(node, f.name, fn(v))
        elif isinstance(v, list):
            setattr(node, f.name, [fn(x) if isinstance(x, Node) else x for x in v])
    return node


# --------------------------------------------------------------------------
# pass 1: constant folding
# --------------------------------------------------------------------------

def fold_constants(node, ctx: OptimizeContext):
    """Literal-only subtrees are replaced by their value (double semantics)."""
    node = _map_children(node, lambda c: fold_constants(c, ctx))

    if isinstance(node, Binary) and node.op in _FOLDABLE_BINARY:
        a = _literal_value(node.left)
        b = _literal_value(node.right)
        if a is _NOT_LITERAL or b is _NOT_LITERAL:
            return node
        value = _fold_binary(node.op, a, b, node.span, ctx)
        if value is _NOT_LITERAL:
            return node
        lit = _make_literal(value, node.span)
        return lit if lit is not None else node

    if isinstance(node, Logical):
        a = _literal_value(node.left)
        if a is not _NOT_LITERAL:
            take_right = bool(_truthy(a)) if node.op == "&&" else not _truthy(a)
            return node.right if take_right else node.left

    if isinstance(node, Unary):
        a = _literal_value(node.arg)
        if a is not _NOT_LITERAL:
            if node.op == "!":
                return BoolLit(span=node.span, value=not _truthy(a))
            if node.op == "-" and isinstance(a, (int, float)) and not isinstance(a, bool):
                return NumberLit(span=node.span, value=-a)
            if node.op == "+" and isinstance(a, (int, float)) and not isinstance(a, bool):
                return NumberLit(span=node.span, value=float(a))

    if isinstance(node, Ternary):
        c = _literal_value(node.cond)
        if c is not _NOT_LITERAL:
            return node.cons if _truthy(c) else node.alt

    return node


def _truthy(v) -> bool:
    if v is None:
        return False
    if isinstance(v, str):
        return len(v) > 0
    if isinstance(v, float) and math.isnan(v):
        return False
    return bool(v)


def _fold_binary(op, a, b, span, ctx):
    num = lambda v: float(v) if isinstance(v, bool) else v  # noqa: E731
    both_num = isinstance(a, (int, float)) and isinstance(b, (int, float))
    both_str = isinstance(a, str) and isinstance(b, str)
    if op == "+":
        if isinstance(a, str) or isinstance(b, str):
            return _js_str(a) + _js_str(b)
        if both_num:
            return num(a) + num(b)
        return _NOT_LITERAL
    if op in ("-", "*", "%", "**") and both_num:
        if op == "-":
            return num(a) - num(b)
        if op == "*":
            return num(a) * num(b)
        if op == "%":
            return math.fmod(num(a), num(b)) if b != 0 else math.nan
        return num(a) ** num(b)
    if op == "/" and both_num:
        if b == 0:
            ctx.sink.warn(dg.W_DIV_ZERO, "division by constant zero", span)
            if a == 0:
                return math.nan
            return math.inf if a > 0 else -math.inf
        return num(a) / num(b)
    if op in ("==", "!="):
        if both_num or both_str or (a is None and b is None):
            eq = a == b
            return eq if op == "==" else not eq
        return _NOT_LITERAL
    if op in ("===", "!=="):
        same = type(a) is type(b) and a == b
        return same if op == "===" else not same
    if op in ("<", ">", "<=", ">="):
        if both_num or both_str:
            return {"<": a < b, ">": a > b, "<=": a <= b, ">=": a >= b}[op]
        return _NOT_LITERAL
    if op in ("&", "|", "^", "<<", ">>", ">>>") and both_num:
        x, y = int(a), int(b)
        return float({"&": x & y, "|": x | y, "^": x ^ y, "<<": x << y,
                      ">>": x >> y, ">>>": (x % (1 << 32)) >> y}[op])
    return _NOT_LITERAL


def _js_str(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        from .printer import js_number

        return js_number(v)
    if v is None:
        return "null"
    return str(v)


# --------------------------------------------------------------------------
# pass 2: constant propagation
# --------------------------------------------------------------------------

def propagate_constants(node, ctx: OptimizeContext):
    """Identifiers with one literal definition and no redefinition are
    replaced at use sites. Scope model: per function body / program."""
    if isinstance(node, Program):
        _propagate_in_scope(node.body, ctx)
    for n in walk(node):
        if isinstance(n, (FuncDecl, FuncExpr)) and isinstance(n.body, Block):
            _propagate_in_scope(n.body.body, ctx)
        elif isinstance(n, ArrowFunc) and isinstance(n.body, Block):
            _propagate_in_scope(n.body.body, ctx)
    return node


def _propagate_in_scope(body: list, ctx: OptimizeContext):
    defs: dict[str, object] = {}
    banned: set[str] = set(ctx.protected)

    def scan(node, in_closure):
        if isinstance(node, VarDecl):
            for d in node.declarators:
                name = d.name.name
                if in_closure or name in defs:
                    banned.add(name)
                else:
                    lit = _literal_value(d.init) if d.init is not None else _NOT_LITERAL
                    if lit is not _NOT_LITERAL:
                        defs[name] = d.init
                    else:
                        banned.add(name)
        if isinstance(node, Assign) and isinstance(node.target, Ident):
            banned.add(node.target.name)
        if isinstance(node, Update) and isinstance(node.arg, Ident):
            banned.add(node.arg.name)
        if isinstance(node, Unary) and node.op == "delete":
            for sub in walk(node):
                if isinstance(sub, Ident):
                    banned.add(sub.name)
        if isinstance(node, ForIn) and isinstance(node.target, Ident):
            banned.add(node.target.name)
        closure = in_closure or isinstance(node, (FuncDecl, FuncExpr, ArrowFunc))
        for c in children(node):
            # a nested function referencing the name disables propagation
            if closure and isinstance(c, Ident):
                banned.add(c.name)
            scan(c, closure)

    for stmt in body:
        scan(stmt, False)

    live = {name: init for name, init in defs.items() if name not in banned}
    if not live:
        return

    def replace_idents(node, parent_kind=None):
        if isinstance(node, (FuncDecl, FuncExpr, ArrowFunc)):
            return node
        for f in fields(node):
            if f.name == "span":
                continue
            v = getattr(node, f.name)
            if isinstance(v, Ident) and v.name in live \
                    and not _is_def_position(node, f.name):
                setattr(node, f.name, _clone_literal(live[v.name]))
            elif isinstance(v, Node):
                replace_idents(v)
            elif isinstance(v, list):
                new_list = []
                for item in v:
                    if isinstance(item, Ident) and item.name in live:
                        new_list.append(_clone_literal(live[item.name]))
                    elif isinstance(item, Node):
                        replace_idents(item)
                        new_list.append(item)
                    else:
                        new_list.append(item)
                setattr(node, f.name, new_list)
        return node

    for stmt in body:
        replace_idents(stmt)


def _is_def_position(parent, field_name) -> bool:
    if isinstance(parent, Declarator) and field_name == "name":
        return True
    if isinstance(parent, Assign) and field_name == "target":
        return True
    if isinstance(parent, Update) and field_name == "arg":
        return True
    if isinstance(parent, Member) and field_name == "prop":
        return True
    if isinstance(parent, ObjectProp) and field_name == "key":
        return True
    if isinstance(parent, ForIn) and field_name == "target":
        return True
    return False


def _clone_literal(node):
    if isinstance(node, NumberLit):
        return NumberLit(span=node.span, value=node.value)
    if isinstance(node, StringLit):
        return StringLit(span=node.span, value=node.value)
    if isinstance(node, BoolLit):
        return BoolLit(span=node.span, value=node.value)
    if isinstance(node, NullLit):
        return NullLit(span=node.span)
    return node


# --------------------------------------------------------------------------
# pass 3: unreachable code after jumps
# --------------------------------------------------------------------------

def prune_unreachable(node, ctx: OptimizeContext):
    node = _map_children(node, lambda c: prune_unreachable(c, ctx))
    if isinstance(node, (Program, Block)):
        node.body = _cut_after_jump(node.body)
    if isinstance(node, SwitchCase):
        node.body = _cut_after_jump(node.body)
    return node


def _cut_after_jump(body: list) -> list:
    out = []
    for stmt in body:
        out.append(stmt)
        if isinstance(stmt, (Return, Throw, Break, Continue)):
            break
    return out


# --------------------------------------------------------------------------
# pass 4: dead branches
# --------------------------------------------------------------------------

def drop_dead_branches(node, ctx: OptimizeContext):
    node = _map_children(node, lambda c: drop_dead_branches(c, ctx))
    if isinstance(node, (Program, Block)):
        new_body = []
        for stmt in node.body:
            repl = _dead_branch_stmt(stmt)
            if repl is None:
                continue
            if isinstance(repl, list):
                new_body.extend(repl)
            else:
                new_body.append(repl)
        node.body = new_body
    return node


def _dead_branch_stmt(stmt):
    if isinstance(stmt, If):
        v = _literal_value(stmt.cond)
        if v is _NOT_LITERAL:
            return stmt
        if _truthy(v):
            return stmt.then
        return stmt.else_ if stmt.else_ is not None else None
    if isinstance(stmt, While):
        v = _literal_value(stmt.cond)
        if v is not _NOT_LITERAL and not _truthy(v):
            return None
        return stmt
    if isinstance(stmt, For) and stmt.test is not None:
        v = _literal_value(stmt.test)
        if v is not _NOT_LITERAL and not _truthy(v):
            return [stmt.init] if stmt.init is not None else None
        return stmt
    return stmt


# --------------------------------------------------------------------------
# pass 5: unreferenced trailing parameters
# --------------------------------------------------------------------------

def drop_unreferenced_params(node, ctx: OptimizeContext):
    """Trailing parameters never referenced in the body are dropped from the
    declaration and every statically known call site. Only local functions
    whose name never escapes qualify."""
    assert isinstance(node, Program)
    functions: dict[str, FuncDecl] = {}
    for stmt in node.body:
        if isinstance(stmt, FuncDecl):
            functions[stmt.name] = stmt

    escaped: set[str] = set(ctx.protected)
    call_sites: dict[str, list] = {name: [] for name in functions}

    def scan(n):
        if isinstance(n, Call) and isinstance(n.callee, Ident):
            # a direct call does not make the callee escape
            if n.callee.name in call_sites:
                call_sites[n.callee.name].append(n)
            for a in n.args:
                scan(a)
            return
        if isinstance(n, Ident) and n.name in functions:
            escaped.add(n.name)
            return
        for c in children(n):
            scan(c)

    scan(node)

    for name, decl in functions.items():
        if name in escaped or not decl.params:
            continue
        if _uses_arguments(decl.body):
            continue
        used = _referenced_names(decl.body)
        keep = len(decl.params)
        while keep > 0 and decl.params[keep - 1].name not in used:
            keep -= 1
        if keep == len(decl.params):
            continue
        decl.params = decl.params[:keep]
        for call in call_sites[name]:
            if len(call.args) > keep and all(
                    _side_effect_free(a) for a in call.args[keep:]):
                call.args = call.args[:keep]
    return node


def _uses_arguments(body) -> bool:
    return any(isinstance(n, Ident) and n.name == "arguments" for n in walk(body))


def _referenced_names(body) -> set:
    return {n.name for n in walk(body) if isinstance(n, Ident)}


# --------------------------------------------------------------------------
# pass 6: isolated declarations
# --------------------------------------------------------------------------

def remove_isolated(node, ctx: OptimizeContext):
    """Unused, side-effect-free declarations inside function bodies are
    deleted. Top-level declarations stay: globals are observable surface (and
    the reference outputs keep them after joint fold-and-propagate)."""
    assert isinstance(node, Program)
    uses: dict[str, int] = {}

    def count(n):
        if isinstance(n, VarDecl):
            for d in n.declarators:
                if d.init is not None:
                    count(d.init)
            return
        if isinstance(n, Ident):
            uses[n.name] = uses.get(n.name, 0) + 1
        for c in children(n):
            count(c)

    for stmt in node.body:
        count(stmt)

    def clean(block_body: list) -> list:
        out = []
        for stmt in block_body:
            if isinstance(stmt, VarDecl):
                keep = []
                for d in stmt.declarators:
                    name = d.name.name
                    if name in ctx.protected or uses.get(name, 0) > 0 \
                            or (d.init is not None and not _side_effect_free(d.init)):
                        keep.append(d)
                if keep:
                    stmt.declarators = keep
                    out.append(stmt)
                continue
            out.append(stmt)
        return out

    for n in walk(node):
        if isinstance(n, (FuncDecl, FuncExpr)) and isinstance(n.body, Block):
            for sub in walk(n.body):
                if isinstance(sub, Block):
                    sub.body = clean(sub.body)
        elif isinstance(n, ArrowFunc) and isinstance(n.body, Block):
            for sub in walk(n.body):
                if isinstance(sub, Block):
                    sub.body = clean(sub.body)
    return node


def _side_effect_free(node) -> bool:
    if node is None:
        return True
    if isinstance(node, (NumberLit, StringLit, BoolLit, NullLit, Ident, TemplateLit,
                         RegexLit, ThisExpr)):
        return True
    if isinstance(node, Unary) and node.op in ("-", "+", "!", "~", "typeof"):
        return _side_effect_free(node.arg)
    if isinstance(node, Binary):
        return _side_effect_free(node.left) and _side_effect_free(node.right)
    if isinstance(node, (ArrayLit,)):
        return all(_side_effect_free(e) for e in node.elements)
    if isinstance(node, ObjectLit):
        return all(_side_effect_free(p.value) for p in node.props)
    if isinstance(node, (FuncExpr, ArrowFunc)):
        return True
    return False


# --------------------------------------------------------------------------
# pipeline
# --------------------------------------------------------------------------

PASSES = (fold_constants, propagate_constants, prune_unreachable,
          drop_dead_branches, drop_unreferenced_params, remove_isolated)


def run_pipeline(program: Program, optimize: bool = True,
                 ctx: OptimizeContext | None = None) -> Program:
    """Iterate the passes jointly to a fixpoint, bounded at MAX_ROUNDS."""
    if not optimize:
        return program
    ctx = ctx or OptimizeContext()
    previous = None
    for _ in range(MAX_ROUNDS):
        for p in PASSES:
            before = count_nodes(program)
            program = p(program, ctx)
            after = count_nodes(program)
            assert after <= before, f"pass {p.__name__} grew the tree"
        fingerprint = _fingerprint(program)
        if fingerprint == previous:
            break
        previous = fingerprint
    return program


def _fingerprint(program: Program) -> str:
    from .printer import print_program

    return print_program(program)
