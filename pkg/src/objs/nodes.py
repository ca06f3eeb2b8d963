"""AST node definitions: the standard ECMAScript subset plus every extended
construct of the dialect.

Nodes are plain dataclasses. `span` is positional metadata and is excluded
from structural equality (`ast_equal`), which is what snapshot comparisons
and the parse-print-parse fixpoint use.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional, Union

from .source import Span

NO_SPAN = Span("<none>", 0, 0, 0)


@dataclass
class Node:
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


# --------------------------------------------------------------------------
# expressions: standard
# --------------------------------------------------------------------------

@dataclass
class Ident(Node):
    name: str = ""


@dataclass
class NumberLit(Node):
    value: float = 0.0


@dataclass
class StringLit(Node):
    value: str = ""


@dataclass
class BoolLit(Node):
    value: bool = False


@dataclass
class NullLit(Node):
    pass


@dataclass
class RegexLit(Node):
    pattern: str = ""
    flags: str = ""


@dataclass
class TemplateLit(Node):
    raw: str = ""  # backtick-delimited, passed through verbatim


@dataclass
class ThisExpr(Node):
    pass


@dataclass
class ArrayLit(Node):
    elements: list = field(default_factory=list)


@dataclass
class ObjectProp(Node):
    key: Node = None
    value: Node = None
    computed: bool = False
    shorthand: bool = False
    method: bool = False
    ret_type: Optional[str] = None  # typed JSON method: `Type name : function...`


@dataclass
class ObjectLit(Node):
    props: list = field(default_factory=list)


@dataclass
class Param(Node):
    name: str = ""
    type_name: Optional[str] = None
    by_ref: bool = False
    safe: bool = False


@dataclass
class FuncExpr(Node):
    name: Optional[str] = None
    params: list = field(default_factory=list)
    body: "Block" = None
    ret_type: Optional[str] = None


@dataclass
class ArrowFunc(Node):
    params: list = field(default_factory=list)
    body: Node = None  # Block or expression
    ret_type: Optional[str] = None


@dataclass
class Unary(Node):
    op: str = ""
    arg: Node = None


@dataclass
class Update(Node):
    op: str = ""
    arg: Node = None
    prefix: bool = False


@dataclass
class Binary(Node):
    op: str = ""
    left: Node = None
    right: Node = None


@dataclass
class Logical(Node):
    op: str = ""  # && ||
    left: Node = None
    right: Node = None


@dataclass
class Assign(Node):
    op: str = "="
    target: Node = None
    value: Node = None


@dataclass
class Ternary(Node):
    cond: Node = None
    cons: Node = None
    alt: Node = None


@dataclass
class Call(Node):
    callee: Node = None
    args: list = field(default_factory=list)


@dataclass
class New(Node):
    callee: Node = None
    args: Optional[list] = None  # None: `new X` without parentheses


@dataclass
class Member(Node):
    obj: Node = None
    prop: Node = None
    computed: bool = False


@dataclass
class Sequence(Node):
    exprs: list = field(default_factory=list)


@dataclass
class Spread(Node):
    arg: Node = None


# --------------------------------------------------------------------------
# statements: standard
# --------------------------------------------------------------------------

@dataclass
class Program(Node):
    body: list = field(default_factory=list)


@dataclass
class Block(Node):
    body: list = field(default_factory=list)


@dataclass
class EmptyStmt(Node):
    pass


@dataclass
class ExprStmt(Node):
    expr: Node = None


@dataclass
class Declarator(Node):
    name: Node = None  # Ident
    init: Optional[Node] = None


@dataclass
class VarDecl(Node):
    kind: str = "var"  # var | let | const
    declarators: list = field(default_factory=list)


@dataclass
class FuncDecl(Node):
    name: str = ""
    params: list = field(default_factory=list)
    body: Block = None
    ret_type: Optional[str] = None


@dataclass
class MethodDef(Node):
    name: str = ""
    params: list = field(default_factory=list)
    body: Block = None
    ret_type: Optional[str] = None
    static: bool = False
    kind: str = "method"  # method | constructor | get | set


@dataclass
class FieldDef(Node):
    name: str = ""
    init: Optional[Node] = None
    static: bool = False


@dataclass
class ClassDecl(Node):
    name: Optional[str] = None
    superclass: Optional[Node] = None
    members: list = field(default_factory=list)


@dataclass
class If(Node):
    cond: Node = None
    then: Node = None
    else_: Optional[Node] = None


@dataclass
class For(Node):
    init: Optional[Node] = None  # VarDecl or expression
    test: Optional[Node] = None
    update: Optional[Node] = None
    body: Node = None


@dataclass
class ForIn(Node):
    decl_kind: Optional[str] = None  # None: bare target
    target: Node = None
    obj: Node = None
    body: Node = None
    of: bool = False  # True: for-of


@dataclass
class While(Node):
    cond: Node = None
    body: Node = None


@dataclass
class DoWhile(Node):
    body: Node = None
    cond: Node = None


@dataclass
class SwitchCase(Node):
    test: Optional[Node] = None  # None: default
    body: list = field(default_factory=list)


@dataclass
class Switch(Node):
    disc: Node = None
    cases: list = field(default_factory=list)


@dataclass
class Return(Node):
    arg: Optional[Node] = None


@dataclass
class Break(Node):
    label: Optional[str] = None


@dataclass
class Continue(Node):
    label: Optional[str] = None


@dataclass
class Throw(Node):
    arg: Node = None


@dataclass
class TryStmt(Node):
    block: Block = None
    param: Optional[str] = None
    handler: Optional[Block] = None
    finalizer: Optional[Block] = None


@dataclass
class Labeled(Node):
    label: str = ""
    stmt: Node = None


@dataclass
class Debugger(Node):
    pass


# --------------------------------------------------------------------------
# extended constructs
# --------------------------------------------------------------------------

@dataclass
class MultiAction(Node):
    """Tuple pattern `(t1, .., tn) <op> rhs` distributing assign or compare."""

    op: str = "="  # = | == | ===
    decl_kind: Optional[str] = None  # var/let/const when written as declaration
    targets: list = field(default_factory=list)
    values: list = field(default_factory=list)  # parsed rhs elements
    one_to_many: bool = False  # single bare rhs fanned to every target
    wildcard_index: Optional[int] = None  # index of `*` among values


@dataclass
class SliceSpec(Node):
    variant: str = "indexes"  # indexes | from | to | between | outside
    indexes: list = field(default_factory=list)
    a: Optional[Node] = None
    b: Optional[Node] = None


@dataclass
class ArraySlice(Node):
    base: Node = None
    spec: SliceSpec = None


@dataclass
class ArrayPush(Node):
    base: Node = None
    value: Node = None
    count: Optional[Node] = None


@dataclass
class ArrayPop(Node):
    base: Node = None
    count: Optional[Node] = None


@dataclass
class JsonZip(Node):
    keys: Node = None
    values: Node = None


@dataclass
class Decorated(Node):
    """`@name` token in expression position; `arg` holds `@parent(k)`'s k."""

    name: str = ""
    arg: Optional[Node] = None


@dataclass
class ReverseSelfOp(Node):
    op: str = "+"  # the underlying binary operator
    lhs: Node = None
    rhs: Node = None


@dataclass
class IfChain(Node):
    conds: list = field(default_factory=list)
    then: Node = None
    else_: Optional[Node] = None


@dataclass
class Fork(Node):
    cond: Node = None
    id1: Node = None
    id2: Node = None
    v1: Node = None
    v2: Optional[Node] = None


@dataclass
class BinCond(Node):
    op: str = ""  # ?? ?: ?== ?=== ?< ?> ?<= ?>=
    left: Node = None
    right: Node = None


@dataclass
class Namespace(Node):
    path: list = field(default_factory=list)
    body: list = field(default_factory=list)


@dataclass
class UseAlias(Node):
    path: list = field(default_factory=list)
    alias: str = ""


@dataclass
class NamespaceRef(Node):
    segments: list = field(default_factory=list)  # [ns.., name]
    absolute: bool = False


@dataclass
class TypedInit(Node):
    """Initializer element of a typified declaration: `int _real = 1` or
    `complex (1,2)` nested inside the parenthesized argument list."""

    type_name: str = ""
    name: Optional[str] = None
    args: list = field(default_factory=list)


@dataclass
class TypifiedDeclarator(Node):
    name: str = ""
    args: Optional[list] = None  # None: no-arg constructor


@dataclass
class TypifiedDecl(Node):
    type_name: str = ""
    declarators: list = field(default_factory=list)


@dataclass
class BlockRepeat(Node):
    count: Node = None
    body: Block = None


@dataclass
class SeqLiteral(Node):
    start: Node = None
    end: Node = None


@dataclass
class CastExpr(Node):
    type_name: str = ""
    operand: Optional[Node] = None
    args: Optional[list] = None  # construct-style cast `(T)(a, b)`


@dataclass
class CommandExpr(Node):
    name: str = ""
    args: list = field(default_factory=list)
    polyadic: bool = False


@dataclass
class Postfix(Node):
    op: str = ""
    arg: Node = None


EXTENDED_KINDS = (
    MultiAction, ArraySlice, ArrayPush, ArrayPop, JsonZip, Decorated,
    ReverseSelfOp, IfChain, Fork, BinCond, Namespace, UseAlias, NamespaceRef,
    TypifiedDecl, BlockRepeat, SeqLiteral, CastExpr, CommandExpr, Postfix,
    SliceSpec, TypedInit, TypifiedDeclarator,
)


def is_standard(node: Node) -> bool:
    return not isinstance(node, EXTENDED_KINDS)


def children(node: Node):
    """Yield every child Node (recursing into list fields)."""
    for f in fields(node):
        if f.name == "span":
            continue
        v = getattr(node, f.name)
        if isinstance(v, Node):
            yield v
        elif isinstance(v, list):
            for item in v:
                if isinstance(item, Node):
                    yield item


def walk(node: Node):
    """Pre-order traversal."""
    yield node
    for c in children(node):
        yield from walk(c)


def count_nodes(node: Node) -> int:
    return sum(1 for _ in walk(node))


def _unwrap_block(n: Node) -> Node:
    while isinstance(n, Block) and len(n.body) == 1:
        n = n.body[0]
    return n


def ast_equal(a: Node, b: Node, normalize_blocks: bool = True) -> bool:
    """Structural equality ignoring spans.

    With `normalize_blocks`, a single-statement block is equal to that bare
    statement wherever one appears (brace style is formatting, not meaning).
    """
    if normalize_blocks:
        a, b = _unwrap_block(a), _unwrap_block(b)
    if type(a) is not type(b):
        return False
    if not isinstance(a, Node):
        return a == b
    for f in fields(a):
        if f.name == "span":
            continue
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, Node) and isinstance(vb, Node):
            if not ast_equal(va, vb, normalize_blocks):
                return False
        elif isinstance(va, list) and isinstance(vb, list):
            if len(va) != len(vb):
                return False
            for xa, xb in zip(va, vb):
                if isinstance(xa, Node) and isinstance(xb, Node):
                    if not ast_equal(xa, xb, normalize_blocks):
                        return False
                elif xa != xb:
                    return False
        elif va != vb:
            return False
    return True
