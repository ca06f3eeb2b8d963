"""Nominal datatypes, signature mangling, static inference, and the
static-vs-runtime dispatch decision.

Inference is total: whatever the formal recognition chain cannot prove gets
the generic Object type, and operators/calls over generic operands lower to
runtime dispatch instead of failing. Concrete, all-builtin expressions always
resolve statically so plain programs never grow runtime calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import diagnostics as dg
from .diagnostics import DiagnosticSink
from .nodes import *  # noqa: F401,F403
from .preprocessor import OverloadRegistry, canon_type
from .source import Span

BUILTIN_TYPES = ("Number", "String", "Boolean", "Array", "Object", "Function", "JSON")


@dataclass(frozen=True)
class TypeId:
    name: str
    kind: str  # builtin | user | generic

    def __str__(self) -> str:
        return self.name


UNKNOWN = TypeId("Object", "generic")  # a break in the recognition chain
T_NUMBER = TypeId("Number", "builtin")
T_STRING = TypeId("String", "builtin")
T_BOOLEAN = TypeId("Boolean", "builtin")
T_ARRAY = TypeId("Array", "builtin")
T_OBJECT = TypeId("Object", "builtin")
T_FUNCTION = TypeId("Function", "builtin")
T_JSON = TypeId("JSON", "builtin")

_BUILTIN_IDS = {t.name: t for t in
                (T_NUMBER, T_STRING, T_BOOLEAN, T_ARRAY, T_OBJECT, T_FUNCTION, T_JSON)}

# `a * b` on a user datatype translates to a method chain on the left operand.
ARITHMETIC_METHODS = {"+": "add", "-": "sub", "*": "mul", "/": "div"}

# Runtime reference classes shipped with the helper library.
RUNTIME_CLASSES = ("complex", "segment", "quaternion")

# Fields of the runtime complex class the checker may type.
_COMPLEX_FIELDS = {"real": T_NUMBER, "imag": T_NUMBER}


def mangle(name: str, param_types: list, known: set | None = None) -> str:
    """Signature mangling: base `$` type names joined by `$`.

    Injective over distinct parameter lists because `$` cannot appear in a
    datatype name; the no-parameter form is the bare `name$`.
    """
    names = [t.name if isinstance(t, TypeId) else str(t) for t in param_types]
    for n in names:
        if "$" in n or not n:
            raise ValueError(f"'{n}' is not a legal datatype name")
        if known is not None and n not in known:
            raise ValueError(f"unregistered datatype '{n}'")
    return name + "$" + "$".join(names)


@dataclass
class FnSig:
    name: str = ""
    params: list = field(default_factory=list)       # TypeId per parameter
    ret: TypeId | None = None                        # None: weak typification
    safe: list = field(default_factory=list)         # per-param safe flag
    by_ref: list = field(default_factory=list)       # per-param by-ref flag
    span: Span | None = None

    def __post_init__(self):
        if len(self.safe) != len(self.params):
            self.safe = [False] * len(self.params)
        if len(self.by_ref) != len(self.params):
            self.by_ref = [False] * len(self.params)

    @property
    def mangled(self) -> str:
        return mangle(self.name, self.params)


# resolution outcomes -------------------------------------------------------

@dataclass
class Static:
    target: str              # mangled name
    sig: FnSig


@dataclass
class Dynamic:
    candidates: list


@dataclass
class NoMatch:
    candidates: list


class Plain:
    """No typified declaration is involved: the call is left untouched."""


@dataclass
class Builtin:
    pass


@dataclass
class OverloadHit:
    entry: object  # preprocessor.OperatorOverload or CommandOverload


@dataclass
class MethodMap:
    method: str


@dataclass
class CastDirective:
    entry: object


@dataclass
class CastMethod:
    dst: TypeId


class NoPath:
    pass


class TypeEnv:
    """Lexical scope stack of identifier -> TypeId."""

    def __init__(self):
        self.scopes: list[dict] = [{}]

    def push(self):
        self.scopes.append({})

    def pop(self):
        self.scopes.pop()

    def bind(self, name: str, t: TypeId):
        self.scopes[-1][name] = t

    def lookup(self, name: str) -> TypeId:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return UNKNOWN


class Types:
    """Registry-backed type oracle for one unit."""

    def __init__(self, registry: OverloadRegistry | None = None,
                 sink: DiagnosticSink | None = None):
        self.registry = registry or OverloadRegistry()
        self.sink = sink or DiagnosticSink()
        self.known: dict[str, TypeId] = dict(_BUILTIN_IDS)
        for name in RUNTIME_CLASSES:
            self.known[name] = TypeId(name, "user")
        for name in self.registry.type_names:
            self.register(name)
        self.functions: dict[str, list[FnSig]] = {}
        self.untyped_functions: set[str] = set()
        self.methods: dict[str, dict[str, list[FnSig]]] = {}
        self.untyped_methods: dict[str, set] = {}
        self.method_cast_pairs: set = {("Number", "complex")}
        self.env = TypeEnv()
        self._typed_method_names: set = set()
        for base, entries in self.registry.functions.items():
            for e in entries:
                self.functions.setdefault(base, []).append(FnSig(
                    name=base,
                    params=[self.type_of(t) for t in e.param_types],
                    ret=self.type_of(e.ret_type),
                    safe=[False] * len(e.param_types),
                    by_ref=[False] * len(e.param_types),
                    span=e.span,
                ))

    # -- datatype identities -------------------------------------------------

    def register(self, name: str) -> TypeId:
        name = canon_type(name)
        if name == "generic":
            return TypeId("generic", "generic")
        if name not in self.known:
            self.known[name] = TypeId(name, "user")
        return self.known[name]

    def type_of(self, name: str | None) -> TypeId:
        if name is None:
            return UNKNOWN
        name = canon_type(name)
        if name == "generic":
            return TypeId("generic", "generic")
        return self.known.get(name) or self.register(name)

    def is_user(self, t: TypeId) -> bool:
        return t.kind == "user"

    # -- signature registration ----------------------------------------------

    def sig_from_params(self, name: str, params: list, ret_type: str | None,
                        span=None) -> FnSig:
        return FnSig(
            name=name,
            params=[self.type_of(p.type_name) if p.type_name else UNKNOWN for p in params],
            ret=self.type_of(ret_type) if ret_type else None,
            safe=[p.safe for p in params],
            by_ref=[p.by_ref for p in params],
            span=span,
        )

    def add_function(self, sig: FnSig):
        self.functions.setdefault(sig.name, []).append(sig)

    def add_untyped_function(self, name: str):
        self.untyped_functions.add(name)

    def add_method(self, owner: str, sig: FnSig):
        self.methods.setdefault(owner, {}).setdefault(sig.name, []).append(sig)
        self._typed_method_names.add(sig.name)
        self.register(owner)

    def add_untyped_method(self, owner: str, name: str):
        self.untyped_methods.setdefault(owner, set()).add(name)

    def has_typified(self, name: str) -> bool:
        return name in self.functions or name in self.registry.aliases

    # -- resolution ------------------------------------------------------------

    def resolve_function_call(self, name: str, arg_types: list):
        base = self.registry.aliases.get(name, name)
        candidates = self.functions.get(base, [])
        if not candidates:
            return Plain()
        hit = self._match(candidates, arg_types)
        if isinstance(hit, FnSig):
            return Static(hit.mangled, hit)
        if hit == "dynamic":
            return Dynamic(candidates)
        if base in self.untyped_functions:
            return Plain()
        return NoMatch(candidates)

    def resolve_method_call(self, recv: TypeId, name: str, arg_types: list):
        if recv is not UNKNOWN and recv.name in self.methods \
                and name in self.methods[recv.name]:
            candidates = self.methods[recv.name][name]
            hit = self._match(candidates, arg_types)
            if isinstance(hit, FnSig):
                return Static(hit.mangled, hit)
            if hit == "dynamic":
                return Dynamic(candidates)
            if name in self.untyped_methods.get(recv.name, ()):
                return Plain()
            return NoMatch(candidates)
        if recv is UNKNOWN and name in self._typed_method_names:
            return Dynamic([])
        return Plain()

    def _match(self, candidates: list, arg_types: list):
        if any(t is UNKNOWN for t in arg_types):
            return "dynamic"
        for sig in candidates:
            if len(sig.params) != len(arg_types):
                continue
            if all(p.kind == "generic" or p == a for p, a in zip(sig.params, arg_types)):
                return sig
        # safe-argument fallback: mismatched safe params with a cast path
        for sig in candidates:
            if len(sig.params) != len(arg_types):
                continue
            ok = True
            for p, a, safe in zip(sig.params, arg_types, sig.safe):
                if p.kind == "generic" or p == a:
                    continue
                if safe and not isinstance(self.resolve_cast(a, p), NoPath):
                    continue
                ok = False
                break
            if ok:
                return sig
        return None

    def resolve_operator(self, symbol: str, fixity: str, operand_types: list,
                         span=None):
        names = [t.name for t in operand_types]
        entry = self.registry.find_operator(symbol, fixity, names)
        if entry is not None and not any(t is UNKNOWN for t in operand_types):
            return OverloadHit(entry)
        if any(t is UNKNOWN for t in operand_types):
            return Dynamic([])
        if any(self.is_user(t) for t in operand_types):
            if fixity == "infix" and symbol in ARITHMETIC_METHODS \
                    and self.is_user(operand_types[0]):
                return MethodMap(ARITHMETIC_METHODS[symbol])
            self.sink.error(
                dg.E_NO_OPERATOR,
                f"no operator semantics for '{symbol}' on "
                f"({', '.join(t.name for t in operand_types)})",
                span)
            return Builtin()
        return Builtin()

    def resolve_cast(self, src: TypeId, dst: TypeId, span=None):
        entry = self.registry.casts.get((src.name, dst.name))
        if entry is not None:
            return CastDirective(entry)
        if src is UNKNOWN:
            return CastMethod(dst)  # decided by runtime tags
        if (src.name, dst.name) in self.method_cast_pairs:
            return CastMethod(dst)
        if ("*", dst.name) in self.method_cast_pairs:
            return CastMethod(dst)
        return NoPath()

    # -- inference ---------------------------------------------------------------

    def join(self, a: TypeId, b: TypeId) -> TypeId:
        return a if a == b else UNKNOWN

    def infer(self, node) -> TypeId:
        if node is None:
            return UNKNOWN
        method = getattr(self, "_t_" + type(node).__name__, None)
        if method is None:
            return UNKNOWN
        return method(node)

    def _t_NumberLit(self, n):
        return T_NUMBER

    def _t_StringLit(self, n):
        return T_STRING

    def _t_TemplateLit(self, n):
        return T_STRING

    def _t_BoolLit(self, n):
        return T_BOOLEAN

    def _t_RegexLit(self, n):
        return T_OBJECT

    def _t_ArrayLit(self, n):
        return T_ARRAY

    def _t_ArraySlice(self, n):
        return T_ARRAY

    def _t_ArrayPush(self, n):
        return T_ARRAY

    def _t_ArrayPop(self, n):
        return T_ARRAY

    def _t_SeqLiteral(self, n):
        return T_ARRAY

    def _t_ObjectLit(self, n):
        return T_JSON

    def _t_JsonZip(self, n):
        return T_JSON

    def _t_FuncExpr(self, n):
        return T_FUNCTION

    def _t_ArrowFunc(self, n):
        return T_FUNCTION

    def _t_Ident(self, n):
        return self.env.lookup(n.name)

    def _t_Assign(self, n):
        return self.infer(n.value)

    def _t_Sequence(self, n):
        return self.infer(n.exprs[-1]) if n.exprs else UNKNOWN

    def _t_Ternary(self, n):
        return self.join(self.infer(n.cons), self.infer(n.alt))

    def _t_Logical(self, n):
        return self.join(self.infer(n.left), self.infer(n.right))

    def _t_BinCond(self, n):
        if n.op in ("?==", "?===", "?<", "?>", "?<=", "?>="):
            return self.join(self.infer(n.left), self.infer(n.right))
        return self.join(self.infer(n.left), self.infer(n.right))

    def _t_MultiAction(self, n):
        return T_BOOLEAN if n.op in ("==", "===") else UNKNOWN

    def _t_Unary(self, n):
        if n.op == "!":
            t = self.infer(n.arg)
            hit = self.registry.find_operator("!", "prefix", [t.name])
            if hit is not None:
                return self.type_of(hit.ret_type)
            return T_BOOLEAN
        if n.op in ("-", "+", "~"):
            return T_NUMBER
        if n.op == "typeof":
            return T_STRING
        if n.op == "delete":
            return T_BOOLEAN
        t = self.infer(n.arg)
        hit = self.registry.find_operator(n.op, "prefix", [t.name])
        if hit is not None:
            return self.type_of(hit.ret_type)
        return UNKNOWN

    def _t_Postfix(self, n):
        t = self.infer(n.arg)
        hit = self.registry.find_operator(n.op, "postfix", [t.name])
        if hit is not None:
            return self.type_of(hit.ret_type)
        return UNKNOWN

    def _t_Update(self, n):
        return T_NUMBER

    def _t_Binary(self, n):
        lt, rt = self.infer(n.left), self.infer(n.right)
        hit = self.registry.find_operator(n.op, "infix", [lt.name, rt.name])
        if hit is not None and lt is not UNKNOWN and rt is not UNKNOWN:
            return self.type_of(hit.ret_type)
        if lt is UNKNOWN or rt is UNKNOWN:
            # an indetermination cascades, except through boolean tests
            if n.op in ("==", "!=", "===", "!==", "<", ">", "<=", ">=",
                        "in", "instanceof"):
                return T_BOOLEAN
            return UNKNOWN
        if (self.is_user(lt) and n.op in ARITHMETIC_METHODS):
            return lt  # method chain keeps the receiver datatype
        if n.op == "+":
            if lt == T_STRING or rt == T_STRING:
                return T_STRING
            if lt == T_NUMBER and rt == T_NUMBER:
                return T_NUMBER
            return UNKNOWN
        if n.op in ("-", "*", "/", "%", "**", "<<", ">>", ">>>", "&", "|", "^"):
            return T_NUMBER
        if n.op in ("==", "!=", "===", "!==", "<", ">", "<=", ">=", "in", "instanceof"):
            return T_BOOLEAN
        return UNKNOWN

    def _t_ReverseSelfOp(self, n):
        return self.join(self.infer(n.lhs), self.infer(n.rhs))

    def _t_CastExpr(self, n):
        return self.type_of(n.type_name)

    def _t_CommandExpr(self, n):
        entry = self.registry.find_command(
            n.name, [self.infer(a).name for a in n.args])
        if entry is not None:
            return self.type_of(entry.ret_type)
        entries = self.registry.commands.get(n.name, [])
        if entries:
            return self.type_of(entries[0].ret_type)
        return UNKNOWN

    def _t_New(self, n):
        name = None
        if isinstance(n.callee, Ident):
            name = n.callee.name
        elif isinstance(n.callee, NamespaceRef):
            name = n.callee.segments[-1]
        if name is not None and canon_type(name) in self.known:
            return self.known[canon_type(name)]
        if name is not None and name in self.methods:
            return self.register(name)
        return UNKNOWN

    def _t_Call(self, n):
        if isinstance(n.callee, Ident):
            arg_types = [self.infer(a) for a in n.args]
            res = self.resolve_function_call(n.callee.name, arg_types)
            if isinstance(res, Static):
                return res.sig.ret if res.sig.ret is not None else UNKNOWN
            return UNKNOWN
        if isinstance(n.callee, Member) and not n.callee.computed \
                and isinstance(n.callee.prop, Ident):
            recv = self.infer(n.callee.obj)
            res = self.resolve_method_call(recv, n.callee.prop.name,
                                           [self.infer(a) for a in n.args])
            if isinstance(res, Static):
                return res.sig.ret if res.sig.ret is not None else UNKNOWN
        return UNKNOWN

    def _t_Member(self, n):
        if n.computed:
            return UNKNOWN
        recv = self.infer(n.obj)
        if isinstance(n.prop, Ident):
            if recv.name == "complex" and n.prop.name in _COMPLEX_FIELDS:
                return _COMPLEX_FIELDS[n.prop.name]
            if n.prop.name == "length" and recv in (T_ARRAY, T_STRING):
                return T_NUMBER
        return UNKNOWN

    def _t_Decorated(self, n):
        return {
            "@counter": T_NUMBER, "@line": T_NUMBER, "@column": T_NUMBER,
            "@file": T_STRING, "@namespace": T_STRING,
        }.get(n.name, UNKNOWN)

    def _t_ThisExpr(self, n):
        return self.env.lookup("this")

    def _t_NullLit(self, n):
        return UNKNOWN
