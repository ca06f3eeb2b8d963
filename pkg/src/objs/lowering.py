"""Lowering: desugar every extended construct into standard ECMAScript AST,
compile overload bodies into helper functions, resolve typified calls and
operators, substitute decorated constants, and inject event instrumentation.

The result is a standard-only Program plus the bookkeeping the emitter needs
(runtime helpers used, dispatch tables, warnings).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import diagnostics as dg
from . import lexer as lx
from .diagnostics import DiagnosticSink
from .nodes import *  # noqa: F401,F403
from .parser import Parser
from .preprocessor import CompileOptions, OverloadRegistry
from .source import SourceUnit, Span
from .typesys import (
    ARITHMETIC_METHODS,
    RUNTIME_CLASSES,
    UNKNOWN,
    Builtin,
    CastDirective,
    CastMethod,
    Dynamic,
    FnSig,
    MethodMap,
    NoMatch,
    NoPath,
    OverloadHit,
    Plain,
    Static,
    T_NUMBER,
    TypeId,
    Types,
    mangle,
)

RESERVED_PREFIX = "__objs_"
RUNTIME_NS = "__objs_rt"
ABI_VERSION = 1

# every name the emitted code may pull off the runtime namespace object
RUNTIME_EXPORTS = (
    "ABI", "type_tag", "push_n", "pop_n", "zip", "dispatch", "dispatch_method",
    "cast", "def_cast", "op", "op1", "def_op", "seq", "tap", "events",
    "factotum", "warn", "complex", "segment", "quaternion",
)


def _ident(name, span=NO_SPAN):
    return Ident(span=span, name=name)


def _member(obj, prop, span=NO_SPAN):
    return Member(span=span, obj=obj, prop=_ident(prop), computed=False)


def _call(callee, args, span=NO_SPAN):
    return Call(span=span, callee=callee, args=args)


def _str(value, span=NO_SPAN):
    return StringLit(span=span, value=value)


def _num(value, span=NO_SPAN):
    return NumberLit(span=span, value=float(value))


@dataclass
class LoweredUnit:
    program: Program = None
    helpers_used: set = field(default_factory=set)
    event_targets: set = field(default_factory=set)
    handler_names: set = field(default_factory=set)


class Lowerer:
    def __init__(self, unit: SourceUnit, registry: OverloadRegistry | None = None,
                 options: CompileOptions | None = None,
                 sink: DiagnosticSink | None = None):
        self.unit = unit
        self.registry = registry or OverloadRegistry()
        self.options = options or CompileOptions()
        self.sink = sink or DiagnosticSink()
        self.types = Types(self.registry, self.sink)
        self.rt = self.options.runtime_ns or RUNTIME_NS
        self.helpers_used: set[str] = set()
        self.temp_serial = 0
        self.counter_serial = 0
        self.box_serial = 0
        self.switch_serial = 0
        self.counter_stack: list[str] = []
        self.namespace_path: list[str] = []
        self.fn_depth = 0
        self.scope_temps: list[list[str]] = []
        self.unit_extended = False
        self.declared_names: set[str] = set()
        self.op_helper: dict[int, str] = {}       # id(entry) -> helper name
        self.cmd_helper: dict[int, str] = {}
        self.cast_helper: dict[int, str] = {}
        self.tables_needed: set[str] = set()
        self.dynamic_ops = False
        self.dynamic_casts = False
        self.event_targets: set[str] = set()
        self.handler_names: set[str] = set()
        self.slot_env: list[dict] = []            # @-slot name -> param ident

    # ------------------------------------------------------------------
    # helpers & names
    # ------------------------------------------------------------------

    def rt_member(self, name: str) -> Member:
        self.helpers_used.add(name)
        return _member(_ident(self.rt), name)

    def fresh_temp(self) -> str:
        name = f"{RESERVED_PREFIX}t{self.temp_serial}"
        self.temp_serial += 1
        if self.scope_temps:
            self.scope_temps[-1].append(name)
        return name

    def fresh_counter(self) -> str:
        name = f"{RESERVED_PREFIX}i{self.counter_serial}"
        self.counter_serial += 1
        return name

    def decl_kind_here(self) -> str:
        # `let` only inside function and statement bodies, `var` outside
        return "let" if self.fn_depth > 0 else "var"

    def error(self, code, message, span=None):
        self.sink.error(code, message, span)

    def warn(self, code, message, span=None):
        self.sink.warn(code, message, span)

    # ------------------------------------------------------------------
    # entry point
    # ------------------------------------------------------------------

    def lower_program(self, prog: Program) -> LoweredUnit:
        self._check_hygiene(prog)
        body = self._flatten_namespaces(prog.body)
        self._collect_signatures(body)
        # runtime operator dispatch only makes sense when the unit actually
        # involves datatypes: overloads, casts, or typified declarations.
        # Purely syntactic extensions (namespaces, forks, repeats) never turn
        # a plain `a + b` into a dispatcher call.
        self.unit_extended = bool(
            self.registry.operators or self.registry.commands or self.registry.functions
            or self.registry.casts or self.types.functions or self.types.methods
            or any(isinstance(n, (TypifiedDecl, CastExpr)) for n in walk(prog))
        )
        helpers = self._compile_overload_bodies()
        self.scope_temps.append([])
        lowered: list = []
        for stmt in body:
            lowered.extend(self._stmt(stmt))
        temps = self.scope_temps.pop()
        main: list = []
        if temps:
            main.append(VarDecl(kind="var", declarators=[
                Declarator(name=_ident(t)) for t in temps]))
        main.extend(lowered)
        with_events = self._inject_events(helpers + self._tables() + main)
        out = self._preamble() + with_events
        program = Program(span=prog.span, body=out)
        return LoweredUnit(program=program, helpers_used=set(self.helpers_used),
                           event_targets=set(self.event_targets),
                           handler_names=set(self.handler_names))

    def _check_hygiene(self, prog: Program):
        for node in walk(prog):
            name = getattr(node, "name", None)
            if isinstance(node, (Ident, FuncDecl, FuncExpr, Param)) \
                    and isinstance(name, str) and name.startswith(RESERVED_PREFIX):
                self.error(dg.E_RESERVED_PREFIX,
                           f"'{name}': the '{RESERVED_PREFIX}' prefix is reserved "
                           "for generated code", node.span)

    # ------------------------------------------------------------------
    # namespaces
    # ------------------------------------------------------------------

    def _flatten_namespaces(self, body: list) -> list:
        members: dict[tuple, set] = {}

        def collect(stmts, path):
            for s in stmts:
                if isinstance(s, Namespace):
                    sub = tuple(path + s.path)
                    members.setdefault(sub, set())
                    for inner in s.body:
                        for name in self._decl_names(inner):
                            members[sub].add(name)
                    collect(s.body, list(sub))

        collect(body, [])
        if not members and not any(isinstance(n, (UseAlias, NamespaceRef))
                                   for n in walk(Program(body=body))):
            return body
        aliases: dict[str, tuple] = {}
        out = self._ns_rewrite(body, [], members, aliases)
        return out

    def _decl_names(self, stmt) -> list:
        if isinstance(stmt, VarDecl):
            return [d.name.name for d in stmt.declarators]
        if isinstance(stmt, TypifiedDecl):
            return [d.name for d in stmt.declarators]
        if isinstance(stmt, FuncDecl):
            return [stmt.name]
        if isinstance(stmt, ClassDecl) and stmt.name:
            return [stmt.name]
        return []

    def _ns_rewrite(self, stmts, path, members, aliases) -> list:
        out = []
        for s in stmts:
            if isinstance(s, Namespace):
                sub = path + s.path
                out.extend(self._ns_rewrite(s.body, sub, members, aliases))
            elif isinstance(s, UseAlias):
                target = tuple(s.path)
                if target not in members:
                    self.error(dg.E_NAMESPACE_MEMBER,
                               "unknown namespace '\\" + "\\".join(s.path) + "'", s.span)
                elif s.alias in aliases and aliases[s.alias] != target:
                    self.error(dg.E_ALIAS_COLLISION,
                               f"alias '{s.alias}' is already bound", s.span)
                else:
                    aliases[s.alias] = target
            else:
                out.append(self._ns_rewrite_node(s, path, members, aliases, set()))
        return out

    def _ns_mangle(self, path, name) -> str:
        return "$".join(list(path) + [name])

    def _ns_rewrite_node(self, node, path, members, aliases, shadowed):
        """Rename declarations/references of namespace members; resolve
        NamespaceRef and `use` aliases. Shadowing by function params/locals
        suppresses the rename inside that function."""
        if node is None or not isinstance(node, Node):
            return node
        here = tuple(path)

        if isinstance(node, NamespaceRef):
            segs = list(node.segments)
            if not node.absolute and segs[0] in aliases:
                segs = list(aliases[segs[0]]) + segs[1:]
            ns, name = tuple(segs[:-1]), segs[-1]
            if ns not in members or name not in members[ns]:
                self.error(dg.E_NAMESPACE_MEMBER,
                           "unknown namespace member '" + "\\".join(segs) + "'",
                           node.span)
                return _ident("$".join(segs), node.span)
            return _ident(self._ns_mangle(ns, name), node.span)

        if isinstance(node, Ident) and path and node.name in members.get(here, ()) \
                and node.name not in shadowed:
            return _ident(self._ns_mangle(here, node.name), node.span)

        if isinstance(node, Decorated) and node.name == "@namespace":
            return _str("\\".join(path), node.span)

        if isinstance(node, (FuncDecl, FuncExpr, ArrowFunc)):
            inner = set(shadowed)
            inner.update(p.name for p in node.params)
            body = node.body
            if isinstance(body, Block):
                for s in body.body:
                    inner.update(self._decl_names(s))
            node = self._map_children(node, lambda c: self._ns_rewrite_node(
                c, path, members, aliases, inner))
            if isinstance(node, FuncDecl) and path and node.name in members.get(here, ()):
                node.name = self._ns_mangle(here, node.name)
            return node

        node = self._map_children(node, lambda c: self._ns_rewrite_node(
            c, path, members, aliases, shadowed))
        if path:
            if isinstance(node, VarDecl):
                for d in node.declarators:
                    if d.name.name in members.get(here, ()):
                        d.name = _ident(self._ns_mangle(here, d.name.name), d.name.span)
            elif isinstance(node, TypifiedDecl):
                for d in node.declarators:
                    if d.name in members.get(here, ()):
                        d.name = self._ns_mangle(here, d.name)
            elif isinstance(node, ClassDecl) and node.name in members.get(here, ()):
                node.name = self._ns_mangle(here, node.name)
        return node

    def _map_children(self, node, fn):
        for f in fields(node):
            if f.name == "span":
                continue
            v = getattr(node, f.name)
            if isinstance(v, Node):
                setattr(node, f.name, fn(v))
            elif isinstance(v, list):
                setattr(node, f.name, [fn(x) if isinstance(x, Node) else x for x in v])
        return node

    # ------------------------------------------------------------------
    # signature collection
    # ------------------------------------------------------------------

    def _is_typed_fn(self, params, ret_type) -> bool:
        return ret_type is not None or any(p.type_name for p in params)

    def _collect_signatures(self, body: list):
        for stmt in body:
            self._collect_stmt_signatures(stmt)

    def _collect_stmt_signatures(self, stmt):
        if isinstance(stmt, FuncDecl):
            self.declared_names.add(stmt.name)
            if self._is_typed_fn(stmt.params, stmt.ret_type):
                self.types.add_function(self.types.sig_from_params(
                    stmt.name, stmt.params, stmt.ret_type, stmt.span))
            else:
                self.types.add_untyped_function(stmt.name)
        elif isinstance(stmt, ClassDecl) and stmt.name:
            self.declared_names.add(stmt.name)
            self.types.register(stmt.name)
            for m in stmt.members:
                if isinstance(m, MethodDef) and m.kind == "method":
                    if self._is_typed_fn(m.params, m.ret_type):
                        self.types.add_method(stmt.name, self.types.sig_from_params(
                            m.name, m.params, m.ret_type, m.span))
                    else:
                        self.types.add_untyped_method(stmt.name, m.name)
        elif isinstance(stmt, VarDecl):
            for d in stmt.declarators:
                self.declared_names.add(d.name.name)
                init = d.init
                if isinstance(init, (ArrowFunc, FuncExpr)) \
                        and self._is_typed_fn(init.params, init.ret_type):
                    self.types.add_function(self.types.sig_from_params(
                        d.name.name, init.params, init.ret_type, d.span))
                    sig = self.types.functions[d.name.name][-1]
                    sig.hoisted = False
                elif isinstance(init, ObjectLit):
                    owner = f"obj:{d.name.name}"
                    typed = False
                    for p in init.props:
                        if p.ret_type is not None and isinstance(p.value, (FuncExpr, ArrowFunc)):
                            self.types.add_method(owner, self.types.sig_from_params(
                                p.key.name, p.value.params, p.ret_type, p.span))
                            typed = True
                        elif isinstance(p.value, (FuncExpr, ArrowFunc)) \
                                and self._is_typed_fn(p.value.params, None):
                            self.types.add_method(owner, self.types.sig_from_params(
                                p.key.name, p.value.params, None, p.span))
                            typed = True
                    if typed:
                        self.types.env.bind(d.name.name, TypeId(owner, "user"))
        elif isinstance(stmt, TypifiedDecl):
            for d in stmt.declarators:
                self.declared_names.add(d.name)
                if d.args and len(d.args) == 1 \
                        and isinstance(d.args[0], (ArrowFunc, FuncExpr)):
                    fn = d.args[0]
                    self.types.add_function(self.types.sig_from_params(
                        d.name, fn.params, stmt.type_name, d.span))
                    self.types.functions[d.name][-1].hoisted = False
        elif isinstance(stmt, ExprStmt) and isinstance(stmt.expr, Assign):
            self._collect_prototype_assignment(stmt.expr)

    def _collect_prototype_assignment(self, assign: Assign):
        target = assign.target
        if not (isinstance(target, Member) and not target.computed
                and isinstance(target.obj, Member) and not target.obj.computed
                and isinstance(target.obj.prop, Ident)
                and target.obj.prop.name == "prototype"
                and isinstance(target.obj.obj, Ident)):
            return
        owner = target.obj.obj.name
        name = target.prop.name
        value = assign.value
        if isinstance(value, (FuncExpr, ArrowFunc)):
            if self._is_typed_fn(value.params, value.ret_type):
                self.types.add_method(owner, self.types.sig_from_params(
                    name, value.params, value.ret_type, assign.span))
            else:
                self.types.add_untyped_method(owner, name)

    # ------------------------------------------------------------------
    # overload body compilation
    # ------------------------------------------------------------------

    def _compile_overload_bodies(self) -> list:
        helpers: list = []
        op_index = 0
        for entry in self.registry.operator_entries():
            name = f"{RESERVED_PREFIX}op_{op_index}"
            op_index += 1
            self.op_helper[id(entry)] = name
            helpers.append(self._body_to_function(
                name, entry.slots, entry.param_types, entry.body, entry.span))
        for cmd_name in sorted(self.registry.commands):
            for entry in self.registry.commands[cmd_name]:
                name = RESERVED_PREFIX + "cmd_" + mangle(entry.name, entry.param_types)
                self.cmd_helper[id(entry)] = name
                helpers.append(self._body_to_function(
                    name, entry.slots, entry.param_types, entry.body, entry.span))
        for base in sorted(self.registry.functions):
            for entry in self.registry.functions[base]:
                name = mangle(base, entry.param_types)
                helpers.append(self._body_to_function(
                    name, entry.slots, entry.param_types, entry.body, entry.span))
        for (src, dst) in sorted(self.registry.casts):
            entry = self.registry.casts[(src, dst)]
            name = f"{RESERVED_PREFIX}cast_{src}${dst}"
            self.cast_helper[id(entry)] = name
            helpers.append(self._body_to_function(
                name, ["@src"], [src], entry.body, entry.span))
        return [h for h in helpers if h is not None]

    def _body_to_function(self, name: str, slots: list, slot_types: list,
                          body_tokens: list, span) -> FuncDecl | None:
        """Compile an overload body token slice into a named helper function.

        Slots @1..@N (and @src) become hygienic parameters, typed per the
        header so resolution works inside the body.
        """
        param_names = []
        slot_map = {}
        for slot in slots:
            pname = (RESERVED_PREFIX + "src") if slot == "@src" \
                else RESERVED_PREFIX + "arg" + slot[1:]
            param_names.append(pname)
            slot_map[slot] = pname
        block = self._parse_body_tokens(body_tokens, span)
        if block is None:
            return None
        fn = FuncDecl(span=span, name=name,
                      params=[Param(name=p) for p in param_names], body=block)
        self.slot_env.append(slot_map)
        self.types.env.push()
        for slot, pname in slot_map.items():
            idx = slots.index(slot)
            self.types.env.bind(pname, self.types.type_of(slot_types[idx]))
        self.fn_depth += 1
        self.scope_temps.append([])
        try:
            new_body = []
            for s in block.body:
                new_body.extend(self._stmt(s))
            temps = self.scope_temps[-1]
            if temps:
                new_body.insert(0, VarDecl(kind="var", declarators=[
                    Declarator(name=_ident(t)) for t in temps]))
            fn.body = Block(span=block.span, body=new_body)
        finally:
            self.scope_temps.pop()
            self.fn_depth -= 1
            self.types.env.pop()
            self.slot_env.pop()
        return fn

    def _parse_body_tokens(self, body_tokens: list, span) -> Block | None:
        text = lx.lossless_join(body_tokens).strip()
        from .source import unit_from_text

        sub_unit = unit_from_text(span.file if span else "<overload>", "{" + text + "}")
        sub_sink = DiagnosticSink()
        toks = lx.tokenize(sub_unit, lx.LexConfig(self.registry.extra_symbolic_ops()),
                           sub_sink)
        parser = Parser(sub_unit, toks, sub_sink, self.registry.syntax())
        block = parser.parse_block()
        if sub_sink.has_errors:
            for d in sub_sink.errors():
                self.sink.emit(d)
            return None
        return block

    # ------------------------------------------------------------------
    # dispatch tables & preamble
    # ------------------------------------------------------------------

    def _tables(self) -> list:
        out = []
        for base in sorted(self.tables_needed):
            sigs = self.types.functions.get(base, [])
            entries = []
            for sig in sigs:
                target = _ident(sig.mangled)
                if not getattr(sig, "hoisted", True):
                    target = FuncExpr(params=[], body=Block(body=[Return(
                        arg=_call(_member(_ident(sig.mangled), "apply"),
                                  [ThisExpr(), _ident("arguments")]))]))
                entries.append(ObjectLit(props=[
                    ObjectProp(key=_ident("params"), value=ArrayLit(
                        elements=[_str(p.name) for p in sig.params])),
                    ObjectProp(key=_ident("fn"), value=target),
                    ObjectProp(key=_ident("ret"),
                               value=_str(sig.ret.name) if sig.ret else NullLit()),
                ]))
            out.append(VarDecl(kind="var", declarators=[Declarator(
                name=_ident(f"{RESERVED_PREFIX}sigs_{base}"),
                init=ArrayLit(elements=entries))]))
        return out

    def _preamble(self) -> list:
        out: list = []
        runtime_classes = [c for c in RUNTIME_CLASSES if c in self.helpers_used]
        if self.helpers_used:
            guard_cond = Logical(
                op="||",
                left=Binary(op="===",
                            left=Unary(op="typeof", arg=_ident(self.rt)),
                            right=_str("undefined")),
                right=Binary(op="!==", left=_member(_ident(self.rt), "ABI"),
                             right=_num(ABI_VERSION)))
            out.append(If(cond=guard_cond, then=Block(body=[Throw(arg=New(
                callee=_ident("Error"),
                args=[_str(f"objs runtime (ABI {ABI_VERSION}) is not loaded")]))])))
        for cls in runtime_classes:
            out.append(VarDecl(kind="var", declarators=[Declarator(
                name=_ident(cls), init=_member(_ident(self.rt), cls))]))
        regs: list = []
        if self.dynamic_ops:
            for entry in self.registry.operator_entries():
                helper = self.op_helper[id(entry)]
                regs.append(ExprStmt(expr=_call(self.rt_member("def_op"), [
                    _str(entry.spelling), _str(entry.fixity),
                    ArrayLit(elements=[_str(t) for t in entry.param_types]),
                    _ident(helper)])))
        if self.dynamic_casts:
            for (src, dst) in sorted(self.registry.casts):
                entry = self.registry.casts[(src, dst)]
                regs.append(ExprStmt(expr=_call(self.rt_member("def_cast"), [
                    _str(src), _str(dst), _ident(self.cast_helper[id(entry)])])))
        return out + regs

    # ------------------------------------------------------------------
    # statements
    # ------------------------------------------------------------------

    def _stmt(self, node) -> list:
        """Lower one statement to a list of standard statements."""
        m = getattr(self, "_s_" + type(node).__name__, None)
        if m is not None:
            out = m(node)
            return out if isinstance(out, list) else [out]
        # generic: lower expression children in place
        return [self._map_children(node, self._generic_child)]

    def _generic_child(self, child):
        if isinstance(child, Block):
            return self._lower_block(child)
        if isinstance(child, (EmptyStmt,)):
            return child
        if self._is_statement(child):
            stmts = self._stmt(child)
            if len(stmts) == 1:
                return stmts[0]
            return Block(span=child.span, body=stmts)
        return self._expr(child)

    def _is_statement(self, node) -> bool:
        return isinstance(node, (
            ExprStmt, VarDecl, FuncDecl, ClassDecl, If, IfChain, For, ForIn, While,
            DoWhile, Switch, Return, Break, Continue, Throw, TryStmt, Labeled, Block,
            EmptyStmt, Debugger, MultiAction, TypifiedDecl, BlockRepeat, Namespace,
            UseAlias, MethodDef, FieldDef,
        ))

    def _lower_block(self, block: Block) -> Block:
        self.types.env.push()
        out = []
        for s in block.body:
            out.extend(self._stmt(s))
        self.types.env.pop()
        return Block(span=block.span, body=out)

    def _s_Block(self, node):
        return self._lower_block(node)

    def _s_EmptyStmt(self, node):
        return node

    def _s_ExprStmt(self, node):
        expr = node.expr
        if isinstance(expr, MultiAction):
            if expr.op == "=":
                return self._lower_multi_assign(expr)
            return ExprStmt(span=node.span, expr=self._expr(expr))
        if isinstance(expr, Fork):
            return self._lower_fork(expr)
        if isinstance(expr, Call):
            byref = self._byref_call(expr)
            if byref is not None:
                return byref
        return ExprStmt(span=node.span, expr=self._expr(expr))

    def _s_MultiAction(self, node):
        if node.op == "=":
            return self._lower_multi_assign(node)
        return ExprStmt(span=node.span, expr=self._expr(node))

    def _s_VarDecl(self, node):
        out = []
        declarators = []
        for d in node.declarators:
            init = d.init
            if isinstance(init, (ArrowFunc, FuncExpr)) \
                    and self._is_typed_fn(init.params, init.ret_type):
                sig = self._sig_for(d.name.name, init.params, init.ret_type)
                fn = self._lower_function_value(init, sig)
                declarators.append(Declarator(span=d.span,
                                              name=_ident(sig.mangled, d.name.span),
                                              init=fn))
                self.types.env.bind(d.name.name, T_FUNCTION_SENTINEL)
                continue
            if isinstance(init, ObjectLit):
                lowered = self._lower_object_literal(init, binding=d.name.name)
                declarators.append(Declarator(span=d.span, name=d.name, init=lowered))
                owner = f"obj:{d.name.name}"
                if owner in self.types.methods:
                    self.types.env.bind(d.name.name, TypeId(owner, "user"))
                else:
                    self.types.env.bind(d.name.name, self.types.infer(init))
                continue
            t = self.types.infer(init) if init is not None else UNKNOWN
            lowered = self._expr(init) if init is not None else None
            declarators.append(Declarator(span=d.span, name=d.name, init=lowered))
            self.types.env.bind(d.name.name, t)
        return VarDecl(span=node.span, kind=node.kind, declarators=declarators)

    def _s_TypifiedDecl(self, node):
        t = self.types.register(node.type_name)
        declarators = []
        for d in node.declarators:
            if d.args is not None and len(d.args) == 1 \
                    and isinstance(d.args[0], (ArrowFunc, FuncExpr)):
                sig = self._sig_for(d.name, d.args[0].params, node.type_name)
                fn = self._lower_function_value(d.args[0], sig)
                declarators.append(Declarator(name=_ident(sig.mangled), init=fn))
                continue
            args = [] if d.args is None else [self._typed_arg(a) for a in d.args]
            init = New(span=d.span, callee=_ident(node.type_name, d.span), args=args)
            self._note_runtime_class(node.type_name)
            declarators.append(Declarator(span=d.span, name=_ident(d.name, d.span),
                                          init=init))
            self.types.env.bind(d.name, t)
        return VarDecl(span=node.span, kind=self.decl_kind_here(),
                       declarators=declarators)

    def _typed_arg(self, arg):
        if isinstance(arg, TypedInit):
            self.types.register(arg.type_name)
            self._note_runtime_class(arg.type_name)
            return New(span=arg.span, callee=_ident(arg.type_name, arg.span),
                       args=[self._typed_arg(a) for a in arg.args])
        return self._expr(arg)

    def _note_runtime_class(self, name: str):
        if name in RUNTIME_CLASSES and name not in self.declared_names:
            self.helpers_used.add(name)

    def _sig_for(self, name, params, ret_type) -> FnSig:
        wanted = [self.types.type_of(p.type_name) if p.type_name else UNKNOWN
                  for p in params]
        for sig in self.types.functions.get(name, []):
            if sig.params == wanted:
                return sig
        return self.types.sig_from_params(name, params, ret_type)

    def _s_FuncDecl(self, node):
        typed = self._is_typed_fn(node.params, node.ret_type)
        if not typed:
            return FuncDecl(span=node.span, name=node.name, params=node.params,
                            body=self._lower_fn_body(node.params, node.body),
                            ret_type=None)
        sig = self._sig_for(node.name, node.params, node.ret_type)
        if node.ret_type is not None and not self._has_return_value(node.body):
            self.warn(dg.W_NO_RETURN,
                      f"strongly typified function '{node.name}' never returns a value",
                      node.span)
        return self._lower_typed_function(node, sig, FuncDecl)

    def _has_return_value(self, block: Block) -> bool:
        for n in walk(block):
            if isinstance(n, (FuncExpr, ArrowFunc)):
                continue
            if isinstance(n, Return) and n.arg is not None:
                return True
        return False

    def _lower_typed_function(self, node, sig: FnSig, ctor):
        guards, params, body = self._typed_fn_parts(node.params, node.body, sig)
        fn = ctor(span=node.span, name=sig.mangled, params=params, body=body,
                  ret_type=None)
        if guards:
            fn.body.body[0:0] = guards
        return fn

    def _typed_fn_parts(self, params, body, sig: FnSig):
        new_params = []
        guards = []
        rewrites = {}
        for i, p in enumerate(params):
            if p.by_ref:
                box = RESERVED_PREFIX + "box_" + p.name
                new_params.append(Param(span=p.span, name=box))
                rewrites[p.name] = box
            else:
                new_params.append(Param(span=p.span, name=p.name))
            if p.safe:
                t = sig.params[i]
                cond = Binary(op="!==",
                              left=_call(self.rt_member("type_tag"), [_ident(p.name)]),
                              right=_str(t.name))
                guards.append(If(span=p.span, cond=cond, then=Block(body=[
                    ExprStmt(expr=Assign(target=_ident(p.name),
                                         value=_call(self.rt_member("cast"),
                                                     [_ident(p.name), _str(t.name)])))])))
        if rewrites:
            body = self._rewrite_byref_idents(body, rewrites)
        self.types.env.push()
        for p, t in zip(params, sig.params):
            self.types.env.bind(p.name, t)
        self.fn_depth += 1
        self.scope_temps.append([])
        try:
            lowered = self._lower_block(body)
            temps = self.scope_temps[-1]
            if temps:
                lowered.body.insert(0, VarDecl(kind="var", declarators=[
                    Declarator(name=_ident(t)) for t in temps]))
        finally:
            self.scope_temps.pop()
            self.fn_depth -= 1
            self.types.env.pop()
        return guards, new_params, lowered

    def _rewrite_byref_idents(self, body: Block, rewrites: dict) -> Block:
        def rw(node):
            if isinstance(node, Ident) and node.name in rewrites:
                return _member(_ident(rewrites[node.name], node.span), "v", node.span)
            if isinstance(node, (FuncExpr, ArrowFunc, FuncDecl)):
                if any(p.name in rewrites for p in node.params):
                    return node
            return self._map_children(node, rw)

        return rw(body)

    def _lower_fn_body(self, params, body: Block) -> Block:
        self.types.env.push()
        for p in params:
            self.types.env.bind(p.name, self.types.type_of(p.type_name)
                                if p.type_name else UNKNOWN)
        self.fn_depth += 1
        self.scope_temps.append([])
        try:
            lowered = self._lower_block(body)
            temps = self.scope_temps[-1]
            if temps:
                lowered.body.insert(0, VarDecl(kind="var", declarators=[
                    Declarator(name=_ident(t)) for t in temps]))
        finally:
            self.scope_temps.pop()
            self.fn_depth -= 1
            self.types.env.pop()
        return lowered

    def _lower_function_value(self, fn, sig: FnSig):
        guards, params, body = self._typed_fn_parts(
            fn.params, fn.body if isinstance(fn.body, Block)
            else Block(span=fn.body.span, body=[Return(span=fn.body.span, arg=fn.body)]),
            sig)
        if isinstance(fn, ArrowFunc):
            out = ArrowFunc(span=fn.span, params=params, body=body, ret_type=None)
        else:
            out = FuncExpr(span=fn.span, name=fn.name, params=params, body=body,
                           ret_type=None)
        if guards:
            body.body[0:0] = guards
        return out

    def _s_ClassDecl(self, node):
        members = []
        for m in node.members:
            if isinstance(m, MethodDef):
                typed = self._is_typed_fn(m.params, m.ret_type) and m.kind == "method"
                if typed:
                    wanted = [self.types.type_of(p.type_name) if p.type_name else UNKNOWN
                              for p in m.params]
                    sig = None
                    for cand in self.types.methods.get(node.name, {}).get(m.name, []):
                        if cand.params == wanted:
                            sig = cand
                            break
                    if sig is None:
                        sig = self.types.sig_from_params(m.name, m.params, m.ret_type)
                    guards, params, body = self._typed_fn_parts(m.params, m.body, sig)
                    if guards:
                        body.body[0:0] = guards
                    members.append(MethodDef(span=m.span, name=sig.mangled,
                                             params=params, body=body, ret_type=None,
                                             static=m.static, kind=m.kind))
                else:
                    members.append(MethodDef(span=m.span, name=m.name, params=m.params,
                                             body=self._lower_fn_body(m.params, m.body),
                                             ret_type=None, static=m.static, kind=m.kind))
            elif isinstance(m, FieldDef):
                members.append(FieldDef(span=m.span, name=m.name,
                                        init=self._expr(m.init) if m.init else None,
                                        static=m.static))
            else:
                members.append(m)
        if node.name:
            self.types.env.bind(node.name, T_FUNCTION_SENTINEL)
        return ClassDecl(span=node.span, name=node.name,
                         superclass=self._expr(node.superclass) if node.superclass else None,
                         members=members)

    def _s_IfChain(self, node):
        def nest(conds, then):
            if not conds:
                return then
            inner = nest(conds[1:], then)
            if not isinstance(inner, Block):
                inner = Block(span=inner.span, body=[inner])
            return If(span=node.span, cond=conds[0], then=inner)

        conds = [self._expr(c) for c in node.conds]
        then = self._one_stmt(node.then)
        chain = nest(conds[1:], then)
        if not isinstance(chain, Block):
            chain = Block(span=chain.span, body=[chain])
        outer = If(span=node.span, cond=conds[0], then=chain)
        if node.else_ is not None:
            outer.else_ = self._one_stmt(node.else_)
        return outer

    def _one_stmt(self, node):
        stmts = self._stmt(node)
        if len(stmts) == 1:
            return stmts[0]
        return Block(span=node.span, body=stmts)

    def _s_If(self, node):
        return If(span=node.span, cond=self._expr(node.cond),
                  then=self._one_stmt(node.then),
                  else_=self._one_stmt(node.else_) if node.else_ is not None else None)

    def _s_Switch(self, node):
        has_regex = any(isinstance(c.test, RegexLit) for c in node.cases)
        disc = self._expr(node.disc)
        if not has_regex:
            cases = []
            for c in node.cases:
                self.types.env.push()
                body = []
                for s in c.body:
                    body.extend(self._stmt(s))
                self.types.env.pop()
                cases.append(SwitchCase(span=c.span,
                                        test=self._expr(c.test) if c.test else None,
                                        body=body))
            return Switch(span=node.span, disc=disc, cases=cases)
        return self._lower_regex_switch(node, disc)

    def _lower_regex_switch(self, node, disc):
        """A switch with regex cases becomes a labeled block of sequential
        guarded ifs; a matched flag preserves fall-through order."""
        label = f"{RESERVED_PREFIX}sw{self.switch_serial}"
        self.switch_serial += 1
        d = self.fresh_temp()
        m = self.fresh_temp()
        out = [
            ExprStmt(expr=Assign(target=_ident(d), value=disc)),
            ExprStmt(expr=Assign(target=_ident(m), value=BoolLit(value=False))),
        ]
        body = []
        for c in node.cases:
            self.types.env.push()
            case_body = []
            for s in c.body:
                case_body.extend(self._stmt(s))
            self.types.env.pop()
            case_body = [self._retarget_breaks(s, label) for s in case_body]
            if c.test is None:
                body.append(Block(span=c.span, body=case_body))
                continue
            if isinstance(c.test, RegexLit):
                test = _call(_member(New(callee=_ident("RegExp"),
                                         args=[_str(c.test.pattern)] +
                                              ([_str(c.test.flags)] if c.test.flags else [])),
                                     "test"),
                             [_call(_ident("String"), [_ident(d)])])
            else:
                test = Binary(op="===", left=_ident(d), right=self._expr(c.test))
            cond = Logical(op="||", left=_ident(m), right=test)
            body.append(If(span=c.span, cond=cond, then=Block(body=[
                ExprStmt(expr=Assign(target=_ident(m), value=BoolLit(value=True)))
            ] + case_body)))
        out.append(Labeled(span=node.span, label=label,
                           stmt=Block(span=node.span, body=body)))
        return out

    def _retarget_breaks(self, node, label):
        if isinstance(node, Break) and node.label is None:
            return Break(span=node.span, label=label)
        if isinstance(node, (While, DoWhile, For, ForIn, Switch, FuncDecl, FuncExpr,
                             ArrowFunc)):
            return node  # their own break targets
        return self._map_children(node, lambda c: self._retarget_breaks(c, label))

    def _s_BlockRepeat(self, node):
        counter = self.fresh_counter()
        count = self._expr(node.count)
        self.counter_stack.append(counter)
        try:
            body = self._lower_block(node.body)
        finally:
            self.counter_stack.pop()
        return For(
            span=node.span,
            init=VarDecl(kind=self.decl_kind_here(), declarators=[
                Declarator(name=_ident(counter), init=_num(0))]),
            test=Binary(op="<", left=_ident(counter), right=count),
            update=Update(op="++", arg=_ident(counter), prefix=False),
            body=body)

    def _s_For(self, node):
        self.types.env.push()
        init = None
        if isinstance(node.init, VarDecl):
            init = self._s_VarDecl(node.init)
        elif isinstance(node.init, ExprStmt):
            init = ExprStmt(span=node.init.span, expr=self._expr(node.init.expr))
        out = For(span=node.span, init=init,
                  test=self._expr(node.test) if node.test is not None else None,
                  update=self._expr(node.update) if node.update is not None else None,
                  body=self._one_stmt(node.body))
        self.types.env.pop()
        return out

    def _s_ForIn(self, node):
        self.types.env.push()
        if isinstance(node.target, Ident):
            self.types.env.bind(node.target.name, UNKNOWN)
        out = ForIn(span=node.span, decl_kind=node.decl_kind, target=node.target,
                    obj=self._expr(node.obj), body=self._one_stmt(node.body), of=node.of)
        self.types.env.pop()
        return out

    # -- multiple actions -------------------------------------------------

    def _eligible_target(self, t) -> bool:
        if isinstance(t, Ident):
            return True
        if isinstance(t, Member) and t.computed:
            return True
        return False

    def _lower_multi_assign(self, node: MultiAction):
        targets = node.targets
        for t in targets:
            if not self._eligible_target(t):
                self.error(dg.E_NOT_ELIGIBLE, "not an eligible container", t.span)
                return []
        values = node.values
        pairs: list[tuple] = []
        prelude: list = []
        if node.one_to_many:
            value = values[0]
            fan = self._fanned_value(value, len(targets), prelude)
            pairs = [(t, fan()) for t in targets]
        else:
            if node.wildcard_index is not None:
                if len(values) > len(targets):
                    self.error(dg.E_ARITY_MISMATCH,
                               "more values than containers", node.span)
                    return []
                fill_src = values[-1]
                fan = self._fanned_value(fill_src, len(targets) - len(values) + 1,
                                         prelude)
                for i, t in enumerate(targets):
                    if i < len(values) - 1:
                        pairs.append((t, self._expr(values[i])))
                    elif i == len(values) - 1:
                        pairs.append((t, fan()))
                    else:
                        pairs.append((t, fan()))
            else:
                if len(values) != len(targets):
                    self.error(dg.E_ARITY_MISMATCH,
                               f"{len(targets)} containers but {len(values)} values "
                               "(use a wildcard to fan out)", node.span)
                    return []
                pairs = [(t, self._expr(v)) for t, v in zip(targets, values)]
        if node.decl_kind is not None:
            declarators = []
            for t, v in pairs:
                declarators.append(Declarator(span=t.span, name=t, init=v))
                if isinstance(t, Ident):
                    self.types.env.bind(t.name, self.types.infer(v))
            return prelude + [VarDecl(span=node.span, kind=node.decl_kind,
                                      declarators=declarators)]
        out = list(prelude)
        for t, v in pairs:
            target = self._expr(t)
            out.append(ExprStmt(span=node.span,
                                expr=Assign(span=node.span, target=target, value=v)))
        return out

    def _fanned_value(self, value, uses: int, prelude: list):
        """A value copied to several targets is evaluated once: cached in a
        temporary unless it is a literal or plain identifier."""
        if uses <= 1 or isinstance(value, (NumberLit, StringLit, BoolLit, NullLit,
                                           Ident)):
            lowered = self._expr(value)
            return lambda: lowered
        tmp = self.fresh_temp()
        prelude.append(ExprStmt(expr=Assign(target=_ident(tmp),
                                            value=self._expr(value))))
        return lambda: _ident(tmp)

    def _lower_multi_compare(self, node: MultiAction):
        targets = [self._expr(t) for t in node.targets]
        if node.one_to_many:
            value = node.values[0]
            if isinstance(value, (NumberLit, StringLit, BoolLit, NullLit, Ident)):
                values = [self._expr(value) for _ in targets]
            else:
                tmp = self.fresh_temp()
                first = Assign(target=_ident(tmp), value=self._expr(value))
                conj = Binary(span=node.span, op=node.op, left=targets[0], right=first)
                for t in targets[1:]:
                    conj = Logical(span=node.span, op="&&", left=conj,
                                   right=Binary(op=node.op, left=t, right=_ident(tmp)))
                return conj
        else:
            if len(node.values) != len(targets):
                self.error(dg.E_ARITY_MISMATCH,
                           f"{len(targets)} containers but {len(node.values)} values",
                           node.span)
                return BoolLit(value=False)
            values = [self._expr(v) for v in node.values]
        conj = None
        for t, v in zip(targets, values):
            cmp = Binary(span=node.span, op=node.op, left=t, right=v)
            conj = cmp if conj is None else Logical(span=node.span, op="&&",
                                                    left=conj, right=cmp)
        return conj

    def _lower_fork(self, node: Fork):
        for t in (node.id1, node.id2):
            if not self._eligible_target(t):
                self.error(dg.E_NOT_ELIGIBLE,
                           "fork target is not an eligible container", t.span)
                return []
        v1 = self._expr(node.v1)
        v2 = self._expr(node.v2) if node.v2 is not None else self._expr(node.v1)
        return If(span=node.span, cond=self._expr(node.cond),
                  then=Block(body=[ExprStmt(expr=Assign(target=self._expr(node.id1),
                                                        value=v1))]),
                  else_=Block(body=[ExprStmt(expr=Assign(target=self._expr(node.id2),
                                                         value=v2))]))

    # -- by-ref call sites ---------------------------------------------------

    def _byref_call(self, call: Call):
        if not isinstance(call.callee, Ident):
            return None
        arg_types = [self.types.infer(a) for a in call.args]
        res = self.types.resolve_function_call(call.callee.name, arg_types)
        if not isinstance(res, Static) or not any(res.sig.by_ref):
            return None
        sig = res.sig
        prelude: list = []
        post: list = []
        args = []
        for i, a in enumerate(call.args):
            if i < len(sig.by_ref) and sig.by_ref[i]:
                if not isinstance(a, Ident):
                    self.error(dg.E_BYREF_CALLSITE,
                               "a by-reference argument must be a plain variable",
                               a.span)
                    return []
                box = f"{RESERVED_PREFIX}b{self.box_serial}"
                self.box_serial += 1
                prelude.append(VarDecl(kind=self.decl_kind_here(), declarators=[
                    Declarator(name=_ident(box), init=ObjectLit(props=[
                        ObjectProp(key=_ident("v"), value=_ident(a.name))]))]))
                post.append(ExprStmt(expr=Assign(target=_ident(a.name),
                                                 value=_member(_ident(box), "v"))))
                args.append(_ident(box))
            else:
                args.append(self._expr(a))
        call_stmt = ExprStmt(span=call.span,
                             expr=_call(_ident(res.target, call.callee.span), args,
                                        call.span))
        return prelude + [call_stmt] + post

    # ------------------------------------------------------------------
    # expressions
    # ------------------------------------------------------------------

    def _expr(self, node):
        if node is None:
            return None
        m = getattr(self, "_e_" + type(node).__name__, None)
        if m is not None:
            return m(node)
        return self._map_children(node, self._expr_child)

    def _expr_child(self, child):
        if isinstance(child, Block):
            return self._lower_block(child)
        return self._expr(child)

    def _e_FuncExpr(self, node):
        if self._is_typed_fn(node.params, node.ret_type):
            sig = self.types.sig_from_params(node.name or "", node.params, node.ret_type)
            return self._lower_function_value(node, sig)
        return FuncExpr(span=node.span, name=node.name, params=node.params,
                        body=self._lower_fn_body(node.params, node.body), ret_type=None)

    def _e_ArrowFunc(self, node):
        if self._is_typed_fn(node.params, node.ret_type):
            sig = self.types.sig_from_params("", node.params, node.ret_type)
            return self._lower_function_value(node, sig)
        body = node.body
        if isinstance(body, Block):
            body = self._lower_fn_body(node.params, body)
        else:
            self.types.env.push()
            for p in node.params:
                self.types.env.bind(p.name, UNKNOWN)
            body = self._expr(body)
            self.types.env.pop()
        return ArrowFunc(span=node.span, params=node.params, body=body, ret_type=None)

    def _e_Binary(self, node):
        if node.op in self.registry.reversed_ops:
            # derived reverse of a registered self-operator: divert the result
            # to the right-hand container
            base = self.registry.reversed_ops[node.op]
            if not self._eligible_target(node.right):
                self.error(dg.E_NOT_ELIGIBLE,
                           "the right side of a reverse self-operator must be "
                           "assignable", node.right.span)
                return self._expr(node.right)
            lt = self.types.infer(node.left)
            rt = self.types.infer(node.right)
            left = self._expr(node.left)
            right = self._expr(node.right)
            res = self.types.resolve_operator(base, "infix", [lt, rt], node.span)
            if isinstance(res, OverloadHit):
                value = _call(_ident(self.op_helper[id(res.entry)], node.span),
                              [left, right], node.span)
                return Assign(span=node.span, target=self._expr(node.right),
                              value=value)
            self.error(dg.E_NO_OPERATOR,
                       f"no overload of self-operator '{base}' for "
                       f"({lt.name}, {rt.name})", node.span)
            return Binary(span=node.span, op="+", left=left, right=right)
        lt = self.types.infer(node.left)
        rt = self.types.infer(node.right)
        left = self._expr(node.left)
        right = self._expr(node.right)
        res = self.types.resolve_operator(node.op, "infix", [lt, rt], node.span)
        if isinstance(res, OverloadHit):
            return _call(_ident(self.op_helper[id(res.entry)], node.span),
                         [left, right], node.span)
        if isinstance(res, MethodMap):
            return _call(_member(left, res.method, node.span), [right], node.span)
        if isinstance(res, Dynamic) and self.unit_extended \
                and self._op_dispatchable(node.op, "infix"):
            self.dynamic_ops = True
            return _call(self.rt_member("op"), [_str(node.op), left, right], node.span)
        return Binary(span=node.span, op=node.op, left=left, right=right)

    def _op_dispatchable(self, op: str, fixity: str) -> bool:
        if fixity == "infix" and op in ARITHMETIC_METHODS:
            return True
        return any(key[0] == op and key[2] == fixity for key in self.registry.operators)

    def _e_Unary(self, node):
        t = self.types.infer(node.arg)
        arg = self._expr(node.arg)
        if node.op in ("!", "~", "-", "+"):
            res = self.types.resolve_operator(node.op, "prefix", [t], node.span) \
                if not node.op.isalpha() else Builtin()
            if isinstance(res, OverloadHit):
                return _call(_ident(self.op_helper[id(res.entry)], node.span), [arg],
                             node.span)
            if isinstance(res, Dynamic) and self.unit_extended \
                    and self._op_dispatchable(node.op, "prefix"):
                self.dynamic_ops = True
                return _call(self.rt_member("op1"),
                             [_str(node.op), _str("prefix"), arg], node.span)
        return Unary(span=node.span, op=node.op, arg=arg)

    def _e_Postfix(self, node):
        t = self.types.infer(node.arg)
        arg = self._expr(node.arg)
        res = self.types.resolve_operator(node.op, "postfix", [t], node.span)
        if isinstance(res, OverloadHit):
            return _call(_ident(self.op_helper[id(res.entry)], node.span), [arg],
                         node.span)
        if isinstance(res, Dynamic) and self.unit_extended \
                and self._op_dispatchable(node.op, "postfix"):
            self.dynamic_ops = True
            return _call(self.rt_member("op1"), [_str(node.op), _str("postfix"), arg],
                         node.span)
        self.error(dg.E_NO_OPERATOR,
                   f"no postfix operator '{node.op}' for datatype {t.name}", node.span)
        return arg

    def _e_CommandExpr(self, node):
        arg_types = [self.types.infer(a) for a in node.args]
        args = [self._expr(a) for a in node.args]
        entry = self.registry.find_command(node.name, [t.name for t in arg_types])
        if entry is not None and not any(t is UNKNOWN and p != "generic"
                                         for t, p in zip(arg_types, entry.param_types)):
            return _call(_ident(self.cmd_helper[id(entry)], node.span), args, node.span)
        candidates = self.registry.commands.get(node.name, [])
        if candidates and any(t is UNKNOWN for t in arg_types):
            self.dynamic_ops = True
            table = ArrayLit(elements=[
                ObjectLit(props=[
                    ObjectProp(key=_ident("params"), value=ArrayLit(
                        elements=[_str(p) for p in e.param_types])),
                    ObjectProp(key=_ident("fn"),
                               value=_ident(self.cmd_helper[id(e)])),
                    ObjectProp(key=_ident("ret"), value=_str(e.ret_type)),
                ]) for e in candidates])
            return _call(self.rt_member("dispatch"),
                         [_str(node.name), table, ArrayLit(elements=args)], node.span)
        self.warn(dg.W_NOMATCH,
                  f"no overload of '{node.name}' matches "
                  f"({', '.join(t.name for t in arg_types)})", node.span)
        return _call(self.rt_member("dispatch"),
                     [_str(node.name), ArrayLit(elements=[]),
                      ArrayLit(elements=args)], node.span)

    def _e_Call(self, node):
        callee = node.callee
        if isinstance(callee, Ident):
            arg_types = [self.types.infer(a) for a in node.args]
            res = self.types.resolve_function_call(callee.name, arg_types)
            args = [self._expr(a) for a in node.args]
            if isinstance(res, Static):
                if any(res.sig.by_ref):
                    self.warn(dg.W_BYREF_DYNAMIC,
                              "by-reference call outside statement position; "
                              "no copy-back is performed", node.span)
                return _call(_ident(res.target, callee.span), args, node.span)
            if isinstance(res, (Dynamic, NoMatch)):
                base = self.registry.aliases.get(callee.name, callee.name)
                if isinstance(res, NoMatch):
                    self.warn(dg.W_NOMATCH,
                              f"no typification of '{base}' matches "
                              f"({', '.join(t.name for t in arg_types)})", node.span)
                self.tables_needed.add(base)
                return _call(self.rt_member("dispatch"),
                             [_str(base), _ident(f"{RESERVED_PREFIX}sigs_{base}"),
                              ArrayLit(elements=args)], node.span)
            return _call(callee, args, node.span)
        if isinstance(callee, Member) and not callee.computed \
                and isinstance(callee.prop, Ident):
            recv_t = self.types.infer(callee.obj)
            arg_types = [self.types.infer(a) for a in node.args]
            obj = self._expr(callee.obj)
            args = [self._expr(a) for a in node.args]
            res = self.types.resolve_method_call(recv_t, callee.prop.name, arg_types)
            if isinstance(res, Static):
                return _call(_member(obj, res.target, callee.span), args, node.span)
            if isinstance(res, (Dynamic, NoMatch)):
                if isinstance(res, NoMatch):
                    self.warn(dg.W_NOMATCH,
                              f"no typification of method '{callee.prop.name}' matches "
                              f"({', '.join(t.name for t in arg_types)})", node.span)
                return _call(self.rt_member("dispatch_method"),
                             [obj, _str(callee.prop.name), ArrayLit(elements=args)],
                             node.span)
            return _call(Member(span=callee.span, obj=obj, prop=callee.prop), args,
                         node.span)
        return _call(self._expr(callee), [self._expr(a) for a in node.args], node.span)

    def _e_New(self, node):
        callee = node.callee
        if isinstance(callee, Ident):
            self._note_runtime_class(callee.name)
        args = None if node.args is None else [self._expr(a) for a in node.args]
        return New(span=node.span, callee=self._expr(callee), args=args)

    def _e_CastExpr(self, node):
        self.types.register(node.type_name)
        self._note_runtime_class(node.type_name)
        if node.args is not None:
            return New(span=node.span, callee=_ident(node.type_name, node.span),
                       args=[self._expr(a) for a in node.args])
        src = self.types.infer(node.operand)
        dst = self.types.type_of(node.type_name)
        operand = self._expr(node.operand)
        res = self.types.resolve_cast(src, dst, node.span)
        if isinstance(res, CastDirective):
            return _call(_ident(self.cast_helper[id(res.entry)], node.span), [operand],
                         node.span)
        if isinstance(res, CastMethod):
            self.dynamic_casts = self.dynamic_casts or bool(self.registry.casts)
            return _call(self.rt_member("cast"), [operand, _str(dst.name)], node.span)
        self.error(dg.E_NO_CAST,
                   f"no typecasting path from {src.name} to {dst.name}", node.span)
        return operand

    def _e_JsonZip(self, node):
        if isinstance(node.keys, ArrayLit) and isinstance(node.values, ArrayLit):
            if len(node.keys.elements) != len(node.values.elements):
                self.error(dg.E_ZIP_LENGTH,
                           f"{len(node.keys.elements)} keys but "
                           f"{len(node.values.elements)} values", node.span)
                return ObjectLit(span=node.span, props=[])
            props = []
            for k, v in zip(node.keys.elements, node.values.elements):
                if isinstance(k, Ident):
                    key = _ident(k.name, k.span)
                elif isinstance(k, (StringLit, NumberLit)):
                    key = k
                else:
                    self.error(dg.E_ZIP_LENGTH,
                               "zip keys must be identifiers or literals", k.span)
                    key = _str("?", k.span)
                props.append(ObjectProp(span=k.span, key=key, value=self._expr(v)))
            return ObjectLit(span=node.span, props=props)
        return _call(self.rt_member("zip"),
                     [self._expr(node.keys), self._expr(node.values)], node.span)

    def _e_ObjectLit(self, node):
        return self._lower_object_literal(node, binding=None)

    def _lower_object_literal(self, node: ObjectLit, binding: str | None):
        if binding is not None:
            node = self._resolve_parent_refs(node, binding)
        props = []
        for p in node.props:
            value = p.value
            if p.ret_type is not None and isinstance(value, (FuncExpr, ArrowFunc)):
                sig = self.types.sig_from_params(p.key.name, value.params, p.ret_type)
                props.append(ObjectProp(span=p.span, key=_ident(sig.mangled, p.key.span),
                                        value=self._lower_function_value(value, sig)))
                continue
            if isinstance(value, (FuncExpr, ArrowFunc)) \
                    and self._is_typed_fn(value.params, None):
                sig = self.types.sig_from_params(p.key.name, value.params, None)
                props.append(ObjectProp(span=p.span, key=_ident(sig.mangled, p.key.span),
                                        value=self._lower_function_value(value, sig)))
                continue
            props.append(ObjectProp(span=p.span, key=p.key, value=self._expr(value),
                                    computed=p.computed, shorthand=False,
                                    method=p.method and isinstance(value, FuncExpr)))
        out = []
        for p in props:
            if p.method and isinstance(p.value, FuncExpr):
                out.append(ObjectProp(span=p.span, key=p.key, value=p.value, method=True))
            else:
                out.append(p)
        return ObjectLit(span=node.span, props=out)

    def _resolve_parent_refs(self, obj: ObjectLit, binding: str):
        """Rewrite `@parent(k)` / `@root` inside a bound literal to absolute
        member paths computed from literal nesting depth."""

        def path_expr(path):
            expr: Node = _ident(binding)
            for key in path:
                if isinstance(key, Ident):
                    expr = _member(expr, key.name)
                elif isinstance(key, StringLit):
                    expr = Member(obj=expr, prop=key, computed=True)
                else:
                    expr = Member(obj=expr, prop=key, computed=True)
            return expr

        def rewrite(node, path):
            if isinstance(node, ObjectLit):
                props = []
                for p in node.props:
                    value = rewrite(p.value, path + [p.key]) \
                        if isinstance(p.value, ObjectLit) \
                        else rewrite_value(p.value, path)
                    props.append(ObjectProp(span=p.span, key=p.key, value=value,
                                            computed=p.computed, shorthand=p.shorthand,
                                            method=p.method, ret_type=p.ret_type))
                return ObjectLit(span=node.span, props=props)
            return rewrite_value(node, path)

        def rewrite_value(node, path):
            if not isinstance(node, Node):
                return node
            if isinstance(node, Decorated) and node.name in ("@parent", "@root"):
                if node.name == "@root":
                    return path_expr([])
                k = 1 if node.arg is None else int(node.arg.value)
                if k > len(path):
                    self.error(dg.E_PARENT_DEPTH,
                               f"@parent({k}) does not resolve into a valid object "
                               f"at depth {len(path)}", node.span)
                    return _ident(binding, node.span)
                return path_expr(path[:len(path) - k])
            if isinstance(node, ObjectLit):
                return rewrite(node, path)
            return self._map_children(node, lambda c: rewrite_value(c, path))

        return rewrite(obj, [])

    def _e_ArraySlice(self, node):
        base = self._expr(node.base)
        s = node.spec
        if s.variant == "indexes":
            return ArrayLit(span=node.span, elements=[
                Member(span=node.span, obj=base, prop=self._expr(i), computed=True)
                for i in s.indexes])
        if s.variant == "from":
            return _call(_member(base, "slice", node.span), [self._expr(s.a)], node.span)
        if s.variant == "to":
            return _call(_member(base, "slice", node.span),
                         [_num(0), self._plus_one(s.b)], node.span)
        if s.variant == "between":
            return _call(_member(base, "slice", node.span),
                         [self._expr(s.a), self._plus_one(s.b)], node.span)
        head = _call(_member(base, "slice", node.span),
                     [_num(0), self._plus_one(s.a)], node.span)
        tail = _call(_member(base, "slice", node.span), [self._expr(s.b)], node.span)
        return _call(_member(head, "concat", node.span), [tail], node.span)

    def _plus_one(self, expr):
        if isinstance(expr, NumberLit):
            return _num(expr.value + 1, expr.span)
        return Binary(span=expr.span, op="+", left=self._expr(expr), right=_num(1))

    def _e_ArrayPush(self, node):
        base = self._expr(node.base)
        value = self._expr(node.value)
        if node.count is None:
            return _call(_member(base, "push", node.span), [value], node.span)
        self._warn_count_type(node.count)
        return _call(self.rt_member("push_n"),
                     [base, self._expr(node.count), value], node.span)

    def _e_ArrayPop(self, node):
        base = self._expr(node.base)
        if node.count is None:
            return _call(_member(base, "pop", node.span), [], node.span)
        self._warn_count_type(node.count)
        return _call(self.rt_member("pop_n"), [base, self._expr(node.count)], node.span)

    def _warn_count_type(self, count):
        t = self.types.infer(count)
        if t is not UNKNOWN and t != T_NUMBER:
            self.warn(dg.W_COUNT_TYPE,
                      f"repeat count has static datatype {t.name}; "
                      "the value is coerced at run time", count.span)

    def _e_SeqLiteral(self, node):
        a, b = node.start, node.end
        if isinstance(a, NumberLit) and isinstance(b, NumberLit) \
                and a.value == int(a.value) and b.value == int(b.value):
            lo, hi = int(a.value), int(b.value)
            step = 1 if hi >= lo else -1
            values = list(range(lo, hi + step, step))
            return ArrayLit(span=node.span, elements=[_num(v, node.span) for v in values])
        if isinstance(a, StringLit) and isinstance(b, StringLit) \
                and len(a.value) == 1 and len(b.value) == 1:
            lo, hi = ord(a.value), ord(b.value)
            step = 1 if hi >= lo else -1
            values = [chr(c) for c in range(lo, hi + step, step)]
            return ArrayLit(span=node.span, elements=[_str(v, node.span) for v in values])
        self.error(dg.E_SEQ_ENDPOINTS,
                   "sequence ends must both be integers or both be single characters",
                   node.span)
        return ArrayLit(span=node.span, elements=[])

    def _e_ReverseSelfOp(self, node):
        if not self._eligible_target(node.rhs):
            self.error(dg.E_NOT_ELIGIBLE,
                       "the right side of a reverse self-operator must be assignable",
                       node.rhs.span)
            return self._expr(node.rhs)
        combined = Binary(span=node.span, op=node.op, left=node.lhs, right=node.rhs)
        value = self._e_Binary(combined)
        return Assign(span=node.span, op="=", target=self._expr(node.rhs), value=value)

    def _e_BinCond(self, node):
        left = self._expr(node.left)
        right = self._expr(node.right)
        if node.op in ("??", "?:"):
            t = self.fresh_temp()
            assign = Assign(span=node.span, target=_ident(t), value=left)
            if node.op == "??":
                cond = Binary(span=node.span, op="!=", left=assign, right=NullLit())
            else:
                cond = assign
            return Ternary(span=node.span, cond=cond, cons=_ident(t), alt=right)
        rel = {"?==": "==", "?===": "===", "?<": "<", "?>": ">",
               "?<=": "<=", "?>=": ">="}[node.op]
        t1 = self.fresh_temp()
        t2 = self.fresh_temp()
        cond = Binary(span=node.span, op=rel,
                      left=Assign(target=_ident(t1), value=left),
                      right=Assign(target=_ident(t2), value=right))
        return Ternary(span=node.span, cond=cond, cons=_ident(t1), alt=_ident(t2))

    def _e_MultiAction(self, node):
        if node.op in ("==", "==="):
            return self._lower_multi_compare(node)
        self.error(dg.E_SYNTAX,
                   "multiple assignment is only allowed at statement level", node.span)
        return BoolLit(span=node.span, value=False)

    def _e_Fork(self, node):
        self.error(dg.E_SYNTAX, "the fork operator is only allowed at statement level",
                   node.span)
        return self._expr(node.cond)

    def _e_Decorated(self, node):
        for slot_map in reversed(self.slot_env):
            if node.name in slot_map:
                return _ident(slot_map[node.name], node.span)
        if node.name == "@factotum":
            return self.rt_member("factotum")
        if node.name == "@counter":
            if not self.counter_stack:
                self.error(dg.E_BAD_SLOT, "@counter is only defined inside a repeated "
                           "block", node.span)
                return _num(0, node.span)
            return _ident(self.counter_stack[-1], node.span)
        if node.name == "@file":
            return _str(node.span.file, node.span)
        if node.name == "@line":
            return _num(node.span.line, node.span)
        if node.name == "@column":
            return _num(node.span.col, node.span)
        if node.name == "@namespace":
            return _str("\\".join(self.namespace_path), node.span)
        if node.name in ("@parent", "@root"):
            self.error(dg.E_PARENT_UNBOUND,
                       f"{node.name} can only be used inside a JSON literal bound "
                       "to a variable", node.span)
            return NullLit(span=node.span)
        self.error(dg.E_BAD_SLOT, f"'{node.name}' is not defined here", node.span)
        return NullLit(span=node.span)

    def _e_Assign(self, node):
        value_node = node.value
        if isinstance(value_node, (FuncExpr, ArrowFunc)) \
                and self._is_typed_fn(value_node.params, value_node.ret_type) \
                and isinstance(node.target, Member) and not node.target.computed \
                and isinstance(node.target.prop, Ident):
            sig = self.types.sig_from_params(node.target.prop.name, value_node.params,
                                             value_node.ret_type)
            target = Member(span=node.target.span, obj=self._expr(node.target.obj),
                            prop=_ident(sig.mangled, node.target.prop.span))
            return Assign(span=node.span, op=node.op, target=target,
                          value=self._lower_function_value(value_node, sig))
        if node.op != "=":
            rewritten = self._compound_assign(node)
            if rewritten is not None:
                return rewritten
        target = self._expr(node.target)
        value = self._expr(node.value)
        if isinstance(node.target, Ident):
            self.types.env.bind(node.target.name, self.types.infer(node.value))
        return Assign(span=node.span, op=node.op, target=target, value=value)

    def _compound_assign(self, node):
        """`a op= b` resolves the underlying operator against the registry and
        method map; builtin-on-builtin stays a native compound assignment."""
        lt = self.types.infer(node.target)
        rt = self.types.infer(node.value)
        # the whole spelling may itself be a registered self-operator
        entry = self.registry.find_operator(node.op, "infix", [lt.name, rt.name])
        if entry is not None and lt is not UNKNOWN and rt is not UNKNOWN:
            target = self._expr(node.target)
            value = _call(_ident(self.op_helper[id(entry)], node.span),
                          [self._expr(node.target), self._expr(node.value)], node.span)
            return Assign(span=node.span, op="=", target=target, value=value)
        base = node.op[:-1]
        res = self.types.resolve_operator(base, "infix", [lt, rt], node.span)
        if isinstance(res, OverloadHit):
            target = self._expr(node.target)
            value = _call(_ident(self.op_helper[id(res.entry)], node.span),
                          [self._expr(node.target), self._expr(node.value)], node.span)
            return Assign(span=node.span, op="=", target=target, value=value)
        if isinstance(res, MethodMap):
            target = self._expr(node.target)
            value = _call(_member(self._expr(node.target), res.method, node.span),
                          [self._expr(node.value)], node.span)
            return Assign(span=node.span, op="=", target=target, value=value)
        if isinstance(res, Dynamic) and self.unit_extended \
                and self._op_dispatchable(base, "infix"):
            self.dynamic_ops = True
            target = self._expr(node.target)
            value = _call(self.rt_member("op"),
                          [_str(base), self._expr(node.target),
                           self._expr(node.value)], node.span)
            return Assign(span=node.span, op="=", target=target, value=value)
        return None

    # ------------------------------------------------------------------
    # events
    # ------------------------------------------------------------------

    def _inject_events(self, body: list) -> list:
        if not self.registry.events:
            return body
        plans = []
        for n, entry in enumerate(self.registry.events):
            handler = f"{RESERVED_PREFIX}evt_{n}"
            self.handler_names.add(handler)
            ident_targets = [t for t in entry.targets
                             if t not in ("@all", "var", "let", "const")
                             and t not in self.types.known]
            slots = [f"@{i}" for i in range(1, len(ident_targets) + 1)]
            fn = self._body_to_function(handler, slots,
                                        ["Object"] * len(ident_targets),
                                        entry.body, entry.span)
            for t in ident_targets:
                self.event_targets.add(t)
                if t not in self.declared_names:
                    self.warn(dg.W_EVENT_TARGET,
                              f"event target '{t}' is never declared", entry.span)
            plans.append(_EventPlan(entry=entry, handler=handler,
                                    ident_targets=ident_targets, fn=fn))
        out = [p.fn for p in plans if p.fn is not None]
        injector = _EventInjector(self, plans)
        for stmt in body:
            out.extend(injector.stmt(stmt))
        return out


T_FUNCTION_SENTINEL = TypeId("Function", "builtin")


@dataclass
class _EventPlan:
    entry: object = None
    handler: str = ""
    ident_targets: list = field(default_factory=list)
    fn: object = None

    def phases_for(self, kind: str) -> list:
        phases = []
        for name in self.entry.events:
            if name == f"on_before_{kind}":
                phases.append("before")
            elif name == f"on_{kind}":
                phases.append("after")
        return phases

    def matches_target(self, name: str) -> bool:
        return "@all" in self.entry.targets or name in self.entry.targets


class _EventInjector:
    """Insert handler invocations immediately before/after matching sites in
    the lowered (standard) AST."""

    def __init__(self, lowerer: Lowerer, plans: list):
        self.lw = lowerer
        self.plans = plans

    def handler_call(self, plan: _EventPlan, site_args: list | None = None) -> Call:
        if plan.ident_targets:
            args = [_ident(t) for t in plan.ident_targets]
        else:
            args = site_args or []
        return _call(_ident(plan.handler), args)

    # -- statements -----------------------------------------------------

    def stmt(self, node) -> list:
        if isinstance(node, VarDecl):
            return self.var_decl(node)
        if isinstance(node, ExprStmt):
            before, after = [], []
            expr = self.expr(node.expr, before, after, top=True)
            return before + [ExprStmt(span=node.span, expr=expr)] + after
        if isinstance(node, (FuncDecl,)):
            if node.name.startswith(RESERVED_PREFIX):
                return [node]  # generated helpers/handlers are not user sites
            node.body = self.block(node.body)
            return [node]
        if isinstance(node, ClassDecl):
            for m in node.members:
                if isinstance(m, MethodDef):
                    m.body = self.block(m.body)
            return [node]
        if isinstance(node, Block):
            return [self.block(node)]
        if isinstance(node, If):
            node.cond = self.expr_inline(node.cond)
            node.then = self.nested(node.then)
            if node.else_ is not None:
                node.else_ = self.nested(node.else_)
            return [node]
        if isinstance(node, (While, DoWhile)):
            node.cond = self.expr_inline(node.cond)
            node.body = self.nested(node.body)
            return [node]
        if isinstance(node, For):
            if isinstance(node.init, VarDecl):
                init_stmts = self.var_decl(node.init)
                if len(init_stmts) > 1:
                    # hoist instrumentation outside the head
                    node_init = [s for s in init_stmts if isinstance(s, VarDecl)]
                    pre = [s for s in init_stmts if not isinstance(s, VarDecl)]
                    node.init = node_init[0] if node_init else None
                    node.body = self.nested(node.body)
                    return pre + [node]
            node.body = self.nested(node.body)
            return [node]
        if isinstance(node, ForIn):
            node.body = self.nested(node.body)
            return [node]
        if isinstance(node, Switch):
            for c in node.cases:
                new_body = []
                for s in c.body:
                    new_body.extend(self.stmt(s))
                c.body = new_body
            return [node]
        if isinstance(node, TryStmt):
            node.block = self.block(node.block)
            if node.handler is not None:
                node.handler = self.block(node.handler)
            if node.finalizer is not None:
                node.finalizer = self.block(node.finalizer)
            return [node]
        if isinstance(node, Labeled):
            inner = self.stmt(node.stmt)
            if len(inner) == 1:
                node.stmt = inner[0]
            else:
                node.stmt = Block(span=node.span, body=inner)
            return [node]
        if isinstance(node, Return) and node.arg is not None:
            node.arg = self.expr_inline(node.arg)
            return [node]
        if isinstance(node, Throw):
            node.arg = self.expr_inline(node.arg)
            return [node]
        return [node]

    def block(self, block: Block) -> Block:
        out = []
        for s in block.body:
            out.extend(self.stmt(s))
        return Block(span=block.span, body=out)

    def nested(self, node) -> Node:
        stmts = self.stmt(node)
        if len(stmts) == 1 and isinstance(stmts[0], Block):
            return stmts[0]
        if len(stmts) == 1:
            return stmts[0]
        return Block(span=node.span, body=stmts)

    def var_decl(self, node: VarDecl) -> list:
        before, after = [], []
        for d in node.declarators:
            if d.init is not None:
                d.init = self.expr(d.init, before, after, top=False)
        decl_before, decl_after = [], []
        for plan in self.plans:
            phases = plan.phases_for("decl")
            if not phases:
                continue
            for d in node.declarators:
                matches = ("@all" in plan.entry.targets
                           or node.kind in plan.entry.targets
                           or d.name.name in plan.entry.targets)
                if not matches:
                    continue
                if "before" in phases:
                    decl_before.append(ExprStmt(expr=self.handler_call(plan)))
                if "after" in phases:
                    decl_after.append(ExprStmt(expr=self.handler_call(
                        plan, [_ident(d.name.name)])))
        return decl_before + before + [node] + after + decl_after

    # -- expressions ------------------------------------------------------

    def expr_inline(self, node):
        before, after = [], []
        out = self.expr(node, before, after, top=False)
        # inline positions cannot host statements; fold them into sequences
        if before:
            out = Sequence(span=node.span, exprs=[b.expr for b in before] + [out])
        return out

    def expr(self, node, before: list, after: list, top: bool):
        if node is None or not isinstance(node, Node):
            return node
        if isinstance(node, (FuncExpr, ArrowFunc)):
            if isinstance(node.body, Block):
                node.body = self.block(node.body)
            else:
                node.body = self.expr_inline(node.body)
            return node
        node = self.lw._map_children(
            node, lambda c: self.expr(c, before, after, top=False)
            if not isinstance(c, Block) else self.block(c))

        if isinstance(node, New):
            name = node.callee.name if isinstance(node.callee, Ident) else None
            if name is not None:
                result = node
                for plan in self.plans:
                    phases = plan.phases_for("new")
                    if not phases or not plan.matches_target(name):
                        continue
                    if "before" in phases:
                        result = Sequence(span=node.span, exprs=[
                            self.handler_call(plan), result])
                    if "after" in phases:
                        if plan.ident_targets:
                            result = _call(self.lw.rt_member("seq"),
                                           [result, self.handler_call(plan)], node.span)
                        else:
                            result = _call(self.lw.rt_member("tap"),
                                           [result, _ident(plan.handler)], node.span)
                return result
            return node

        if isinstance(node, Assign) and top and isinstance(node.target, Ident):
            for plan in self.plans:
                phases = plan.phases_for("assign")
                if not phases or not plan.matches_target(node.target.name):
                    continue
                if "before" in phases:
                    before.append(ExprStmt(expr=self.handler_call(plan)))
                if "after" in phases:
                    after.append(ExprStmt(expr=self.handler_call(
                        plan, [_ident(node.target.name)])))
            return node

        if isinstance(node, Sequence) and top:
            # statement-level comma chain: instrument each assignment element
            exprs = []
            for e in node.exprs:
                exprs.append(self.expr(e, before, after, top=True)
                             if isinstance(e, Assign) else e)
            node.exprs = exprs
            return node

        if isinstance(node, Unary) and node.op == "delete":
            base = node.arg
            name = None
            if isinstance(base, Member) and isinstance(base.obj, Ident):
                name = base.obj.name
            elif isinstance(base, Ident):
                name = base.name
            if name is not None:
                return self.wrap_site(node, "delete", name)
            return node

        if isinstance(node, Call):
            return self.call_site(node)

        return node

    def call_site(self, node: Call):
        callee = node.callee
        # array push/pop: native spelling or the runtime helpers
        if isinstance(callee, Member) and isinstance(callee.prop, Ident) \
                and not callee.computed and isinstance(callee.obj, Ident):
            if callee.prop.name in ("push", "push_n") and callee.obj.name == self.lw.rt:
                base = node.args[0]
                if isinstance(base, Ident):
                    return self.wrap_site(node, "array_push", base.name)
            if callee.prop.name == "push":
                return self.wrap_site(node, "array_push", callee.obj.name,
                                      also_method=True)
            if callee.prop.name in ("pop", "pop_n") and callee.obj.name == self.lw.rt:
                base = node.args[0]
                if isinstance(base, Ident):
                    return self.wrap_site(node, "array_pop", base.name)
            if callee.prop.name == "pop":
                return self.wrap_site(node, "array_pop", callee.obj.name,
                                      also_method=True)
        if isinstance(callee, Member) and isinstance(callee.prop, Ident) \
                and not callee.computed:
            if isinstance(callee.obj, Ident) and callee.obj.name == self.lw.rt:
                return node  # runtime plumbing is not a user call site
            if callee.prop.name.startswith(RESERVED_PREFIX):
                return node
            return self.wrap_site(node, "method_call", callee.prop.name)
        if isinstance(callee, Ident):
            if callee.name.startswith(RESERVED_PREFIX):
                return node
            return self.wrap_site(node, "function_call", callee.name)
        return node

    def wrap_site(self, node, kind: str, name: str, also_method: bool = False):
        result = node
        for plan in self.plans:
            phases = plan.phases_for(kind)
            if not phases and also_method and kind in ("array_push", "array_pop"):
                continue
            if not phases or not plan.matches_target(name):
                continue
            if "before" in phases:
                result = Sequence(span=node.span,
                                  exprs=[self.handler_call(plan), result])
            if "after" in phases:
                result = _call(self.lw.rt_member("seq"),
                               [result, self.handler_call(plan, [_ident(name)])],
                               node.span)
        if also_method and kind in ("array_push", "array_pop"):
            result = self.wrap_site_method(result, node, name)
        return result

    def wrap_site_method(self, result, node, obj_name: str):
        callee = node.callee
        mname = callee.prop.name if isinstance(callee, Member) else None
        if mname is None:
            return result
        for plan in self.plans:
            phases = plan.phases_for("method_call")
            if not phases or not plan.matches_target(mname):
                continue
            if "before" in phases:
                result = Sequence(exprs=[self.handler_call(plan), result])
            if "after" in phases:
                result = _call(self.lw.rt_member("seq"),
                               [result, self.handler_call(plan, [_ident(mname)])])
        return result


def lower_program(unit: SourceUnit, prog: Program,
                  registry: OverloadRegistry | None = None,
                  options: CompileOptions | None = None,
                  sink: DiagnosticSink | None = None) -> LoweredUnit:
    return Lowerer(unit, registry, options, sink).lower_program(prog)
