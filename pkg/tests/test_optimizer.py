import copy

from js_eval import run_js
from objs import diagnostics as dg
from objs.diagnostics import DiagnosticSink
from objs.nodes import FuncDecl, VarDecl, ast_equal, count_nodes, walk
from objs.optimizer import (
    MAX_ROUNDS,
    OptimizeContext,
    drop_dead_branches,
    drop_unreferenced_params,
    fold_constants,
    propagate_constants,
    prune_unreachable,
    remove_isolated,
    run_pipeline,
)
from objs.parser import parse_text
from objs.pipeline import CompileOptions, compile_text
from objs.printer import print_program


def optimized(src, **opts):
    r = compile_text(src, "t.ojs", CompileOptions(optimize=True, **opts))
    assert r.ok, [d.message for d in r.sink.errors()]
    return r


def plain(src):
    r = compile_text(src, "t.ojs", CompileOptions())
    assert r.ok
    return r


class TestFolding:
    def test_fold_division_exact(self):
        r = optimized("var _a = 1 + 2 / 4;")
        assert r.code.strip() == "var _a = 1.5;"

    def test_one_plus_five_folds_to_six(self):
        # arithmetic oracle: 1 + 5 == 6
        r = optimized("var _a = 1 + 5;\nvar _b = _a ;")
        assert "var _a = 6;" in r.code
        assert "var _b = 6;" in r.code

    def test_no_algebraic_identities(self):
        r = optimized("var y = 0 + x;")
        assert "0 + x" in r.code

    def test_string_concat_folds(self):
        r = optimized("var s = 'a' + 'b';")
        assert "'ab'" in r.code

    def test_division_by_zero_warns(self):
        r = optimized("var x = 1 / 0;")
        assert "Infinity" in r.code
        assert any(d.code == dg.W_DIV_ZERO for d in r.sink.warnings())

    def test_relational_folds(self):
        r = optimized("var x = 1 < 2;")
        assert "true" in r.code

    def test_gate_off_leaves_ast(self):
        r = plain("var _a = 1 + 2 / 4;")
        assert "1 + 2 / 4" in r.code


class TestPropagation:
    def test_single_literal_definition_propagates(self):
        r = optimized("var _a = 1;\nvar _b = _a;")
        assert "var _b = 1;" in r.code

    def test_redefinition_blocks(self):
        r = optimized("var _a = 1;\n_a = 2;\nvar _b = _a;")
        assert "var _b = _a;" in r.code

    def test_closure_capture_blocks(self):
        r = optimized("""
            var _a = 1;
            function f() { return _a; }
            var _b = _a;
        """)
        assert "var _b = _a;" in r.code

    def test_event_target_excluded(self):
        r = optimized("""
            #overload event on_assign to _a { console.log('hit'); }
            var _a = 1;
            var _b = _a;
            _a = 2;
        """)
        assert "var _b = _a;" in r.code


class TestPruneAndDeadBranches:
    def test_after_return(self):
        r = optimized("""
            function fn( complex a, complex b ) {
                return a+b;
                a /= b;
            }
            fn(new complex(1,1), new complex(2,2));
        """)
        assert "/=" not in r.code

    def test_conditional_return_kept(self):
        r = optimized("function f(x) { if (x) return 1; return 2; }\nconsole.log(f(0));")
        assert "return 2;" in r.code

    def test_dead_if_branch(self):
        r = optimized("var a = 1, b = 0 ;\n\nif ( a && b ) { doSomething(); }")
        assert "doSomething" not in r.code

    def test_true_branch_promoted(self):
        r = optimized("if (true) { keep(); } else { drop(); }\nkeep2();")
        assert "keep()" in r.code and "drop" not in r.code

    def test_while_false_removed(self):
        r = optimized("while (0) { spin(); }\ndone();")
        assert "spin" not in r.code and "done()" in r.code


class TestParamsAndIsolated:
    def test_unreferenced_trailing_param(self):
        r = optimized("""
            function fn( complex a, complex b ) {
                return a;
            }
        """)
        decl = [n for n in walk(r.program) if isinstance(n, FuncDecl)][0]
        assert [p.name for p in decl.params] == ["a"]

    def test_call_sites_shrunk(self):
        r = optimized("""
            function fn( complex a, complex b ) { return a; }
            complex x = (1, 2);
            var y = fn(x, x);
            console.log(y.real);
        """)
        assert "fn$complex$complex(x)" in r.code
        assert run_js(r.code).logs == ["1"]

    def test_escaping_function_untouched(self):
        r = optimized("""
            function helper(a, b) { return a; }
            var ref = helper;
            console.log(helper(1, 2));
        """)
        decl = [n for n in walk(r.program) if isinstance(n, FuncDecl)][0]
        assert len(decl.params) == 2

    def test_arguments_use_blocks(self):
        r = optimized("function f(a, b) { return arguments.length; }\nconsole.log(f(1, 2));")
        decl = [n for n in walk(r.program) if isinstance(n, FuncDecl)][0]
        assert len(decl.params) == 2

    def test_isolated_local_removed(self):
        r = optimized("function f() { var u = 5; return 1; }\nconsole.log(f());")
        assert "u = 5" not in r.code

    def test_sideeffect_initializer_kept(self):
        r = optimized("function f() { var u = g(); return 1; }\nconsole.log(f());")
        assert "g()" in r.code

    def test_top_level_declaration_kept(self):
        r = optimized("var u = 5;")
        assert "var u = 5;" in r.code


class TestPipelineProperties:
    CASES = [
        "var _a = 1 + 2 / 4;",
        "var _a = 1 + 5;\nvar _b = _a;",
        "var a = 1, b = 0;\nif (a && b) { doSomething(); }",
        "function f(x, y) { return x; }\nconsole.log(f(1, 2));",
        "complex _z = (1, 1);\nvar x = _z * 2;\nconsole.log(x.real);",
        "4 * { console.log(@counter); }",
    ]

    def test_idempotent_on_cases(self):
        for src in self.CASES:
            r = optimized(src)
            again = run_pipeline(copy.deepcopy(r.program), True, OptimizeContext())
            assert ast_equal(r.program, again), src

    def test_fixpoint_within_bound(self):
        # the joint fold-and-propagate case needs at most two rounds; all stay under the cap
        for src in self.CASES:
            r = optimized(src)
            assert print_program(run_pipeline(
                copy.deepcopy(r.program), True, OptimizeContext())) == print_program(r.program)

    def test_node_count_non_increasing_per_pass(self):
        src = "var _a = 1 + 5;\nvar _b = _a;\nif (0) { x(); }\nfunction f(a, b) { return a; }\nf(1, 2);"
        prog = plain(src).program
        ctx = OptimizeContext()
        for p in (fold_constants, propagate_constants, prune_unreachable,
                  drop_dead_branches, drop_unreferenced_params, remove_isolated):
            before = count_nodes(prog)
            prog = p(prog, ctx)
            assert count_nodes(prog) <= before, p.__name__

    def test_semantics_preserved(self):
        programs = [
            "var t = 0;\nfor (var i = 0; i < 4; i++) { t += i; }\nconsole.log(t);",
            "var _a = 1 + 5;\nvar _b = _a;\nconsole.log(_b);",
            "function f(a, b) { return a * 2; }\nconsole.log(f(3, 9));",
            "var a = 1, b = 0;\nif (a && b) { console.log('dead'); }\nconsole.log('live');",
            "complex _c = (1, 1);\nconsole.log((_c * 2).real);",
            "var (x, y, z) = (1, 2, *);\nconsole.log(x + y + z);",
        ]
        for src in programs:
            unopt = plain(src)
            opt = optimized(src)
            assert run_js(unopt.code).logs == run_js(opt.code).logs, src

    def test_event_sites_survive(self):
        src = """
            #overload event on_assign to @all { console.log('hit'); }
            var a = 1;
            a = 2;
            console.log(a);
        """
        unopt = plain(src)
        opt = optimized(src)
        assert run_js(unopt.code).logs == run_js(opt.code).logs
        assert opt.code.count("__objs_evt_0") == unopt.code.count("__objs_evt_0")

    def test_warnings_identical(self):
        src = """
            function fn(complex a){ return 1; }
            fn("String");
        """
        unopt = compile_text(src, "t.ojs", CompileOptions())
        opt = compile_text(src, "t.ojs", CompileOptions(optimize=True))
        key = lambda r: [(d.code, d.message) for d in r.sink.warnings()
                         if d.code == dg.W_NOMATCH]
        assert key(unopt) == key(opt) and key(opt)
