"""Acceptance gate: one test per acceptance criterion, each printing a
PASS/FAIL line. Run with `pytest tests/test_acceptance.py -v -s`.

Tolerances and counts are pinned here: corpus >= 45 snippets in < 5 s,
>= 30 standard programs, 10^4 mangle signatures, 10^5 lexer fuzz inputs,
optimizer fixpoint within 10 rounds.
"""

import copy
import glob
import json
import os
import random
import time

import pytest

from objs import diagnostics as dg
from objs.diagnostics import DiagnosticSink
from objs.lexer import EOF, LexConfig, apply_reserved_map, lossless_join, tokenize
from objs.nodes import ast_equal, count_nodes
from objs.optimizer import PASSES, OptimizeContext, run_pipeline
from objs.parser import parse_program, parse_text
from objs.pipeline import CompileOptions, compile_text
from objs.preprocessor import build_registry, collect_directives
from objs.printer import print_program
from objs.source import unit_from_text
from objs.typesys import mangle

HERE = os.path.dirname(__file__)
CORPUS = os.path.join(HERE, "corpus")
ERRORS = os.path.join(HERE, "corpus_errors")
STANDARD = os.path.join(HERE, "standard")

CORPUS_FILES = sorted(os.path.basename(p) for p in glob.glob(os.path.join(CORPUS, "*.ojs")))
STANDARD_FILES = sorted(os.path.basename(p) for p in glob.glob(os.path.join(STANDARD, "*.js")))


def _compile(name):
    src = open(os.path.join(CORPUS, name), encoding="utf-8").read()
    return compile_text(src, name, CompileOptions(debug=name.startswith("190")),
                        base_dir=CORPUS)


def report(line: str):
    print(f"\nACCEPTANCE: {line}")


class TestAcceptance:
    def test_golden_corpus(self):
        """>= 45 snippets transpile to committed snapshots (AST equality),
        full corpus in < 5 s."""
        assert len(CORPUS_FILES) >= 45, "need at least 45 corpus snippets"
        start = time.monotonic()
        for name in CORPUS_FILES:
            result = _compile(name)
            assert result.ok, (name, [d.message for d in result.sink.errors()])
            expected = open(os.path.join(CORPUS, "expected", name[:-4] + ".js"),
                            encoding="utf-8").read()
            got = parse_text(result.emitted.code)
            want = parse_text(expected)
            assert ast_equal(got, want), f"snapshot mismatch: {name}"
        elapsed = time.monotonic() - start
        assert elapsed < 5.0, f"corpus compile took {elapsed:.2f}s (budget 5s)"
        report(f"golden corpus: {len(CORPUS_FILES)} snippets AST-equal to snapshots "
               f"in {elapsed:.2f}s -- PASS")

    def test_compile_time_behaviors(self):
        """The documented compile-time behaviors reproduce exactly: the six
        not-eligible container errors, the parent-distance error, the NoMatch
        warning, and the duplicate-case warning."""
        eligibility_sources = [
            ("(obj1, 1+2) = (1,2);", "no formulas"),
            ("(obj1, 1) = (1,2);", "no explicit constant"),
            ("(obj1, var) = (1,2);", "no reserved words"),
            ("(obj1, 'string') = (1,2);", "no strings"),
            ("(obj1, _obj2.method) = (1,2);", "no method objects"),
            ("(obj1, doNothing(1)) = (1,2);", "no function calls"),
        ]
        for src, needle in eligibility_sources:
            result = compile_text(src, "e.ojs", CompileOptions())
            errs = [d for d in result.sink.errors() if d.code == dg.E_NOT_ELIGIBLE]
            assert errs and any(needle in d.message for d in errs), src
            assert result.emitted is None

        depth = compile_text(
            "var _j1 = { a: 1, sub_j: { fn2: function(){ return @parent(2).a; } } };",
            "p.ojs", CompileOptions())
        assert any(d.code == dg.E_PARENT_DEPTH for d in depth.sink.errors())

        nomatch = compile_text(
            'function fn(complex a){ return 1; }\n'
            'function fn(Number a){ return 2; }\n'
            'fn("String");\n', "n.ojs", CompileOptions())
        assert nomatch.ok
        assert any(d.code == dg.W_NOMATCH for d in nomatch.sink.warnings())

        dup = compile_text(
            "switch(a) { case 1+1: f(); break; case 1+1: g(); break; }",
            "d.ojs", CompileOptions(debug=True))
        assert any(d.code == dg.W_DUPLICATE_CASE for d in dup.sink.warnings())
        report("compile-time behaviors: 6 eligibility errors, @parent(2) depth "
               "error, NoMatch warning, duplicate-case warning -- PASS")

    def test_conservative_extension(self):
        """>= 30 plain standard programs emit ASTs equal to their inputs with
        zero diagnostics."""
        assert len(STANDARD_FILES) >= 30
        for name in STANDARD_FILES:
            src = open(os.path.join(STANDARD, name), encoding="utf-8").read()
            result = compile_text(src, name, CompileOptions())
            assert result.ok and not result.sink.diagnostics, name
            assert ast_equal(parse_text(src), parse_text(result.emitted.code)), name
        report(f"conservative extension: {len(STANDARD_FILES)} standard programs "
               "pass through unchanged, zero diagnostics -- PASS")

    def test_optimizer_invariants(self):
        """`1 + 2 / 4` folds to exactly 1.5; the pipeline is idempotent on
        every corpus file; node count never grows per pass; fixpoint within
        10 rounds."""
        folded = compile_text("var _a = 1 + 2 / 4;", "f.ojs",
                              CompileOptions(optimize=True))
        assert folded.code.strip() == "var _a = 1.5;"

        for name in CORPUS_FILES:
            result = _compile(name)
            once = run_pipeline(copy.deepcopy(result.program), True, OptimizeContext())
            twice = run_pipeline(copy.deepcopy(once), True, OptimizeContext())
            assert ast_equal(once, twice), f"pipeline not idempotent on {name}"

            prog = copy.deepcopy(result.program)
            ctx = OptimizeContext()
            rounds = 0
            previous = None
            while rounds < 10:
                for p in PASSES:
                    before = count_nodes(prog)
                    prog = p(prog, ctx)
                    assert count_nodes(prog) <= before, (name, p.__name__)
                fingerprint = print_program(prog)
                rounds += 1
                if fingerprint == previous:
                    break
                previous = fingerprint
            assert rounds <= 10, f"{name} needed more than 10 rounds"
        report("optimizer invariants: fold 1+2/4 == 1.5, idempotent pipeline, "
               "monotone node count, fixpoint <= 10 rounds -- PASS")

    def test_translation_tables(self):
        """The FR and IT programs produce exactly the documented expanded
        standard code (token-sequence equality after translation)."""
        def translated_tokens(src):
            unit = unit_from_text("t.ojs", src)
            sink = DiagnosticSink()
            toks = tokenize(unit, LexConfig(), sink)
            directives, stripped = collect_directives(toks, sink)
            registry = build_registry(directives, sink)
            lang = next(d.payload.arg for d in directives
                        if d.kind == "Pragma" and d.payload.name == "translator")
            cfg = LexConfig(reserved_map=dict(registry.reserved[lang]),
                            active_lang=lang)
            mapped = apply_reserved_map(stripped, cfg, sink)
            assert not sink.has_errors
            return [(t.kind, t.lexeme) for t in mapped if t.kind != EOF]

        fr_src = ("#overload reserved LANG FR alors as DROPPABLE\n"
                  "#overload reserved LANG FR si as if\n"
                  "#overload reserved LANG FR est as ===\n"
                  "#pragma translator FR\n"
                  "var _a = 1; si( _a est 1 ) alors alert( 'Bonjour' );\n")
        fr_expected = "var _a = 1; if ( _a === 1 ) alert ( 'Bonjour' );"
        assert translated_tokens(fr_src) == [
            (t.kind, t.lexeme)
            for t in tokenize(unit_from_text("e.js", fr_expected), sink=DiagnosticSink())
            if t.kind != EOF]

        it_src = ("#overload reserved LANG IT allora as DROPPABLE\n"
                  "#overload reserved LANG IT é as ===\n"
                  "#overload reserved LANG IT se as if\n"
                  "#pragma translator IT\n"
                  "var _a = 1; se( _a é 1 ) allora alert( 'ciao' );\n")
        it_expected = "var _a = 1; if ( _a === 1 ) alert ( 'ciao' ) ;"
        assert translated_tokens(it_src) == [
            (t.kind, t.lexeme)
            for t in tokenize(unit_from_text("e.js", it_expected), sink=DiagnosticSink())
            if t.kind != EOF]

        # And the fully compiled IT program is AST-equal to the braced
        # expansion shown for it.
        it_result = compile_text(it_src, "it.ojs", CompileOptions())
        assert it_result.ok
        braced = "var _a = 1; if ( _a === 1 ) {\n    alert ( 'ciao' ) ;\n}"
        assert ast_equal(parse_text(it_result.emitted.code), parse_text(braced))
        report("translation tables: FR and IT token sequences match the "
               "documented expansions -- PASS")

    def test_property_mangle_injectivity(self):
        """No collision over 10^4 random signatures."""
        rng = random.Random(42)
        names = ["Number", "String", "Boolean", "Array", "Object", "Function",
                 "JSON", "complex", "segment", "quaternion", "vec2", "mat3",
                 "a", "ab", "b", "bc", "abc"]
        seen = {}
        for _ in range(10_000):
            sig = tuple(rng.choice(names) for _ in range(rng.randrange(0, 5)))
            m = mangle("fn", list(sig))
            if m in seen:
                assert seen[m] == sig, f"collision: {sig} vs {seen[m]}"
            seen[m] = sig
        report("mangle injectivity: 10^4 random signatures, no collisions -- PASS")

    def test_property_lexer_fuzz(self):
        """Lossless round-trip and crash-freedom over 10^5 fuzz inputs."""
        rng = random.Random(20260808)
        alphabet = ("ab_$ 0189'\"`/\\@#[](){};,.:?!<>=+-*&|^~%\n\t\ré"
                    "☃×￿")
        for i in range(100_000):
            n = rng.randrange(0, 24)
            src = "".join(rng.choice(alphabet) for _ in range(n))
            toks = tokenize(unit_from_text("fuzz.ojs", src), sink=DiagnosticSink())
            assert lossless_join(toks) == src
            assert toks[-1].kind == EOF
        report("lexer fuzz: 10^5 inputs, lossless and crash-free -- PASS")

    def test_property_parse_print_parse(self):
        """parse -> print -> parse is a fixpoint over the whole corpus."""
        for name in CORPUS_FILES:
            result = _compile(name)
            src = open(os.path.join(CORPUS, name), encoding="utf-8").read()
            scratch = DiagnosticSink()
            unit0 = unit_from_text(name, src)
            d0, _ = collect_directives(tokenize(unit0, LexConfig(), scratch), scratch)
            registry = build_registry(d0, scratch)
            printed = print_program(result.parsed)
            sink = DiagnosticSink()
            unit = unit_from_text(name, printed)
            toks = tokenize(unit, LexConfig(registry.extra_symbolic_ops()), sink)
            reparsed = parse_program(unit, toks, sink, registry.syntax())
            assert not sink.has_errors, name
            assert ast_equal(result.parsed, reparsed), name
        report(f"parse-print-parse fixpoint over {len(CORPUS_FILES)} corpus "
               "files -- PASS")
