/**
 * Differential execution: corpus programs compiled by the `objs` CLI run
 * under node against this runtime, and the observable output must match the
 * documented results. The compiler is driven purely through its external
 * interfaces (CLI flags, emitted .js files, the --emit-runtime library).
 */

import assert = require("node:assert");
import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";

const PYTHON = process.env.PYTHON || "python3";
const REPO = path.resolve(__dirname, "..", "..", "..");
const CORPUS = path.join(REPO, "tests", "corpus");
const RUNTIME_DIST = path.resolve(__dirname, "..", "src", "runtime.js");

interface RunResult {
  stdout: string;
  stderr: string;
}

function compileUnit(source: string, name: string, flags: string[] = [],
                     work?: string): string {
  work = work ?? fs.mkdtempSync(path.join(os.tmpdir(), "objs-diff-"));
  const src = path.join(work, name);
  fs.writeFileSync(src, source);
  const out = path.join(work, "out" + flags.join("").replace(/[^a-z]/g, ""));
  execFileSync(PYTHON, ["-m", "objs.cli", "build", src, "-o", out, "--no-map",
                        ...flags],
               { cwd: REPO, stdio: ["ignore", "pipe", "pipe"] });
  return path.join(out, name.replace(/\.ojs$/, ".js"));
}

function runCompiled(jsPath: string): RunResult {
  const driver =
    `globalThis.alert = globalThis.alert || ((...a) => console.log(...a));` +
    `require(${JSON.stringify(RUNTIME_DIST)});` +
    `require(${JSON.stringify(jsPath)});`;
  const stdout = execFileSync(process.execPath, ["-e", driver],
                              { encoding: "utf-8", stdio: ["ignore", "pipe", "pipe"] });
  return { stdout, stderr: "" };
}

function runSource(source: string, name = "unit.ojs", flags: string[] = []): string {
  return runCompiled(compileUnit(source, name, flags)).stdout;
}

function corpusSource(name: string): string {
  return fs.readFileSync(path.join(CORPUS, name), "utf-8");
}

test("multiple-action loop fills [0,0,0,1,1,1,2,2,2]", () => {
  const out = runSource(corpusSource("012_multi_loop_fill.ojs"), "012.ojs");
  assert.match(out, /\[\s*0,\s*0,\s*0,\s*1,\s*1,\s*1,\s*2,\s*2,\s*2\s*\]/);
});

test("wildcard fills obj3 and obj4 with 2", () => {
  const out = runSource(corpusSource("013_multi_wildcard.ojs"), "013.ojs");
  assert.strictEqual(out.trim(), "1 2 2 2");
});

test("fork sets a=4 and leaves b=0", () => {
  const out = runSource(corpusSource("070_fork_three.ojs"), "070.ojs");
  assert.strictEqual(out.trim(), "c 3 a 4 b 0");
});

test("call-by-reference stores 2 into a", () => {
  const out = runSource(corpusSource("132_by_reference.ojs"), "132.ojs");
  assert.strictEqual(out.trim(), "2");
});

test("exactly two on_new events fire for complex", () => {
  const out = runSource(corpusSource("162_event_on_new.ojs"), "162.ojs");
  const fired = out.split("\n").filter((l) => l === "instantiation");
  assert.strictEqual(fired.length, 2);
});

test("complex chain _a * 2 + 1 evaluates to 3.2+0i within 1e-12", () => {
  const out = runSource(
    "complex _a = 1.1;\n" +
    "var _r = _a * 2 + 1;\n" +
    "console.log(_r.real, _r.imag);\n", "chain.ojs");
  const [real, imag] = out.trim().split(" ").map(Number);
  assert.ok(Math.abs(real - 3.2) < 1e-12, `real=${real}`);
  assert.ok(Math.abs(imag) < 1e-12, `imag=${imag}`);
});

test("array extraction slices match the documented picks", () => {
  const out = runSource(corpusSource("020_array_extract.ojs"), "020.ojs");
  const flat = out.replace(/\s+/g, " ");
  const picks = ["[ 3, 4, 9, 8 ]", "[ 6, 5, 4, 3, 2, 1, 0 ]",
                 "[ 9, 8, 7, 6, 5, 4 ]", "[ 6, 5, 4 ]", "[ 9, 8, 7, 2, 1, 0 ]"];
  let cursor = 0;
  for (const pick of picks) {
    const at = flat.indexOf(pick, cursor);
    assert.ok(at >= 0, `missing ${pick} in ${flat}`);
    cursor = at + pick.length;
  }
});

test("pop repeater empties the array", () => {
  const out = runSource(corpusSource("025_array_pop_all.ojs"), "025.ojs");
  assert.strictEqual(out.trim(), "[]");
});

test("regex switch classifies integers", () => {
  const out = runSource(corpusSource("060_switch_regex.ojs"), "060.ojs");
  assert.strictEqual(out.trim(), "integer");
});

test("reverse self-operator diverts the result to the right container", () => {
  const out = runSource(corpusSource("040_reverse_self_op.ojs"), "040.ojs");
  assert.deepStrictEqual(out.trim().split("\n"), ["Iam", "Iam"]);
});

test("block repeater logs the counter 0..3", () => {
  const out = runSource(corpusSource("130_block_repeater.ojs"), "130.ojs");
  assert.deepStrictEqual(out.trim().split("\n"), ["0", "1", "2", "3"]);
});

test("the weak-overload program dispatches and warns at run time", () => {
  const src = corpusSource("120_weak_overloads.ojs");
  const js = compileUnit(src, "120.ojs");
  const driver = `require(${JSON.stringify(RUNTIME_DIST)});` +
    `const warnings = [];` +
    `(globalThis.__objs_rt)._warn_capture = (t) => warnings.push(t);` +
    `console.warn = () => undefined;` +
    `require(${JSON.stringify(js)});` +
    `console.log("WARNINGS:" + warnings.length);`;
  const out = execFileSync(process.execPath, ["-e", driver], { encoding: "utf-8" });
  const lines = out.trim().split("\n");
  assert.deepStrictEqual(lines.slice(0, 3), ["number", "complex", "undefined"]);
  assert.strictEqual(lines[3], "WARNINGS:1");
});

test("runtime dispatch agrees with static resolution on typed call sites", () => {
  // the same argument lists routed statically (direct mangled calls) and
  // dynamically (through an untypable alias) land on the same targets
  const src =
    "function fn(complex a){ return 'complex'; }\n" +
    "function fn(Number a){ return 'number'; }\n" +
    "function launder(v) { return v; }\n" +
    "var n = launder(1);\n" +
    "var c = launder(new complex(1,2));\n" +
    "console.log(fn(1), fn(n));\n" +
    "console.log(fn(new complex(1,2)), fn(c));\n";
  const out = runSource(src, "agree.ojs");
  const lines = out.trim().split("\n");
  assert.strictEqual(lines[0], "number number");
  assert.strictEqual(lines[1], "complex complex");
});

const RUNNABLE = [
  "010_multi_one_to_many.ojs", "011_multi_many_to_many.ojs",
  "012_multi_loop_fill.ojs", "013_multi_wildcard.ojs", "014_multi_fn_value.ojs",
  "020_array_extract.ojs", "021_array_push_one.ojs", "022_array_push_repeat.ojs",
  "023_array_push_loop.ojs", "024_array_pop_one.ojs", "025_array_pop_all.ojs",
  "030_json_zip_explicit.ojs", "031_json_zip_implicit.ojs", "032_json_parent.ojs",
  "033_json_root_sibling.ojs", "040_reverse_self_op.ojs", "060_switch_regex.ojs",
  "070_fork_three.ojs", "071_fork_four.ojs", "080_binary_conditionals.ojs",
  "090_decorated_constants.ojs", "100_ns_open.ojs", "101_ns_autoclose.ojs",
  "102_ns_braced.ojs", "103_ns_alias.ojs", "110_typified_patterns.ojs",
  "112_typified_chain.ojs", "113_typified_add_product.ojs",
  "114_typified_imag.ojs", "120_weak_overloads.ojs", "121_weak_formula.ojs",
  "122_strong_formula.ojs", "124_json_typed_methods.ojs",
  "125_prototype_methods.ojs", "126_class_methods.ojs", "130_block_repeater.ojs",
  "131_sequences.ojs", "132_by_reference.ojs", "143_opt_fold.ojs",
  "144_opt_propagate.ojs", "145_opt_joint.ojs", "150_overload_prefix_postfix.ojs",
  "151_overload_bangbangbang.ojs", "152_overload_polyadic.ojs",
  "153_overload_function_alias.ojs", "154_command_is.ojs", "155_command_inside.ojs",
  "156_reserved_fr.ojs", "157_reserved_it.ojs", "158_event_decl.ojs",
  "159_event_array_push.ojs", "160_event_decl_assign_targets.ojs",
  "161_event_decl_assign_all.ojs", "162_event_on_new.ojs",
  "170_typecast_directive.ojs", "171_typecast_number.ojs", "172_typecast_chain.ojs",
];

test("optimized and unoptimized emissions produce identical output", () => {
  for (const name of RUNNABLE) {
    const src = corpusSource(name);
    const work = fs.mkdtempSync(path.join(os.tmpdir(), "objs-diff-"));
    const plainOut = runCompiled(compileUnit(src, name, [], work)).stdout;
    const optimizedOut = runCompiled(
      compileUnit(src, name, ["--optimize"], work)).stdout;
    assert.strictEqual(optimizedOut, plainOut, name);
  }
});

test("the emitted runtime library file is ABI-compatible with this package", () => {
  const work = fs.mkdtempSync(path.join(os.tmpdir(), "objs-rtfile-"));
  const src = path.join(work, "probe.ojs");
  fs.writeFileSync(src, "var a = [];\na[] * 2 = 1;\nconsole.log(a);\n");
  execFileSync(PYTHON, ["-m", "objs.cli", "build", src, "-o", work,
                        "--emit-runtime", "--no-map"], { cwd: REPO });
  const emittedRuntime = path.join(work, "objs_runtime.js");
  assert.ok(fs.existsSync(emittedRuntime));
  // the compiled unit must run against the *emitted* runtime file too
  const driver = `require(${JSON.stringify(emittedRuntime)});` +
    `require(${JSON.stringify(path.join(work, "probe.js"))});`;
  const out = execFileSync(process.execPath, ["-e", driver], { encoding: "utf-8" });
  assert.match(out, /\[\s*1,\s*1\s*\]/);
  // and its namespace surface must cover everything this package exports
  const emitted = require(emittedRuntime);
  const ours = require(RUNTIME_DIST).rt;
  for (const key of Object.keys(ours)) {
    if (key.startsWith("_")) { continue; }
    assert.ok(key in emitted, `emitted runtime lacks '${key}'`);
  }
  assert.strictEqual(emitted.ABI, ours.ABI);
});
