"""End-to-end acceptance criteria; each prints one PASS/FAIL line."""

import itertools
import math
import random
import time
import warnings

import pytest

from mvlam import bench
from mvlam.belnap import (
    ALL_INPUTS,
    MajorityOptions,
    belnap_tables,
    compile_majority,
    decomposition_pairs,
    dontcare_restrict,
    eval_decomposition,
    majority_oracle,
    merge_pairs,
    pair,
)
from mvlam.checker import Certificate, Directive, Gen, Inst, check, is_monomorphic
from mvlam.circuit import (
    build_binary,
    build_const_f,
    build_const_n,
    build_const_unary,
    build_copy,
    build_copy_n,
    build_cyc,
    build_dnf,
    build_hetero,
    build_identity,
    build_literal,
    build_proj,
    build_row,
    build_tp_app,
    build_unary,
    max_table,
    min_table,
)
from mvlam.datasets import load_table
from mvlam.errors import DegenerateRadixWarning
from mvlam.inductive import build_hybrid, build_inductive, lift_fun
from mvlam.optimize import build_add_mod, build_binary_opt, build_cyc_f, build_unary_opt
from mvlam.reduce import (
    Evaluator,
    decode_value,
    encode_value,
    enumerate_normal_inhabitants,
    normalize,
    normalize_random,
)
from mvlam.sweep import sweep
from mvlam.table import FunctionTable
from mvlam.terms import (
    Abs,
    App,
    LetPair,
    Pair,
    Var,
    alpha_eq,
    app,
    count_nodes,
    iter_nodes,
    replace_at,
)
from mvlam.types import Prod, TVar, base_type


@pytest.fixture
def verdict(capsys):
    def emit(n, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {title}"
                  + (f" ({detail})" if detail else ""))
        assert ok, detail
    return emit


def table_outputs(built, table):
    return Evaluator(built.term, table.input_radices, table.output_radix).table()


def typed(built):
    return check([], built.term, built.certificate, built.declared_type).ok


def rand_table(rng, radices, out):
    return FunctionTable(tuple(radices), out,
                         tuple(rng.randrange(out) for _ in range(math.prod(radices))))


# 1 ---------------------------------------------------------------------------

def test_criterion_01_inhabitants(verdict):
    start = time.perf_counter()
    ok, detail = True, []
    for r in range(2, 6):
        terms = enumerate_normal_inhabitants(r)
        distinct = all(not alpha_eq(a, b) for a, b in itertools.combinations(terms, 2))
        ty = base_type(r)
        checks = all(check([], t, Certificate.of(((), Gen("'a"))), ty).ok for t in terms)
        canonical = sorted(v for v in (decode_value(t, r) for t in terms) if isinstance(v, int))
        ok &= (len(terms) == math.factorial(r) and distinct and checks
               and canonical == list(range(r)))
        detail.append(f"r={r}: {len(terms)} terms, {len(canonical)} canonical")
    elapsed = time.perf_counter() - start
    verdict(1, "r! normal inhabitants of T_r", ok and elapsed < 1.0,
            "; ".join(detail) + f"; {elapsed:.2f}s")


# 2 ---------------------------------------------------------------------------

def test_criterion_02_unary_adequacy(verdict):
    start = time.perf_counter()
    rng = random.Random(2)
    tables = []
    for r in (2, 3):
        tables += [FunctionTable((r,), r, e) for e in itertools.product(range(r), repeat=r)]
    for r in (4, 5):
        tables += [rand_table(rng, (r,), r) for _ in range(100)]
    bad = [t.entries for t in tables
           if table_outputs(build_unary(t), t) != list(t.entries)
           or table_outputs(build_unary_opt(t), t) != list(t.entries)]
    elapsed = time.perf_counter() - start
    verdict(2, "unary adequacy, plain and run-optimized", not bad and elapsed < 30,
            f"{len(tables)} tables, {len(bad)} failures, {elapsed:.1f}s")


# 3 ---------------------------------------------------------------------------

def test_criterion_03_binary_adequacy(verdict):
    start = time.perf_counter()
    tables = {name: load_table(f"belnap_{name}") for name in ("oplus", "otimes", "vee", "wedge")}
    tables["min5"], tables["max5"] = min_table(5), max_table(5)
    bad = [name for name, t in tables.items()
           if not typed(b := build_binary(t)) or table_outputs(b, t) != list(t.entries)]
    elapsed = time.perf_counter() - start
    verdict(3, "binary adequacy on the Belnap and min/max tables", not bad and elapsed < 30,
            f"failures: {bad}; {elapsed:.1f}s")


# 4 ---------------------------------------------------------------------------

def test_criterion_04_cyc_and_add_mod(verdict):
    start = time.perf_counter()
    ok = True
    for r in range(1, 7):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateRadixWarning)
            for i in range(r):
                got = Evaluator(build_cyc(i, r).term, (r,), r).table()
                ok &= got == [(i + j) % r for j in range(r)]
    printed = load_table("add_mod5")
    ok &= table_outputs(build_add_mod(5), printed) == list(printed.entries)
    for r in range(2, 7):
        got = Evaluator(build_add_mod(r).term, (r, r), r).table()
        ok &= got == [(a + b) % r for a in range(r) for b in range(r)]
    elapsed = time.perf_counter() - start
    verdict(4, "cyc_i rotation and add_mod", ok and elapsed < 30, f"{elapsed:.1f}s")


# 5 ---------------------------------------------------------------------------

def _tuple_items(t, n):
    items = []
    for _ in range(n - 1):
        if not isinstance(t, Pair):
            return None
        items.append(t.left)
        t = t.right
    return items + [t]


def test_criterion_05_copy(verdict):
    start = time.perf_counter()
    bad = []
    for r in range(1, 6):
        for n in range(2, 9):
            term = build_copy_n(r, n).term
            for i in range(r):
                items = _tuple_items(normalize(App(term, encode_value(i, r))).normal_form, n)
                if items is None or [decode_value(x, r) for x in items] != [i] * n:
                    bad.append((r, n, i))
    elapsed = time.perf_counter() - start
    verdict(5, "copy_{r,n} duplicates every value", not bad and elapsed < 30,
            f"failures: {bad[:5]}; {elapsed:.1f}s")


# 6 ---------------------------------------------------------------------------

def test_criterion_06_dnf_inductive_equivalence(verdict):
    start = time.perf_counter()
    rng = random.Random(6)
    tables = [FunctionTable((2,) * n, 2, e)
              for n in (2, 3) for e in itertools.product(range(2), repeat=2 ** n)]
    tables += [rand_table(rng, (3, 3), 3) for _ in range(500)]
    bad, copy_nodes = [], 0
    for t in tables:
        ind, dnf = build_inductive(t), build_dnf(t)
        copy_nodes += count_nodes(ind.term, Pair) + count_nodes(ind.term, LetPair)
        a, b = table_outputs(ind, t), table_outputs(dnf, t)
        if not a == b == list(t.entries):
            bad.append(t.entries)
    elapsed = time.perf_counter() - start
    verdict(6, "circuit and inductive styles agree", not bad and copy_nodes == 0 and elapsed < 600,
            f"{len(tables)} tables, {len(bad)} failures, {copy_nodes} pair nodes in inductive "
            f"terms, {elapsed:.0f}s")


# 7 ---------------------------------------------------------------------------

def test_criterion_07_step_counts(verdict):
    start = time.perf_counter()
    ident = all(bench.identity_steps(r) == 1 for r in range(2, 7))
    counts = {r: {bench.const_steps(i, j, r) for i in range(r) for j in range(r)}
              for r in range(2, 7)}
    within = all(abs(c - (2 * r + 1)) <= 1 for r, cs in counts.items() for c in cs)
    single = {r: cs.pop() for r, cs in counts.items() if len(cs) == 1}
    slopes = {single[r + 1] - single[r] for r in range(2, 6)} if len(single) == 5 else set()
    report = bench.run("const-vs-I", 3)
    fit = bench.const_formula()
    recorded = (report["measured_formula"] == fit["formula"] and fit["affine"]
                and fit["slope"] == 2
                and all(fit["slope"] * r + fit["intercept"] == single[r] for r in single))
    elapsed = time.perf_counter() - start
    ok = ident and within and slopes == {2} and recorded and elapsed < 1.0
    verdict(7, "I·v in 1 step, const·v within one of 2r+1", ok,
            f"measured {report['measured_formula']}, claimed {report['claim_formula']}, "
            f"{elapsed:.2f}s")


# 8 ---------------------------------------------------------------------------

def test_criterion_08_optimization_counts(verdict):
    start = time.perf_counter()
    run_m, latin = bench.matrix_report("run_matrix"), bench.matrix_report("latin_square")
    ok = (run_m["unoptimized_consts"], run_m["optimized_consts"]) == (25, 13)
    ok &= (latin["unoptimized_consts"], latin["optimized_consts"]) == (25, 25)
    ok &= run_m["agree"] and latin["agree"]
    ok &= run_m["steps_never_increase"] and run_m["inputs_strictly_faster"] >= 1
    ok &= latin["steps_never_increase"]
    elapsed = time.perf_counter() - start
    verdict(8, "const_f counts 25 -> 13 and Latin square 25/25", ok and elapsed < 30,
            f"{run_m['unoptimized_consts']} -> {run_m['optimized_consts']}, "
            f"Latin {latin['unoptimized_consts']} -> {latin['optimized_consts']}, "
            f"{run_m['inputs_strictly_faster']} inputs faster, {elapsed:.1f}s")


# 9 ---------------------------------------------------------------------------

def _builder_pool():
    xor = FunctionTable((2, 2), 2, (0, 1, 1, 0))
    return [
        build_identity(), build_const_unary(1, 3), build_cyc(2, 3),
        build_unary(FunctionTable((3,), 3, (2, 0, 1))), build_literal(1, 2, 3, optimize=True),
        build_const_f(1, 3), build_row([1, 0, 2], 3), build_binary(min_table(2)),
        build_binary_opt(load_table("run_matrix"))[0], build_tp_app(), build_copy(3),
        build_dnf(xor), build_inductive(xor), build_hybrid(min_table(3)),
        build_const_n(2, 1, 2), build_proj(3, 2, 2), build_add_mod(3), build_cyc_f(1, 3),
        lift_fun(build_binary(max_table(2)), 2, 2),
        build_hetero(FunctionTable.from_function(lambda a, b: a + b, (2, 3), 4)),
    ]


def _shift_cert(cert, path):
    """Re-root directives below ``path + (0,)`` after deleting the binder at ``path``."""
    out = []
    for d in cert:
        p = d.path
        if p[:len(path) + 1] == path + (0,):
            p = path + p[len(path) + 1:]
        out.append(Directive(p, d.action))
    return Certificate(out)


def _mutate(built, rng):
    t, cert = built.term, built.certificate
    kinds = ["dup", "unbind"] + (["drop", "corrupt", "flip"] if len(cert) else [])
    kind = rng.choice(kinds)
    if kind == "dup":
        path, v = rng.choice([(p, n) for p, n in iter_nodes(t) if isinstance(n, Var)])
        return kind, replace_at(t, path, App(v, v)), cert
    if kind == "unbind":
        path, node = rng.choice([(p, n) for p, n in iter_nodes(t) if isinstance(n, Abs)])
        return kind, replace_at(t, path, node.body), _shift_cert(cert, path)
    ds = list(cert.directives)
    k = rng.randrange(len(ds))
    d = ds[k]
    if kind == "drop":
        del ds[k]
    elif kind == "corrupt":
        if isinstance(d.action, Inst):
            ds[k] = Directive(d.path, Inst(Prod(d.action.type, d.action.type)))
        elif d.path:
            # renaming a Gen is alpha-equivalent, so move it to the parent node instead
            ds[k] = Directive(d.path[:-1], d.action)
        else:
            ds[k] = Directive(d.path, Inst(TVar("'z")))
    else:
        ds[k] = Directive(d.path, Gen("'a") if isinstance(d.action, Inst) else Inst(TVar("'a")))
    return kind, t, Certificate(ds)


def test_criterion_09_typing_and_mutations(verdict):
    start = time.perf_counter()
    pool = _builder_pool()
    all_typed = all(typed(b) for b in pool)
    mono = (is_monomorphic(build_const_unary(2, 4).certificate)
            and is_monomorphic(build_cyc(1, 4).certificate)
            and not is_monomorphic(build_unary(FunctionTable((3,), 3, (1, 1, 0))).certificate)
            and not is_monomorphic(build_row([0, 2, 1], 3).certificate))
    rng = random.Random(9)
    survivors, kinds = [], {}
    for _ in range(100):
        built = rng.choice(pool)
        kind, term, cert = _mutate(built, rng)
        kinds[kind] = kinds.get(kind, 0) + 1
        if check([], term, cert, built.declared_type).ok:
            survivors.append((kind, built.style))
    elapsed = time.perf_counter() - start
    ok = all_typed and mono and not survivors and elapsed < 60
    verdict(9, "builders type-check and 100 mutations are rejected", ok,
            f"mutations {dict(sorted(kinds.items()))}, survivors {survivors}, {elapsed:.1f}s")


# 10 --------------------------------------------------------------------------

def test_criterion_10_belnap(verdict):
    start = time.perf_counter()
    tb = belnap_tables()
    want = [majority_oracle(*x) for x in ALL_INPUTS]
    ok = [eval_decomposition(*x) for x in ALL_INPUTS] == want
    m = merge_pairs(3, 4)
    ok &= m is not None and all(
        m.h0(m.f0(a, b), m.g0(c, d))
        == tb.oplus(tb.otimes(pair(3).f(a, b), pair(3).g(c, d)),
                    tb.otimes(pair(4).f(a, b), pair(4).g(c, d)))
        for a, b, c, d in ALL_INPUTS)
    for i in range(1, 7):
        deg = dontcare_restrict(tb.otimes, pair(i).f.entries, pair(i).g.entries)
        got = []
        for a, b, c, d in ALL_INPUTS:
            acc = 0
            for p in decomposition_pairs():
                op = deg if p.index == i else tb.otimes
                acc = tb.oplus(acc, op(p.f(a, b), p.g(c, d)))
            got.append(acc)
        ok &= got == want
    subfunctions = {}
    for opts in MajorityOptions.all():
        built, report = compile_majority(opts)
        ok &= report.ok and report.agreement == 256 and typed(built)
        subfunctions[opts.merge] = report.subfunctions
    ok &= subfunctions[False] - subfunctions[True] == 4
    elapsed = time.perf_counter() - start
    verdict(10, "Belnap majority decomposition, merge, don't-cares, compilation",
            ok and elapsed < 300,
            f"subfunctions {subfunctions[False]} -> {subfunctions[True]}, {elapsed:.0f}s")


# 11 --------------------------------------------------------------------------

def test_criterion_11_mixed_radix(verdict):
    start = time.perf_counter()
    rng = random.Random(11)
    bad = []
    for r_in, r_out in itertools.product((2, 3, 4), repeat=2):
        for _ in range(20):
            t = rand_table(rng, (r_in,), r_out)
            b = build_unary(t)
            if not typed(b) or table_outputs(b, t) != list(t.entries):
                bad.append((r_in, r_out, t.entries))
    mixed = FunctionTable.from_function(lambda x, y: x + y, (2, 3), 4)
    h = build_hetero(mixed)
    ok = not bad and typed(h) and table_outputs(h, mixed) == [x + y for x in range(2)
                                                            for y in range(3)]
    elapsed = time.perf_counter() - start
    verdict(11, "mixed-radix converters and a mixed function", ok and elapsed < 60,
            f"{len(bad)} converter failures, {elapsed:.1f}s")


# 12 --------------------------------------------------------------------------

def _small_pool():
    """Builder terms paired with the radices of their arguments."""
    return [
        (build_const_unary(1, 3), (3,)), (build_cyc(2, 3), (3,)),
        (build_unary(FunctionTable((3,), 3, (2, 2, 0))), (3,)),
        (build_binary(min_table(2)), (2, 2)),
        (build_inductive(FunctionTable((2, 2), 2, (1, 0, 0, 1))), (2, 2)),
        (build_copy(2), (2,)), (build_add_mod(3), (3, 3)), (build_proj(2, 1, 2), (2, 2)),
        (build_const_n(2, 0, 2), (2, 2)), (build_literal(0, 2, 3, optimize=True), (3,)),
    ]


def test_criterion_12_confluence_and_determinism(verdict):
    start = time.perf_counter()
    rng = random.Random(12)
    pool = _small_pool()
    diverged = unstable = 0
    for _ in range(200):
        built, radices = rng.choice(pool)
        args = [encode_value(rng.randrange(r), r) for r in radices]
        term = app(built.term, *args)
        lo = normalize(term)
        lo_small = normalize(term, choose=lambda n: 0)
        rnd = normalize_random(term, random.Random(rng.random()))
        if not (alpha_eq(lo.normal_form, rnd.normal_form)
                and alpha_eq(lo.normal_form, lo_small.normal_form)):
            diverged += 1
        if normalize(term) != lo or lo_small.steps != lo.steps:
            unstable += 1
    jobs_equal = True
    for built in (build_add_mod(3), build_binary(min_table(3))):
        one = sweep(built.term, (3, 3), 3, jobs=1)
        two = sweep(built.term, (3, 3), 3, jobs=2)
        jobs_equal &= one.outcomes == two.outcomes
    elapsed = time.perf_counter() - start
    ok = diverged == 0 and unstable == 0 and jobs_equal and elapsed < 120
    verdict(12, "random redex order reaches the leftmost-outermost normal form", ok,
            f"{diverged} divergent, {unstable} unstable, jobs-invariant={jobs_equal}, "
            f"{elapsed:.1f}s")
