import itertools
import random

import pytest
from conftest import assert_well_formed, outputs

from mvlam.circuit import build_binary, build_dnf, build_unary, max_table, min_table
from mvlam.errors import (
    ArityError,
    DomainError,
    SizeGuardExceeded,
    TableError,
    TypeMismatch,
    WiringError,
)
from mvlam.inductive import build_hybrid, build_inductive, hybrid_compose, lift_fun
from mvlam.reduce import Evaluator, decode_value, encode_value, normalize
from mvlam.table import FunctionTable
from mvlam.terms import LetPair, Pair, alpha_eq, app, count_nodes
from mvlam.types import Arrow, arrow_type


def unary(entries):
    return FunctionTable((len(entries),), len(entries), tuple(entries))


def apply_lifted(lifted, f, values, r):
    nf = normalize(app(lifted, f, *(encode_value(v, r) for v in values))).normal_form
    return decode_value(nf, r)


def test_lift_unary_ignores_f():
    m = build_unary(unary([1, 0]))
    lifted = lift_fun(m, 1, 2)
    assert_well_formed(lifted)
    assert lifted.declared_type == Arrow(arrow_type(1, 2), arrow_type(1, 2))
    for entries in itertools.product(range(2), repeat=2):
        f = build_unary(unary(entries)).term
        assert [apply_lifted(lifted.term, f, [a], 2) for a in range(2)] == [1, 0]


def test_lift_binary_ignores_f():
    m = build_binary(min_table(2))
    lifted = lift_fun(m, 2, 2)
    assert_well_formed(lifted)
    for entries in itertools.product(range(2), repeat=4):
        f = build_binary(FunctionTable((2, 2), 2, entries)).term
        got = [apply_lifted(lifted.term, f, [a, b], 2) for a in range(2) for b in range(2)]
        assert got == [0, 0, 0, 1]


def test_double_lift():
    # the lifted term applied to F is again a U_{1,3} term, so it can serve as F
    m = build_unary(unary([2, 0, 1]))
    lifted = lift_fun(m, 1, 3).term
    f = build_unary(unary([0, 0, 0])).term
    for a in range(3):
        nf = normalize(app(lifted, app(lifted, f), encode_value(a, 3))).normal_form
        assert decode_value(nf, 3) == [2, 0, 1][a]


def test_lift_rejects_wrong_type():
    with pytest.raises(TypeMismatch):
        lift_fun(build_unary(unary([0, 1])), 2, 2)


def test_inductive_min_copy_free():
    t = min_table(2)
    b = build_inductive(t)
    assert_well_formed(b)
    assert outputs(b, t) == [0, 0, 0, 1]
    assert count_nodes(b.term, LetPair) == 0
    assert count_nodes(b.term, Pair) == 0


def test_inductive_random_r3():
    rng = random.Random(2024)
    for _ in range(20):
        t = FunctionTable((3, 3), 3, tuple(rng.randrange(3) for _ in range(9)))
        b = build_inductive(t)
        assert outputs(b, t) == list(t.entries)
        assert count_nodes(b.term, LetPair) == 0 and count_nodes(b.term, Pair) == 0


def test_inductive_three_args():
    t = FunctionTable.from_function(lambda a, b, c: (a * b + c) % 3, (3, 3, 3), 3)
    b = build_inductive(t)
    assert_well_formed(b)
    assert outputs(b, t) == list(t.entries)
    assert count_nodes(b.term, LetPair) == 0


def test_inductive_base_case_is_unary():
    t = unary([2, 2, 0])
    assert alpha_eq(build_inductive(t).term, build_unary(t).term)


def test_any_seed_gives_same_function():
    t = FunctionTable((3, 3), 3, (2, 1, 0, 0, 0, 1, 2, 2, 2))
    for seed in range(3):
        b = build_inductive(t, seed=seed)
        assert_well_formed(b)
        assert outputs(b, t) == list(t.entries)
    ref = Evaluator(build_inductive(t).term, (3, 3), 3)
    alt = Evaluator(build_inductive(t, seed=2).term, (3, 3), 3)
    for args in itertools.product(range(3), repeat=2):
        assert alpha_eq(*(normalize(app(e.term, *(encode_value(a, 3) for a in args))).normal_form
                          for e in (ref, alt)))
    with pytest.raises(DomainError):
        build_inductive(t, seed=3)


def test_inductive_errors():
    with pytest.raises(TableError):
        build_inductive(FunctionTable((2, 3), 3, (0,) * 6))
    with pytest.raises(SizeGuardExceeded):
        build_inductive(FunctionTable((2,) * 5, 2, (0,) * 32), size_guard=16)


def test_hybrid_style():
    t = FunctionTable.from_function(lambda a, b: (a + 2 * b) % 3, (3, 3), 3)
    b = build_hybrid(t)
    assert_well_formed(b)
    assert outputs(b, t) == list(t.entries)


def test_compose_disjoint():
    and2 = build_inductive(min_table(2))
    xor = build_inductive(FunctionTable((2, 2), 2, (0, 1, 1, 0)))
    mx = build_binary(max_table(2))
    c = hybrid_compose(mx, [(and2, [0, 1]), (xor, [2, 3])])
    assert_well_formed(c)
    want = [max(min(a, b), c_ ^ d) for a, b, c_, d in itertools.product(range(2), repeat=4)]
    assert Evaluator(c.term, (2,) * 4, 2).table() == want
    assert count_nodes(c.term, LetPair) == 0


def test_compose_shared():
    and2 = build_inductive(min_table(2))
    xor = build_inductive(FunctionTable((2, 2), 2, (0, 1, 1, 0)))
    mx = build_binary(max_table(2))
    c = hybrid_compose(mx, [(and2, [0, 1]), (xor, [1, 2])])
    assert_well_formed(c)
    assert count_nodes(c.term, LetPair) >= 1
    want = [max(min(a, b), b ^ d) for a, b, d in itertools.product(range(2), repeat=3)]
    assert Evaluator(c.term, (2,) * 3, 2).table() == want


def test_compose_single():
    ident = build_unary(unary([0, 1, 2]))
    inner = build_inductive(FunctionTable.from_function(lambda a, b: max(a, b), (3, 3), 3))
    c = hybrid_compose(ident, [(inner, [0, 1])])
    assert outputs(c, max_table(3)) == outputs(inner, max_table(3))


def test_compose_pass_through():
    mn = build_binary(min_table(3))
    c = hybrid_compose(mn, [(None, [1]), (None, [0])])
    assert outputs(c, min_table(3)) == list(min_table(3).entries)


def test_wiring_errors():
    mn = build_binary(min_table(2))
    with pytest.raises(WiringError):
        hybrid_compose(mn, [(None, [0])])
    with pytest.raises(WiringError):
        hybrid_compose(mn, [(None, [0]), (None, [2])])
    with pytest.raises(WiringError):
        hybrid_compose(mn, [(None, [0]), (None, [1])], n_sources=3)
    with pytest.raises(WiringError):
        hybrid_compose(mn, [(mn, [0]), (None, [1])])
    with pytest.raises(ArityError):
        hybrid_compose(mn, [(build_unary(unary([0, 1, 2])), [0]), (None, [1])])


def test_styles_agree_r2():
    for entries in itertools.product(range(2), repeat=4):
        t = FunctionTable((2, 2), 2, entries)
        assert outputs(build_inductive(t), t) == outputs(build_dnf(t), t) == list(entries)
