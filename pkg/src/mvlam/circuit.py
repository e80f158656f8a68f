"""Circuit-style synthesis of linear combinators.

Values of radix ``r`` are the cyclic Church-like terms ``v_i`` of type ``T_r``.
Applying ``v_j`` to slot functions ``A_{r-1} ... A_0`` and a seed gives
``A_j (A_{j+1} (... (A_{j+r-1} seed)))``, so the first slot serves input
``r-1`` and the last serves input ``0``.  Almost every builder below is an
instance of this selector: ``h S_{r-1} ... S_0 seed`` with one slot per input.
When a slot is the identity ``I`` the selector falls through to the next slot,
which is what the optimizer exploits.
"""

from __future__ import annotations

import itertools
import math
import warnings
from typing import Sequence

from .checker import Gen
from .errors import (
    ArityError,
    DegenerateRadixWarning,
    DomainError,
    SizeGuardExceeded,
    TableError,
)
from .fragments import (
    A,
    BuiltTerm,
    Frag,
    Names,
    ap,
    counted,
    identity,
    lam,
    let,
    pair,
    tuple_frag,
    var,
)
from .reduce import value_body
from .table import FunctionTable
from .terms import Var, substitute
from .types import (
    Arrow,
    Forall,
    Prod,
    TVar,
    arrow_type,
    base_type,
    dup_type,
    endo,
    prods,
    value_signature,
)

DEFAULT_SIZE_GUARD = 1024


def _radix(r: int) -> None:
    if not isinstance(r, int) or isinstance(r, bool) or r < 1:
        raise DomainError(f"radix must be an integer >= 1, got {r!r}")


def _index(i: int, r: int, what: str = "value") -> None:
    _radix(r)
    if not isinstance(i, int) or not 0 <= i < r:
        raise DomainError(f"{what} {i!r} out of range 0..{r - 1}")


def _fs(r: int) -> list[str]:
    """Binder names ``f_{r-1} ... f_0`` (index k is ``f{k}``)."""
    return [f"f{k}" for k in range(r)]


def _value_lams(r: int, body: Frag) -> Frag:
    return lam([*reversed(_fs(r)), "x"], body)


def _ids(n: int) -> list[Frag]:
    return [identity() for _ in range(n)]


# ---------------------------------------------------------------------------
# values and basic combinators

def value_frag(i: int, r: int) -> Frag:
    """``v_i`` generalized at its root, ready to be checked against ``T_r``."""
    body = value_body(i, r, [var(f).term for f in _fs(r)], var("x").term)
    return Frag(_value_lams(r, Frag(body)).term).gen()


def build_value(i: int, r: int) -> BuiltTerm:
    _index(i, r)
    return BuiltTerm.from_frag(value_frag(i, r), base_type(r), style="value")


def build_identity() -> BuiltTerm:
    """``I`` at ``forall 'a. 'a -> 'a``."""
    return BuiltTerm.from_frag(identity().gen(), Forall("'a", Arrow(A, A)))


def _wrap_value(i: int, r: int, inner: Frag) -> Frag:
    """``fn f_{r-1} .. f_0 x => f_i (... (f_{i+r-1} inner))``, generalized."""
    frag = inner
    for k in range(r - 1, -1, -1):
        frag = ap(var(f"f{(i + k) % r}"), frag)
    return _value_lams(r, frag).gen()


def _discard(h: str, r: int, inner: Frag) -> Frag:
    """``h I .. I inner``: consume the value ``h`` (instantiated at ``'a``)."""
    return ap(var(h).inst(A), *_ids(r), inner)


def const_frag(i: int, r: int) -> Frag:
    return counted(lam("h", _wrap_value(i, r, _discard("h", r, var("x")))))


def build_const_unary(i: int, r: int) -> BuiltTerm:
    """``const_i``: every input to ``v_i``; typed monomorphically."""
    _index(i, r)
    return BuiltTerm.from_frag(const_frag(i, r), endo(base_type(r)))


def cyc_frag(i: int, r: int) -> Frag:
    # slot order f_{i-1}, f_{i-2}, ..., f_{i-r} makes v_j land on v_{i+j}
    slots = [var(f"f{(i - 1 - k) % r}") for k in range(r)]
    body = ap(var("h").inst(A), *slots, var("x"))
    return lam("h", _value_lams(r, body).gen())


def build_cyc(i: int, r: int) -> BuiltTerm:
    """``cyc_i``: ``v_j`` to ``v_{(i+j) mod r}``."""
    _index(i, r)
    return BuiltTerm.from_frag(cyc_frag(i, r), endo(base_type(r)))


# ---------------------------------------------------------------------------
# unary functions

def _check_table(table: FunctionTable, arity: int | None = None) -> None:
    if not isinstance(table, FunctionTable):
        raise TableError("expected a FunctionTable")
    if arity is not None and table.arity != arity:
        raise TableError(f"expected a {arity}-ary table, got arity {table.arity}")
    if 1 in table.input_radices + (table.output_radix,):
        warnings.warn("radix 1 is a degenerate single-valued domain", DegenerateRadixWarning,
                      stacklevel=3)


def unary_frag(values: Sequence[int], r_in: int, r_out: int,
               slots: Sequence[int | None] | None = None) -> Frag:
    """``fn h => h S_{r-1} .. S_0 v_0`` over ``T_{r_out}``.

    ``slots[j]`` is the constant placed in the slot serving input ``j`` or
    ``None`` for ``I``; by default every slot holds ``const_{values[j]}``.
    """
    if slots is None:
        slots = list(values)
    args = [const_frag(s, r_out) if s is not None else identity()
            for s in reversed(list(slots))]
    t_out = base_type(r_out)
    return lam("h", ap(var("h").inst(t_out), *args, value_frag(0, r_out)))


def build_unary(table: FunctionTable, slots: Sequence[int | None] | None = None) -> BuiltTerm:
    """Any ``g : r -> r'`` as a term of type ``T_r -> T_r'``.

    ``slots`` overrides the per-input slot contents (``None`` means ``I``);
    it must still realize ``table`` under the fall-through selector rule.
    """
    _check_table(table, 1)
    (r_in,), r_out = table.input_radices, table.output_radix
    if slots is not None:
        slots = list(slots)
        if len(slots) != r_in:
            raise TableError(f"expected {r_in} slots, got {len(slots)}")
        if all(s is None for s in slots):
            raise TableError("at least one slot must hold a constant")
        for j in range(r_in):
            if _select(slots, j) != table.entries[j]:
                raise TableError(f"slot assignment gives {_select(slots, j)} at input {j}, "
                                 f"table says {table.entries[j]}")
    frag = unary_frag(table.entries, r_in, r_out, slots)
    return BuiltTerm.from_frag(frag, Arrow(base_type(r_in), base_type(r_out)))


def _select(slots: Sequence[int | None], j: int) -> int | None:
    """Output of the selector: first constant at or after ``j``, cyclically."""
    r = len(slots)
    for k in range(r):
        s = slots[(j + k) % r]
        if s is not None:
            return s
    return None


def literal_table(i: int, p: int, r: int) -> FunctionTable:
    """``C_i^p``: ``p`` at ``i``, ``0`` elsewhere."""
    _index(i, r, "literal index")
    _index(p, r, "literal value")
    return FunctionTable((r,), r, tuple(p if x == i else 0 for x in range(r)))


def build_literal(i: int, p: int, r: int, optimize: bool = False) -> BuiltTerm:
    table = literal_table(i, p, r)
    if optimize:
        from .optimize import minimize_run_slots
        return build_unary(table, minimize_run_slots(table.entries).slots)
    return build_unary(table)


# ---------------------------------------------------------------------------
# binary functions

def _t_endo(r: int):
    return endo(base_type(r))


def const_f_frag(i: int, r: int) -> Frag:
    """``fn F h f.. x => f_i (.. (h I..I (F v_0 I..I x)))``."""
    inner = ap(ap(var("F"), value_frag(0, r)).inst(A), *_ids(r), var("x"))
    return counted(lam(["F", "h"], _wrap_value(i, r, _discard("h", r, inner))))


def build_const_f(i: int, r: int) -> BuiltTerm:
    _index(i, r)
    t = _t_endo(r)
    return BuiltTerm.from_frag(const_f_frag(i, r), Arrow(t, t))


def row_frag(values: Sequence[int], r: int, slots: Sequence[int | None] | None = None) -> Frag:
    """``fn F h => h S_{r-1} .. S_0 I (F v_0)`` with ``S_j = const_f_{values[j]}``."""
    if slots is None:
        slots = list(values)
    args = [const_f_frag(s, r) if s is not None else identity() for s in reversed(list(slots))]
    body = ap(var("h").inst(_t_endo(r)), *args, identity(), ap(var("F"), value_frag(0, r)))
    return lam(["F", "h"], body)


def build_row(values: Sequence[int], r: int, slots: Sequence[int | None] | None = None
              ) -> BuiltTerm:
    _radix(r)
    values = list(values)
    if len(values) != r:
        raise DomainError(f"row needs {r} values, got {len(values)}")
    for v in values:
        _index(v, r)
    if slots is not None and [_select(slots, j) for j in range(r)] != values:
        raise DomainError("slot assignment does not realize the row")
    t = _t_endo(r)
    return BuiltTerm.from_frag(row_frag(values, r, slots), Arrow(t, t))


def matrix_frag(rows: Sequence[Sequence[int]], r: int,
                row_slots: Sequence[Sequence[int | None]] | None = None) -> Frag:
    """``fn h => h R_{r-1} .. R_0 I`` with ``R_i`` the row for first input ``i``."""
    if row_slots is None:
        row_slots = [None] * r
    rs = [row_frag(rows[i], r, row_slots[i]) for i in range(r - 1, -1, -1)]
    return lam("h", ap(var("h").inst(_t_endo(r)), *rs, identity()))


def transposed_matrix_frag(rows: Sequence[Sequence[int]], r: int,
                           col_slots: Sequence[Sequence[int | None]] | None = None) -> Frag:
    """``fn x y => (y C_{r-1} .. C_0 I) x``: select on the second input first."""
    cols = [[rows[i][j] for i in range(r)] for j in range(r)]
    if col_slots is None:
        col_slots = [None] * r
    cs = [row_frag(cols[j], r, col_slots[j]) for j in range(r - 1, -1, -1)]
    return lam(["x", "y"], ap(ap(var("y").inst(_t_endo(r)), *cs, identity()), var("x")))


def _square(table: FunctionTable) -> int:
    _check_table(table, 2)
    r = table.output_radix
    if table.input_radices != (r, r):
        raise TableError("binary builder needs both input radices equal to the output radix")
    return r


def build_binary(table: FunctionTable) -> BuiltTerm:
    """``M h = h row_{r-1} .. row_0 I`` for a square table."""
    r = _square(table)
    return BuiltTerm.from_frag(matrix_frag(table.rows(), r), arrow_type(2, r))


def min_table(r: int, n: int = 2) -> FunctionTable:
    return FunctionTable.from_function(lambda *a: min(a), (r,) * n, r)


def max_table(r: int, n: int = 2) -> FunctionTable:
    return FunctionTable.from_function(lambda *a: max(a), (r,) * n, r)


# ---------------------------------------------------------------------------
# composition

def signature(built: BuiltTerm) -> tuple[tuple[int, ...], int]:
    sig = value_signature(built.declared_type)
    if sig is None:
        raise ArityError(f"declared type is not a function of values: {built.declared_type}")
    return sig


def _fun_type(inputs: Sequence[int], output: int):
    t = base_type(output)
    for r in reversed(list(inputs)):
        t = Arrow(base_type(r), t)
    return t


def compose_linear(outer: BuiltTerm, position: int, inner: BuiltTerm) -> BuiltTerm:
    """Feed ``inner``'s output into argument ``position`` (1-based) of ``outer``."""
    outs, _ = signature(outer)
    ins, inner_out = signature(inner)
    m, k = len(outs), len(ins)
    if not isinstance(position, int) or not 1 <= position <= m:
        raise ArityError(f"position {position!r} outside 1..{m}")
    if outs[position - 1] != inner_out:
        raise ArityError(f"argument {position} has radix {outs[position - 1]}, "
                         f"inner output has radix {inner_out}")
    names = Names()
    ys = names.many("y", m)
    zs = names.many("z", k)
    inner_app = ap(inner.frag(), *(var(z) for z in zs))
    args = [var(y) for y in ys]
    args[position - 1] = inner_app
    params = ys[:position - 1] + zs + ys[position:]
    radices = outs[:position - 1] + ins + outs[position:]
    frag = lam(params, ap(outer.frag(), *args))
    return BuiltTerm.from_frag(frag, _fun_type(radices, signature(outer)[1]))


def _fold(n: int, binary: BuiltTerm, r: int) -> BuiltTerm:
    if n == 1:
        return build_unary(FunctionTable((r,), r, tuple(range(r))))
    if n == 2:
        return binary
    left, right = (n + 1) // 2, n // 2
    left_t = _fold(left, binary, r)
    right_t = _fold(right, binary, r)
    partial = compose_linear(binary, 2, right_t) if right > 1 else binary
    return compose_linear(partial, 1, left_t) if left > 1 else partial


def build_conj(n: int, r: int) -> BuiltTerm:
    """``&_n``: n-ary minimum by a balanced fold of the binary minimum."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"arity must be >= 1, got {n!r}")
    _radix(r)
    return _fold(n, build_binary(min_table(r)), r)


def build_disj(n: int, r: int) -> BuiltTerm:
    """``⊔_n``: n-ary maximum."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"arity must be >= 1, got {n!r}")
    _radix(r)
    return _fold(n, build_binary(max_table(r)), r)


# ---------------------------------------------------------------------------
# pairs and copying

def tp_app_frag() -> Frag:
    """``fn h z => let (f,g)=h in let (x,y)=z in (f x, g y)``."""
    body = let("f", "g", var("h"),
               let("x", "y", var("z"), pair(ap(var("f"), var("x")), ap(var("g"), var("y")))))
    return lam(["h", "z"], body)


def build_tp_app() -> BuiltTerm:
    a, b, c, d = (TVar(v) for v in ("'a", "'b", "'c", "'d"))
    ty = Arrow(Prod(Arrow(a, b), Arrow(c, d)), Arrow(Prod(a, c), Prod(b, d)))
    for v in ("'d", "'c", "'b", "'a"):
        ty = Forall(v, ty)
    frag = tp_app_frag().mark(Gen("'d"), Gen("'c"), Gen("'b"), Gen("'a"))
    return BuiltTerm.from_frag(frag, ty)


def _tp_const(c: int, r: int, n: int) -> Frag:
    """``const_c`` on every component of an n-tuple."""
    if n == 1:
        return const_frag(c, r)
    return ap(tp_app_frag(), pair(const_frag(c, r), _tp_const(c, r, n - 1)))


def copy_frag(r: int, n: int, h: Frag) -> Frag:
    """``h S_{r-1} .. S_0 (v_0, .., v_0)`` where ``S_j`` sets every component to ``v_j``.

    The slot serving input ``j`` must hold ``const_j``, so the slot list starts
    with ``const_{r-1}``.
    """
    slots = [_tp_const(j, r, n) for j in range(r - 1, -1, -1)]
    seed = tuple_frag([value_frag(0, r) for _ in range(n)])
    return ap(h.inst(prods([base_type(r)] * n)), *slots, seed)


def build_copy_n(r: int, n: int) -> BuiltTerm:
    _radix(r)
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"copy arity must be >= 2, got {n!r}")
    return BuiltTerm.from_frag(lam("h", copy_frag(r, n, var("h"))), dup_type(n, r))


def build_copy(r: int) -> BuiltTerm:
    return build_copy_n(r, 2)


def fan_out(source: str, uses: Sequence[str], r: int, names: Names, body: Frag) -> Frag:
    """Bind ``uses`` to copies of the value ``source`` around ``body``."""
    n = len(uses)
    if n == 1:
        return _rename_free(body, uses[0], source)
    rests = names.many(f"{source}_r", n - 2)
    # let (u1, r1) = copy s in let (u2, r2) = r1 in ... let (u_{n-1}, u_n) = r_{n-2}
    frag = body
    for k in range(n - 2, -1, -1):
        rhs = copy_frag(r, n, var(source)) if k == 0 else var(rests[k - 1])
        second = uses[n - 1] if k == n - 2 else rests[k]
        frag = let(uses[k], second, rhs, frag)
    return frag


def _rename_free(body: Frag, old: str, new: str) -> Frag:
    if old == new:
        return body
    return Frag(substitute(body.term, old, Var(new)), body.tree, body.consts)


# ---------------------------------------------------------------------------
# disjunctive normal form

def build_dnf(table: FunctionTable, size_guard: int = DEFAULT_SIZE_GUARD,
              optimize: bool = False) -> BuiltTerm:
    """``⊔_{r^n}`` over monomials ``&_n (C_{u_1}^v x_1) .. (C_{u_n}^v x_n)``.

    One monomial per input tuple ``u`` (lexicographic order) with ``v = f(u)``;
    each input variable is fanned out to its ``r^n`` literal positions by
    ``copy_{r, r^n}``.
    """
    _check_table(table)
    r = table.output_radix
    if not table.is_uniform:
        raise TableError("DNF synthesis needs a uniform radix; use build_hetero")
    n = table.arity
    count = r ** n
    if count > size_guard:
        raise SizeGuardExceeded(f"{r}^{n} = {count} monomials exceeds the guard {size_guard}")
    names = Names()
    hs = names.many("h", n)
    uses = [[f"{h}_{m}" for m in range(count)] for h in hs]
    conj = build_conj(n, r) if n > 1 else None
    literals: dict[tuple[int, int], BuiltTerm] = {}

    def literal(u: int, v: int) -> Frag:
        key = (u, v)
        if key not in literals:
            literals[key] = build_literal(u, v, r, optimize)
        return literals[key].frag()

    monomials = []
    for m, (u, v) in enumerate(zip(table.inputs(), table.entries)):
        lits = [ap(literal(u[k], v), var(uses[k][m])) for k in range(n)]
        monomials.append(ap(conj.frag(), *lits) if conj is not None else lits[0])
    body = ap(build_disj(count, r).frag(), *monomials) if count > 1 else monomials[0]
    for k in range(n - 1, -1, -1):
        body = fan_out(hs[k], uses[k], r, names, body)
    frag = lam(hs, body)
    return BuiltTerm.from_frag(frag, arrow_type(n, r), monomials=count)


# ---------------------------------------------------------------------------
# constants and projections of several variables

def const_n_frag(n: int, c: int, r: int) -> Frag:
    names = [f"h{k}" for k in range(1, n + 1)]
    inner = var("x")
    for h in reversed(names):
        inner = _discard(h, r, inner)
    return counted(lam(names, _wrap_value(c, r, inner)))


def build_const_n(n: int, c: int, r: int) -> BuiltTerm:
    """``const_{n,c}``: every input tuple to ``v_c``."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"arity must be >= 1, got {n!r}")
    _index(c, r)
    return BuiltTerm.from_frag(const_n_frag(n, c, r), arrow_type(n, r))


def build_proj(n: int, i: int, r: int) -> BuiltTerm:
    """``proj_{n,i}`` (1-based ``i``): the other arguments are discarded by
    ``h I .. I`` gadgets threaded through the seed."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"arity must be >= 1, got {n!r}")
    if not isinstance(i, int) or not 1 <= i <= n:
        raise DomainError(f"projection index {i!r} outside 1..{n}")
    _radix(r)
    names = [f"h{k}" for k in range(1, n + 1)]
    seed = var("x")
    for k in range(n, 0, -1):
        if k != i:
            seed = _discard(names[k - 1], r, seed)
    body = ap(var(names[i - 1]).inst(A), *(var(f) for f in reversed(_fs(r))), seed)
    frag = lam(names, _value_lams(r, body).gen())
    return BuiltTerm.from_frag(frag, arrow_type(n, r))


# ---------------------------------------------------------------------------
# mixed radices

def converter(r_in: int, r_out: int) -> BuiltTerm:
    """``T_{r_in} -> T_{r_out}`` keeping ``j`` when ``j < r_out``, else ``0``."""
    return build_unary(FunctionTable((r_in,), r_out,
                                     tuple(j if j < r_out else 0 for j in range(r_in))))


def build_hetero(table: FunctionTable, size_guard: int = DEFAULT_SIZE_GUARD) -> BuiltTerm:
    """Mixed-radix function: inject each input into ``R = max`` of all radices,
    run a uniform core over ``R``, convert the output back."""
    _check_table(table)
    if table.arity == 1:
        return build_unary(table)
    from .inductive import build_inductive
    radices, r_out = table.input_radices, table.output_radix
    big = max(radices + (r_out,))
    n = table.arity
    if table.is_uniform:
        return build_inductive(table, size_guard)
    if big ** n > size_guard:
        raise SizeGuardExceeded(f"{big}^{n} core entries exceed the guard {size_guard}")

    def core_fn(*args):
        if all(a < r for a, r in zip(args, radices)):
            return table(*args)
        return 0

    core = build_inductive(FunctionTable.from_function(core_fn, (big,) * n, big), size_guard)
    names = Names()
    hs = names.many("h", n)
    args = []
    for h, r in zip(hs, radices):
        args.append(ap(converter(r, big).frag(), var(h)) if r != big else var(h))
    body = ap(core.frag(), *args)
    if r_out != big:
        body = ap(converter(big, r_out).frag(), body)
    frag = lam(hs, body)
    return BuiltTerm.from_frag(frag, _fun_type(radices, r_out), common_radix=big)


def product_size(radices: Sequence[int]) -> int:
    return math.prod(radices)


def all_inputs(radices: Sequence[int]):
    return itertools.product(*(range(r) for r in radices))
