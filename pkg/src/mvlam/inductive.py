"""Inductive-style synthesis: recursion on the first argument.

For ``f`` of arity ``n+1`` the subfunctions ``f(j, -)`` are built recursively,
each is lifted to ``U_{n,r} -> U_{n,r}`` (ignoring its argument), and the
first input selects among them:

    M h = h M^Fun_{r-1} ... M^Fun_0 const_{n,0}

No value is ever used twice, so no copy combinator (and no pair) is needed.
"""

from __future__ import annotations

from typing import Sequence

from .circuit import (
    DEFAULT_SIZE_GUARD,
    _fun_type,
    build_dnf,
    build_unary,
    const_n_frag,
    fan_out,
    signature,
    value_frag,
)
from .errors import (
    ArityError,
    DomainError,
    SizeGuardExceeded,
    TableError,
    TypeMismatch,
    WiringError,
)
from .fragments import BuiltTerm, Frag, Names, ap, identity, lam, var
from .table import FunctionTable
from .types import Arrow, arrow_type, base_type, type_alpha_eq


def _discard_fun(F: Frag, n: int, r: int, inner: Frag) -> Frag:
    """``(F v_0 .. v_0 I .. I) inner``: consume an ``n``-ary function ``F``.

    ``F v_0 .. v_0`` is a value, instantiated at ``T_r`` and applied to ``r``
    identities it becomes the identity on ``T_r``.
    """
    value = ap(F, *(value_frag(0, r) for _ in range(n))).inst(base_type(r))
    return ap(ap(value, *(identity() for _ in range(r))), inner)


def lift_frag(m: Frag, n: int, r: int) -> Frag:
    hs = [f"h{k}" for k in range(1, n + 1)]
    body = _discard_fun(var("F"), n, r, ap(m, *(var(h) for h in hs)))
    return lam(["F", *hs], body)


def lift_fun(m: BuiltTerm, n: int, r: int) -> BuiltTerm:
    """``M^Fun``: ``fn F h_1 .. h_n => (F v_0 .. v_0 I .. I) (m h_1 .. h_n)``."""
    u = arrow_type(n, r)
    if not type_alpha_eq(m.declared_type, u):
        raise TypeMismatch(f"lift_fun expects a term of type U_{{{n},{r}}}")
    return BuiltTerm.from_frag(lift_frag(m.frag(), n, r), Arrow(u, u), style=m.style)


def _uniform(table: FunctionTable, size_guard: int) -> int:
    if not isinstance(table, FunctionTable):
        raise TableError("expected a FunctionTable")
    if not table.is_uniform:
        raise TableError("inductive synthesis needs a uniform radix; use build_hetero")
    r, n = table.output_radix, table.arity
    if r ** n > size_guard:
        raise SizeGuardExceeded(f"{r}^{n} = {r ** n} entries exceed the guard {size_guard}")
    return r


def _step(table: FunctionTable, sub, r: int, seed_value: int = 0) -> Frag:
    n = table.arity - 1
    lifted = [lift_frag(sub(table.fix_first(j)).frag(), n, r) for j in range(r - 1, -1, -1)]
    # the seed is always discarded by the selected lifted term, so any value works
    seed = const_n_frag(n, seed_value, r)
    return lam("h", ap(var("h").inst(arrow_type(n, r)), *lifted, seed))


def build_inductive(table: FunctionTable, size_guard: int = DEFAULT_SIZE_GUARD,
                    seed: int = 0) -> BuiltTerm:
    """Any uniform-radix table; the output contains no pairs.

    ``seed`` is the value of the ``const_{n,seed}`` placed under each selector.
    """
    r = _uniform(table, size_guard)
    if not isinstance(seed, int) or not 0 <= seed < r:
        raise DomainError(f"seed {seed!r} outside 0..{r - 1}")
    if table.arity == 1:
        built = build_unary(table)
        built.style = "inductive"
        return built
    frag = _step(table, lambda t: build_inductive(t, size_guard, seed), r, seed)
    return BuiltTerm.from_frag(frag, arrow_type(table.arity, r), style="inductive")


def build_hybrid(table: FunctionTable, size_guard: int = DEFAULT_SIZE_GUARD) -> BuiltTerm:
    """Inductive split on the first argument over DNF-built subfunctions."""
    r = _uniform(table, size_guard)
    if table.arity == 1:
        built = build_unary(table)
        built.style = "hybrid"
        return built
    frag = _step(table, lambda t: build_dnf(t, size_guard), r)
    return BuiltTerm.from_frag(frag, arrow_type(table.arity, r), style="hybrid")


def hybrid_compose(outer: BuiltTerm, inners: Sequence[tuple[BuiltTerm | None, Sequence[int]]],
                   n_sources: int | None = None) -> BuiltTerm:
    """``fn s_1 .. s_S => outer (inner_1 s..) .. (inner_m s..)``.

    ``inners[p]`` feeds argument ``p+1`` of ``outer``: a term with the source
    indices (0-based) wired to its arguments, or ``(None, [s])`` to pass a
    source straight through.  Sources used more than once are fanned out with
    ``copy_{r,k}``.
    """
    outs, out_r = signature(outer)
    if len(inners) != len(outs):
        raise WiringError(f"outer takes {len(outs)} arguments, {len(inners)} inners given")
    used: dict[int, int] = {}
    radix_of: dict[int, int] = {}
    plan = []
    for p, (inner, wiring) in enumerate(inners):
        wiring = list(wiring)
        if inner is None:
            if len(wiring) != 1:
                raise WiringError(f"pass-through at argument {p + 1} needs exactly one source")
            ins, res = (outs[p],), outs[p]
        else:
            ins, res = signature(inner)
            if len(wiring) != len(ins):
                raise WiringError(f"inner {p + 1} takes {len(ins)} arguments, "
                                  f"wiring lists {len(wiring)}")
        if res != outs[p]:
            raise ArityError(f"inner {p + 1} yields radix {res}, argument needs {outs[p]}")
        for s, r in zip(wiring, ins):
            if not isinstance(s, int) or s < 0:
                raise WiringError(f"bad source index {s!r}")
            if radix_of.setdefault(s, r) != r:
                raise WiringError(f"source {s} wired to radices {radix_of[s]} and {r}")
            used[s] = used.get(s, 0) + 1
        plan.append((inner, wiring))
    count = max(used) + 1 if used else 0
    if n_sources is not None:
        if count > n_sources:
            raise WiringError(f"source index {count - 1} outside 0..{n_sources - 1}")
        count = n_sources
    missing = [s for s in range(count) if s not in used]
    if missing:
        raise WiringError(f"sources {missing} are never used")
    names = Names()
    srcs = names.many("s", count)
    seen = {s: 0 for s in range(count)}
    uses = {s: [f"{srcs[s]}_{k}" for k in range(used[s])] for s in range(count)}

    def take(s: int) -> Frag:
        name = uses[s][seen[s]]
        seen[s] += 1
        return var(name)

    args = []
    for inner, wiring in plan:
        if inner is None:
            args.append(take(wiring[0]))
        else:
            args.append(ap(inner.frag(), *(take(s) for s in wiring)))
    body = ap(outer.frag(), *args)
    for s in range(count - 1, -1, -1):
        body = fan_out(srcs[s], uses[s], radix_of[s], names, body)
    frag = lam(srcs, body)
    return BuiltTerm.from_frag(frag, _fun_type([radix_of[s] for s in range(count)], out_r),
                               style="hybrid")

