"""Certificate-directed checker for the second-order linear type system.

Terms carry no annotations.  A :class:`Certificate` lists, per node, the
``Inst``/``Gen`` steps to apply once the node's type is known; everything else
is syntax directed.  The algorithm is bidirectional with unification
metavariables:

* contexts are consumable: each binding must be used exactly once, which
  realizes the identity rule together with exchange;
* trailing ``Gen`` directives peel the expected quantifier, binding the
  directive's variable to a fresh rigid name for the node's subterm;
* other directives switch the node to synthesis through a metavariable;
  ``Inst`` on a still-unknown type is queued until the type is solved;
* ``Gen`` side conditions (the variable is not free in the types of the
  bindings the subterm consumes) are checked after all unification is done.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from ._deep import deep
from .errors import BadDirective, LinearityError, ParseError, TypeMismatch, TypingError
from .terms import Abs, App, Pair, Term, Var, subterm
from .types import (
    Arrow,
    Forall,
    Prod,
    TVar,
    TypeExpr,
    non_arrow_quantifiers,
    parse_type,
    print_type,
    subst_type,
    type_alpha_eq,
)

# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class Inst:
    type: TypeExpr


@dataclass(frozen=True)
class Gen:
    var: str


Action = Union[Inst, Gen]


@dataclass(frozen=True)
class Directive:
    path: tuple[int, ...]
    action: Action


class Certificate:
    """Ordered list of directives; order matters within a node."""

    __slots__ = ("directives",)

    def __init__(self, directives: Iterable[Directive] = ()):
        self.directives: tuple[Directive, ...] = tuple(directives)

    def __iter__(self):
        return iter(self.directives)

    def __len__(self) -> int:
        return len(self.directives)

    def __eq__(self, other) -> bool:
        return isinstance(other, Certificate) and self.directives == other.directives

    def __repr__(self) -> str:
        return f"Certificate({list(self.directives)!r})"

    @staticmethod
    def of(*entries) -> "Certificate":
        """``Certificate.of((path, action), ...)`` shorthand."""
        return Certificate(Directive(tuple(p), a) for p, a in entries)

    def prefixed(self, prefix) -> "Certificate":
        """Directives re-rooted under ``prefix`` (for embedding a subterm)."""
        prefix = tuple(prefix)
        return Certificate(Directive(prefix + d.path, d.action) for d in self.directives)

    def __add__(self, other: "Certificate") -> "Certificate":
        return Certificate(self.directives + other.directives)

    def to_json(self) -> list[dict]:
        out = []
        for d in self.directives:
            if isinstance(d.action, Inst):
                out.append({"path": list(d.path), "action": "inst",
                            "type": print_type(d.action.type)})
            else:
                out.append({"path": list(d.path), "action": "gen", "var": d.action.var})
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @staticmethod
    def from_json(data) -> "Certificate":
        if not isinstance(data, list):
            raise ParseError("certificate must be a JSON array", 1, 1)
        directives = []
        for k, item in enumerate(data):
            try:
                path = tuple(int(i) for i in item["path"])
                action = item["action"]
                if action == "inst":
                    act: Action = Inst(parse_type(item["type"]))
                elif action == "gen":
                    var = item["var"]
                    if not re.fullmatch(r"'[A-Za-z_][A-Za-z0-9_']*", var):
                        raise ValueError(f"bad type variable {var!r}")
                    act = Gen(var)
                else:
                    raise ValueError(f"unknown action {action!r}")
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad directive #{k}: {exc}", 1, 1) from None
            directives.append(Directive(path, act))
        return Certificate(directives)

    @staticmethod
    def loads(text: str) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"certificate is not JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return Certificate.from_json(data)


def is_monomorphic(cert: Certificate) -> bool:
    """Every instantiation uses a bare type variable."""
    return all(isinstance(d.action.type, TVar) for d in cert if isinstance(d.action, Inst))


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class Judgement:
    env: tuple[tuple[str, TypeExpr], ...]
    path: tuple[int, ...]
    type: TypeExpr

    def __str__(self) -> str:
        ctx = ", ".join(f"{n}: {print_type(t)}" for n, t in self.env)
        return f"{ctx} |- {list(self.path)} : {print_type(self.type)}"


@dataclass
class CheckReport:
    ok: bool
    error: TypingError | None = None
    warnings: list[str] = field(default_factory=list)
    _args: tuple | None = field(default=None, repr=False)
    _judgements: list[Judgement] | None = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.ok

    @property
    def judgements(self) -> list[Judgement]:
        """Per-node judgements (preorder); empty on failure."""
        if not self.ok:
            return []
        if self._judgements is None:
            env, t, cert, expected = self._args
            self._judgements = _Checker(env, cert, record=True).run(t, expected)
        return self._judgements


def check(env, t: Term, cert: Certificate, expected: TypeExpr) -> CheckReport:
    """Check ``env |- t : expected`` using the directives in ``cert``.

    ``env`` is a sequence of ``(name, type)`` pairs or a mapping.
    """
    env = list(env.items()) if isinstance(env, dict) else list(env)
    names = [n for n, _ in env]
    if len(set(names)) != len(names):
        raise ValueError("environment names must be distinct")
    warnings = [f"quantifier with non-arrow body: {print_type(q)}"
                for _, ty in env for q in non_arrow_quantifiers(ty)]
    warnings += [f"quantifier with non-arrow body: {print_type(q)}"
                 for q in non_arrow_quantifiers(expected)]
    for d in cert:
        if isinstance(d.action, Inst):
            warnings += [f"quantifier with non-arrow body: {print_type(q)}"
                         for q in non_arrow_quantifiers(d.action.type)]
    try:
        _Checker(env, cert).run(t, expected)
    except TypingError as exc:
        return CheckReport(False, exc, warnings)
    return CheckReport(True, None, warnings, (env, t, cert, expected))


# ---------------------------------------------------------------------------
# implementation

@dataclass(frozen=True, eq=False)
class Meta:
    id: int

    def __str__(self) -> str:
        return f"?{self.id}"


class _Binding:
    __slots__ = ("name", "type", "id", "used")

    def __init__(self, name: str, type_, id_: int):
        self.name, self.type, self.id, self.used = name, type_, id_, False


_RIGID_RE = re.compile(r"#\d+$")


def _surface(name: str) -> str:
    return _RIGID_RE.sub("", name)


class _Checker:
    def __init__(self, env, cert: Certificate, record: bool = False):
        self.subst: dict[int, TypeExpr] = {}
        self.metas = itertools.count()
        self.rigids = itertools.count(1)
        self.bind_ids = itertools.count()
        self.scope: dict[str, list[str]] = {}
        self.ctx: dict[str, list[_Binding]] = {}
        self.top = []
        for name, ty in env:
            b = _Binding(name, ty, next(self.bind_ids))
            self.ctx[name] = [b]
            self.top.append(b)
        self.log: list[_Binding] = []
        self.pending: list[tuple] = []
        self.flushing = False
        self.side: list[tuple] = []
        self.record = record
        self.records: list[tuple] = []
        self.path: list[int] = []
        self.trie: dict = {}
        self.cert = cert

    # -- entry ---------------------------------------------------------------

    @deep
    def run(self, t: Term, expected: TypeExpr):
        for d in self.cert:
            try:
                subterm(t, d.path)
            except IndexError:
                raise BadDirective("directive path does not resolve", d.path) from None
            node = self.trie
            for i in d.path:
                node = node.setdefault(i, {})
            node.setdefault("_d", []).append(d.action)
        _linearity_precheck(t, set(self.ctx))
        self.chk(t, expected, self.trie)
        for b in self.top:
            if not b.used:
                raise LinearityError(f"binding {b.name} is never used", ())
        if self.pending:
            _, _, _, path = self.pending[0]
            raise BadDirective("Inst applied to a type that never became quantified", path)
        self.check_side_conditions()
        if self.record:
            return self.judgements()
        return None

    def here(self) -> tuple[int, ...]:
        return tuple(self.path)

    # -- types ---------------------------------------------------------------

    def fresh(self) -> Meta:
        return Meta(next(self.metas))

    def resolve(self, t):
        while isinstance(t, Meta) and t.id in self.subst:
            t = self.subst[t.id]
        return t

    def zonk(self, t):
        t = self.resolve(t)
        if isinstance(t, Arrow):
            return Arrow(self.zonk(t.dom), self.zonk(t.cod))
        if isinstance(t, Prod):
            return Prod(self.zonk(t.left), self.zonk(t.right))
        if isinstance(t, Forall):
            return Forall(t.var, self.zonk(t.body))
        return t

    def has_meta(self, t) -> bool:
        t = self.resolve(t)
        if isinstance(t, Meta):
            return True
        if isinstance(t, Arrow):
            return self.has_meta(t.dom) or self.has_meta(t.cod)
        if isinstance(t, Prod):
            return self.has_meta(t.left) or self.has_meta(t.right)
        if isinstance(t, Forall):
            return self.has_meta(t.body)
        return False

    def occurs(self, m: Meta, t) -> bool:
        t = self.resolve(t)
        if isinstance(t, Meta):
            return t.id == m.id
        if isinstance(t, Arrow):
            return self.occurs(m, t.dom) or self.occurs(m, t.cod)
        if isinstance(t, Prod):
            return self.occurs(m, t.left) or self.occurs(m, t.right)
        if isinstance(t, Forall):
            return self.occurs(m, t.body)
        return False

    def show(self, t) -> str:
        return print_type(self.zonk(t))

    def unify(self, actual, expected) -> None:
        self._unify(actual, expected, actual, expected)
        self.flush()

    def _mismatch(self, top_a, top_e):
        return TypeMismatch(f"expected {self.show(top_e)}, found {self.show(top_a)}", self.here())

    def _unify(self, a, b, top_a, top_e) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a is b:
            return
        if isinstance(a, Meta) or isinstance(b, Meta):
            m, other = (a, b) if isinstance(a, Meta) else (b, a)
            if isinstance(other, Meta) and other.id == m.id:
                return
            if self.occurs(m, other):
                raise TypeMismatch(f"infinite type: {m} occurs in {self.show(other)}", self.here())
            self.subst[m.id] = other
            return
        if type(a) is not type(b):
            raise self._mismatch(top_a, top_e)
        if isinstance(a, TVar):
            if a.name != b.name:
                raise self._mismatch(top_a, top_e)
        elif isinstance(a, Arrow):
            self._unify(a.dom, b.dom, top_a, top_e)
            self._unify(a.cod, b.cod, top_a, top_e)
        elif isinstance(a, Prod):
            self._unify(a.left, b.left, top_a, top_e)
            self._unify(a.right, b.right, top_a, top_e)
        else:
            if not self.has_meta(a) and not self.has_meta(b):
                if not type_alpha_eq(self.zonk(a), self.zonk(b)):
                    raise self._mismatch(top_a, top_e)
                return
            # a quantifier introduced by Gen already binds a unique rigid name,
            # and metavariables in its body may mention it; reuse that name
            if "#" in a.var:
                sk = TVar(a.var)
            elif "#" in b.var:
                sk = TVar(b.var)
            else:
                sk = TVar(f"{_surface(a.var)}#{next(self.rigids)}")
            self._unify(subst_type(self.zonk(a.body), a.var, sk),
                        subst_type(self.zonk(b.body), b.var, sk), top_a, top_e)
            for side in (a, b):
                if sk.name in _tvars(self.zonk(side)):
                    raise TypeMismatch(f"quantified variable escapes its scope in {self.show(side)}",
                                       self.here())

    def instantiate(self, t, arg: TypeExpr):
        t = self.resolve(t)
        if isinstance(t, Forall):
            return subst_type(self.zonk(t.body), t.var, self.zonk(arg))
        if isinstance(t, Meta):
            out = self.fresh()
            self.pending.append((t, arg, out, self.here()))
            return out
        raise BadDirective(f"Inst applied to non-quantified type {self.show(t)}", self.here())

    def flush(self) -> None:
        if self.flushing:
            return
        self.flushing = True
        try:
            progress = True
            while progress and self.pending:
                progress = False
                for entry in list(self.pending):
                    meta, arg, out, path = entry
                    t = self.resolve(meta)
                    if isinstance(t, Meta):
                        continue
                    self.pending.remove(entry)
                    progress = True
                    if not isinstance(t, Forall):
                        raise BadDirective(f"Inst applied to non-quantified type {self.show(t)}", path)
                    saved, self.path = self.path, list(path)
                    try:
                        self._unify(subst_type(self.zonk(t.body), t.var, self.zonk(arg)), out, out, out)
                    finally:
                        self.path = saved
        finally:
            self.flushing = False

    def translate(self, t: TypeExpr) -> TypeExpr:
        """Map type variables of a directive onto the rigid names in scope."""
        for name in _tvars(t):
            stack = self.scope.get(name)
            if stack:
                t = subst_type(t, name, TVar(stack[-1]))
        return t

    # -- terms ---------------------------------------------------------------

    def chk(self, t: Term, expected, trie) -> None:
        actions = trie.get("_d") if trie else None
        start = (len(self.log), next(self.bind_ids)) if (actions or self.record) else None
        if not actions:
            self.chk_raw(t, expected, trie)
            if self.record:
                self.records.append((self.here(), start, len(self.log), expected))
            return

        gens = [a for a in actions if isinstance(a, Gen)]
        rigid = {}
        for g in gens:
            name = f"{g.var}#{next(self.rigids)}"
            rigid[id(g)] = name
            self.scope.setdefault(g.var, []).append(name)
        mine: list[int] = []
        try:
            actions = list(actions)
            target = expected
            while actions and isinstance(actions[-1], Gen):
                e = self.resolve(target)
                if isinstance(e, Meta):
                    break
                g = actions.pop()
                if not isinstance(e, Forall):
                    raise BadDirective(f"Gen {g.var} yields a quantified type where "
                                       f"{self.show(e)} is expected", self.here())
                name = rigid[id(g)]
                mine.append(len(self.side))
                self.side.append((name, g.var, None, e, self.here()))
                target = subst_type(e.body, e.var, TVar(name))
            if actions:
                m = self.fresh()
                self.chk_raw(t, m, trie)
                ty = m
                for a in actions:
                    if isinstance(a, Inst):
                        ty = self.instantiate(ty, self.translate(a.type))
                    else:
                        name = rigid[id(a)]
                        mine.append(len(self.side))
                        self.side.append((name, a.var, None, None, self.here()))
                        ty = Forall(name, ty)
                self.unify(ty, target)
            else:
                self.chk_raw(t, target, trie)
        except TypeMismatch as exc:
            # a clash under a Gen whose variable is free in a consumed outer binding
            # is the side-condition violation surfacing early
            for b in self.log[start[0]:]:
                if b.id < start[1]:
                    free = {_surface(v) for v in _tvars(self.zonk(b.type))}
                    for g in gens:
                        if g.var in free:
                            raise BadDirective(
                                f"Gen {g.var}: type variable is free in the type "
                                f"{print_type(_display(self.zonk(b.type)))} of {b.name}",
                                self.here()) from exc
            raise
        finally:
            for g in gens:
                self.scope[g.var].pop()
        consumed = [b for b in self.log[start[0]:] if b.id < start[1]]
        for k in mine:
            name, var, _, forall, path = self.side[k]
            self.side[k] = (name, var, consumed, forall, path)
        if self.record:
            self.records.append((self.here(), start, len(self.log), expected))

    def child(self, t: Term, expected, trie, i: int) -> None:
        self.path.append(i)
        self.chk(t, expected, trie.get(i) if trie else None)
        self.path.pop()

    def bind(self, name: str, ty) -> _Binding:
        b = _Binding(name, ty, next(self.bind_ids))
        self.ctx.setdefault(name, []).append(b)
        return b

    def unbind(self, b: _Binding) -> None:
        self.ctx[b.name].pop()
        if not b.used:
            raise LinearityError(f"bound variable {b.name} is never used", self.here())

    def chk_raw(self, t: Term, expected, trie) -> None:
        if isinstance(t, Var):
            stack = self.ctx.get(t.name)
            if not stack:
                raise LinearityError(f"variable {t.name} is not in the context", self.here())
            b = stack[-1]
            if b.used:
                raise LinearityError(f"variable {t.name} is used more than once", self.here())
            b.used = True
            self.log.append(b)
            self.unify(b.type, expected)
        elif isinstance(t, Abs):
            e = self.resolve(expected)
            if isinstance(e, Meta):
                dom, cod = self.fresh(), self.fresh()
                self.unify(e, Arrow(dom, cod))
            elif isinstance(e, Arrow):
                dom, cod = e.dom, e.cod
            elif isinstance(e, Forall):
                raise TypeMismatch(f"abstraction checked against quantified type {self.show(e)} "
                                   "without a Gen directive", self.here())
            else:
                raise TypeMismatch(f"abstraction checked against {self.show(e)}", self.here())
            b = self.bind(t.param, dom)
            self.child(t.body, cod, trie, 0)
            self.unbind(b)
        elif isinstance(t, App):
            m = self.fresh()
            self.child(t.fun, Arrow(m, expected), trie, 0)
            self.child(t.arg, m, trie, 1)
        elif isinstance(t, Pair):
            e = self.resolve(expected)
            if isinstance(e, Meta):
                left, right = self.fresh(), self.fresh()
                self.unify(e, Prod(left, right))
            elif isinstance(e, Prod):
                left, right = e.left, e.right
            else:
                raise TypeMismatch(f"pair checked against {self.show(e)}", self.here())
            self.child(t.left, left, trie, 0)
            self.child(t.right, right, trie, 1)
        else:
            m1, m2 = self.fresh(), self.fresh()
            self.child(t.rhs, Prod(m1, m2), trie, 0)
            bx, by = self.bind(t.x, m1), self.bind(t.y, m2)
            self.child(t.body, expected, trie, 1)
            self.ctx[t.y].pop()
            self.ctx[t.x].pop()
            for b in (bx, by):
                if not b.used:
                    raise LinearityError(f"bound variable {b.name} is never used", self.here())

    # -- finishing -----------------------------------------------------------

    def check_side_conditions(self) -> None:
        for name, var, consumed, forall, path in self.side:
            for b in consumed or ():
                ty = self.zonk(b.type)
                if any(_surface(v) == var for v in _tvars(ty)):
                    raise BadDirective(f"Gen {var}: type variable is free in the type "
                                       f"{print_type(_display(ty))} of {b.name}", path)
            if forall is not None and name in _tvars(self.zonk(forall)):
                raise BadDirective(f"Gen {var}: quantified variable escapes its scope", path)

    def judgements(self) -> list[Judgement]:
        out = []
        for path, (lo, start_id), hi, ty in self.records:
            env = tuple((b.name, _display(self.zonk(b.type)))
                        for b in self.log[lo:hi] if b.id < start_id)
            out.append(Judgement(env, path, _display(self.zonk(ty))))
        out.sort(key=lambda j: j.path)
        return out


def _linearity_precheck(t: Term, env_names: set[str]) -> None:
    """Report usage errors before any type error so they get their own kind."""
    scopes: dict[str, list[list]] = {}
    free = {name: [0, None] for name in env_names}
    # paths are linked (parent, index) cells, materialized only on error
    stack: list = [(t, None)]
    while stack:
        item = stack.pop()
        tag = item[0]
        if tag == "enter":
            for name in item[1]:
                scopes.setdefault(name, []).append([0, item[2]])
            continue
        if tag == "exit":
            for name in item[1]:
                rec = scopes[name].pop()
                if rec[0] == 0:
                    raise LinearityError(f"bound variable {name} is never used", _unlink(rec[1]))
            continue
        node, path = item
        if isinstance(node, Var):
            recs = scopes.get(node.name)
            rec = recs[-1] if recs else free.get(node.name)
            if rec is None:
                raise LinearityError(f"variable {node.name} is not in the context", _unlink(path))
            rec[0] += 1
            if rec[0] > 1:
                raise LinearityError(f"variable {node.name} is used more than once", _unlink(path))
        elif isinstance(node, Abs):
            stack.append(("exit", (node.param,)))
            stack.append((node.body, (path, 0)))
            stack.append(("enter", (node.param,), path))
        elif isinstance(node, (App, Pair)):
            a, b = (node.fun, node.arg) if isinstance(node, App) else (node.left, node.right)
            stack.append((b, (path, 1)))
            stack.append((a, (path, 0)))
        else:
            stack.append(("exit", (node.x, node.y)))
            stack.append((node.body, (path, 1)))
            stack.append(("enter", (node.x, node.y), path))
            stack.append((node.rhs, (path, 0)))
    for name, (uses, _) in free.items():
        if uses == 0:
            raise LinearityError(f"binding {name} is never used", ())


def _unlink(cell) -> tuple[int, ...]:
    out = []
    while cell is not None:
        cell, i = cell
        out.append(i)
    return tuple(reversed(out))


def _tvars(t) -> set[str]:
    """All type-variable names occurring free in ``t`` (metas excluded)."""
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, Arrow):
        return _tvars(t.dom) | _tvars(t.cod)
    if isinstance(t, Prod):
        return _tvars(t.left) | _tvars(t.right)
    if isinstance(t, Forall):
        return _tvars(t.body) - {t.var}
    return set()


def _display(t):
    """Strip the internal rigid suffixes for reporting."""
    for name in _tvars(t):
        if _surface(name) != name:
            t = subst_type(t, name, TVar(_surface(name)))
    if isinstance(t, Forall):
        return Forall(_surface(t.var), _display(subst_type(t.body, t.var, TVar(_surface(t.var)))))
    if isinstance(t, Arrow):
        return Arrow(_display(t.dom), _display(t.cod))
    if isinstance(t, Prod):
        return Prod(_display(t.left), _display(t.right))
    return t
