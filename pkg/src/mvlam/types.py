"""Types of the second-order linear system and their concrete syntax.

Concrete syntax::

    type ::= "forall" TVAR "." type | prod "->" type | prod
    prod ::= atom "*" prod | atom
    atom ::= TVAR | "(" type ")" | "T" INT

``T r`` (written ``T3`` etc.) is sugar for :func:`base_type`.  Type variable
names keep their leading quote, so ``TVar("'a")`` prints as ``'a``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from ._deep import deep
from .errors import DomainError, ParseError


@dataclass(frozen=True, slots=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True, slots=True)
class Prod:
    left: "TypeExpr"
    right: "TypeExpr"

    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: "TypeExpr"
    cod: "TypeExpr"

    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True, slots=True)
class Forall:
    var: str
    body: "TypeExpr"

    def __str__(self) -> str:
        return print_type(self)


TypeExpr = Union[TVar, Prod, Arrow, Forall]

A = TVar("'a")


def arrows(*types: TypeExpr) -> TypeExpr:
    """Right-nested arrow ``t1 -> t2 -> ... -> tn``."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def prods(types) -> TypeExpr:
    """Right-nested product ``t1 * (t2 * (... * tn))``."""
    types = list(types)
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Prod(t, result)
    return result


def base_body(r: int, x: TypeExpr) -> TypeExpr:
    """``(x->x) -> ... r times ... -> (x->x)``: the body of ``T_r`` at ``x``."""
    endo = Arrow(x, x)
    return arrows(*([endo] * r), endo)


def base_type(r: int) -> TypeExpr:
    if not isinstance(r, int) or r < 1:
        raise DomainError(f"radix must be >= 1, got {r!r}")
    return Forall("'a", base_body(r, A))


def arrow_type(n: int, r: int) -> TypeExpr:
    """``U_{n,r}``: ``T_r -> ... n ... -> T_r -> T_r``."""
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"arity must be >= 0, got {n!r}")
    t = base_type(r)
    return arrows(*([t] * n), t)


def dup_type(n: int, r: int) -> TypeExpr:
    """``T_r -> (T_r * ... n ... * T_r)`` with a right-nested product."""
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"duplication arity must be >= 2, got {n!r}")
    t = base_type(r)
    return Arrow(t, prods([t] * n))


def endo(t: TypeExpr) -> TypeExpr:
    return Arrow(t, t)


def base_radix(t: TypeExpr) -> int | None:
    """``r`` if ``t`` is alpha-equal to ``T_r``, else ``None``."""
    if not isinstance(t, Forall):
        return None
    x = TVar(t.var)
    body, r = t.body, 0
    while isinstance(body, Arrow) and body.dom == Arrow(x, x) and isinstance(body.cod, Arrow):
        body, r = body.cod, r + 1
    if r >= 1 and body == Arrow(x, x):
        return r
    return None


def value_signature(t: TypeExpr) -> tuple[tuple[int, ...], int] | None:
    """Input radices and output radix of ``T_r1 -> ... -> T_rk -> T_r``."""
    radices = []
    while True:
        r = base_radix(t)
        if r is not None:
            return tuple(radices), r
        if not isinstance(t, Arrow):
            return None
        r = base_radix(t.dom)
        if r is None:
            return None
        radices.append(r)
        t = t.cod


# ---------------------------------------------------------------------------
# free variables and substitution

@deep
def ftv(t: TypeExpr) -> set[str]:
    return _ftv(t)


def _ftv(t) -> set[str]:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, (Prod, Arrow)):
        a, b = _parts(t)
        return _ftv(a) | _ftv(b)
    if isinstance(t, Forall):
        return _ftv(t.body) - {t.var}
    return set()  # opaque leaves (checker metavariables)


def _parts(t):
    if isinstance(t, Prod):
        return t.left, t.right
    return t.dom, t.cod


def _rebuild(t, a, b):
    return Prod(a, b) if isinstance(t, Prod) else Arrow(a, b)


def fresh_tvar(base: str, avoid) -> str:
    stem = base.rstrip("0123456789") or base
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


@deep
def subst_type(t: TypeExpr, v: str, b: TypeExpr) -> TypeExpr:
    """Capture-avoiding ``t[b/v]``."""
    return _subst(t, v, b, _ftv(b))


def _subst(t, v, b, fv_b):
    if isinstance(t, TVar):
        return b if t.name == v else t
    if isinstance(t, (Prod, Arrow)):
        x, y = _parts(t)
        return _rebuild(t, _subst(x, v, b, fv_b), _subst(y, v, b, fv_b))
    if isinstance(t, Forall):
        if t.var == v:
            return t
        body_fv = _ftv(t.body)
        if v not in body_fv:
            return t
        var, body = t.var, t.body
        if var in fv_b:
            new = fresh_tvar(var, fv_b | body_fv | {v})
            body = _subst(body, var, TVar(new), {new})
            var = new
        return Forall(var, _subst(body, v, b, fv_b))
    return t


@deep
def type_alpha_eq(a: TypeExpr, b: TypeExpr) -> bool:
    return _teq(a, b, {}, {}, [0])


def _teq(a, b, ea, eb, counter) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, TVar):
        la, lb = ea.get(a.name), eb.get(b.name)
        if la is None and lb is None:
            return a.name == b.name
        return la == lb
    if isinstance(a, (Prod, Arrow)):
        a1, a2 = _parts(a)
        b1, b2 = _parts(b)
        return _teq(a1, b1, ea, eb, counter) and _teq(a2, b2, ea, eb, counter)
    if isinstance(a, Forall):
        counter[0] += 1
        oa, ob = ea.get(a.var), eb.get(b.var)
        ea[a.var] = eb[b.var] = counter[0]
        ok = _teq(a.body, b.body, ea, eb, counter)
        for env, name, old in ((ea, a.var, oa), (eb, b.var, ob)):
            if old is None:
                del env[name]
            else:
                env[name] = old
        return ok
    return a == b


def non_arrow_quantifiers(t: TypeExpr) -> list[TypeExpr]:
    """Quantifiers whose body is not an arrow (outside the usual type grammar)."""
    found, stack = [], [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Forall):
            if not isinstance(node.body, Arrow):
                found.append(node)
            stack.append(node.body)
        elif isinstance(node, (Prod, Arrow)):
            stack.extend(_parts(node))
    return found


# ---------------------------------------------------------------------------
# concrete syntax

_TYPE_TOKEN_RE = re.compile(r"\s+|->|forall\b|T\d+|'[A-Za-z_][A-Za-z0-9_']*|[().*]|.")


def _type_tokens(text: str):
    tokens, pos = [], 0
    while pos < len(text):
        m = _TYPE_TOKEN_RE.match(text, pos)
        tok = m.group()
        if not tok.isspace():
            if len(tok) == 1 and tok not in "().*":
                raise ParseError(f"unexpected character {tok!r} in type", 1, pos + 1)
            tokens.append((tok, pos + 1))
        pos += len(tok)
    tokens.append(("<eof>", len(text) + 1))
    return tokens


class _TypeParser:
    def __init__(self, text: str):
        self.tokens = _type_tokens(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def error(self, message: str) -> ParseError:
        tok, col = self.tokens[self.i]
        return ParseError(f"{message}, found {tok!r}", 1, col)

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise self.error(f"expected {tok!r}")
        self.i += 1

    def type(self) -> TypeExpr:
        if self.peek() == "forall":
            self.i += 1
            var = self.peek()
            if not var.startswith("'"):
                raise self.error("expected type variable")
            self.i += 1
            self.expect(".")
            return Forall(var, self.type())
        left = self.prod()
        if self.peek() == "->":
            self.i += 1
            return Arrow(left, self.type())
        return left

    def prod(self) -> TypeExpr:
        left = self.atom()
        if self.peek() == "*":
            self.i += 1
            return Prod(left, self.prod())
        return left

    def atom(self) -> TypeExpr:
        tok = self.peek()
        if tok == "(":
            self.i += 1
            inner = self.type()
            self.expect(")")
            return inner
        if tok.startswith("'"):
            self.i += 1
            return TVar(tok)
        if re.fullmatch(r"T\d+", tok):
            self.i += 1
            return base_type(int(tok[1:]))
        raise self.error("expected type")


def parse_type(text: str) -> TypeExpr:
    parser = _TypeParser(text)
    t = parser.type()
    if parser.peek() != "<eof>":
        raise parser.error("trailing input in type")
    return t


@deep
def print_type(t: TypeExpr, sugar: bool = True) -> str:
    """Concrete syntax; with ``sugar`` closed base types print as ``T<r>``."""
    return _ptype(t, 0, sugar)


# levels: 0 = type, 1 = prod operand (right), 2 = atom
def _ptype(t, level: int, sugar: bool) -> str:
    if sugar and isinstance(t, Forall):
        r = base_radix(t)
        if r is not None:
            return f"T{r}"
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, Forall):
        s = f"forall {t.var}. {_ptype(t.body, 0, sugar)}"
        return f"({s})" if level else s
    if isinstance(t, Arrow):
        s = f"{_ptype(t.dom, 1, sugar)} -> {_ptype(t.cod, 0, sugar)}"
        return f"({s})" if level else s
    if isinstance(t, Prod):
        s = f"{_ptype(t.left, 2, sugar)} * {_ptype(t.right, 1, sugar)}"
        return f"({s})" if level == 2 else s
    return str(t)
