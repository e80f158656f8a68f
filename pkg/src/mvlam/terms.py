"""Untyped terms with pairs: syntax tree, concrete syntax, binding utilities.

The grammar is the one of the linear calculus::

    term    ::= "fn" IDENT "=>" term
              | "let" "val" "(" IDENT "," IDENT ")" "=" term "in" term "end"
              | appterm
    appterm ::= appterm atom | atom
    atom    ::= IDENT | "(" term ")" | "(" term "," term ")"

Terms are immutable; every operation here is a pure function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from ._deep import deep
from .errors import ParseError

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
KEYWORDS = frozenset({"fn", "let", "val", "in", "end"})


def _check_ident(name: str) -> None:
    if not isinstance(name, str) or not IDENT_RE.fullmatch(name) or name in KEYWORDS:
        raise ValueError(f"invalid identifier {name!r}")


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        _check_ident(self.name)

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Abs:
    param: str
    body: "Term"

    def __post_init__(self) -> None:
        _check_ident(self.param)

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Pair:
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, slots=True)
class LetPair:
    x: str
    y: str
    rhs: "Term"
    body: "Term"

    def __post_init__(self) -> None:
        _check_ident(self.x)
        _check_ident(self.y)
        if self.x == self.y:
            raise ValueError(f"let-pair binds {self.x!r} twice")

    def __str__(self) -> str:
        return print_term(self)


Term = Union[Var, App, Abs, Pair, LetPair]
NodePath = tuple[int, ...]


# ---------------------------------------------------------------------------
# construction helpers

def app(fun: Term, *args: Term) -> Term:
    """Left-nested application ``fun a1 ... an``."""
    for a in args:
        fun = App(fun, a)
    return fun


def lams(params, body: Term) -> Term:
    for p in reversed(list(params)):
        body = Abs(p, body)
    return body


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Var):
        return ()
    if isinstance(t, Abs):
        return (t.body,)
    if isinstance(t, App):
        return (t.fun, t.arg)
    if isinstance(t, Pair):
        return (t.left, t.right)
    return (t.rhs, t.body)


def node_count(t: Term) -> int:
    count = 0
    stack = [t]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(children(node))
    return count


def count_nodes(t: Term, kind: type) -> int:
    """Number of nodes of the given constructor class in ``t``."""
    count = 0
    stack = [t]
    while stack:
        node = stack.pop()
        count += isinstance(node, kind)
        stack.extend(children(node))
    return count


def iter_nodes(t: Term) -> Iterator[tuple[NodePath, Term]]:
    """Preorder traversal yielding ``(path, node)``; fun before arg, rhs before body."""
    stack: list[tuple[NodePath, Term]] = [((), t)]
    while stack:
        path, node = stack.pop()
        yield path, node
        kids = children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((path + (i,), kids[i]))


def subterm(t: Term, path: NodePath) -> Term:
    for i in path:
        kids = children(t)
        if not 0 <= i < len(kids):
            raise IndexError(f"path {list(path)} does not resolve")
        t = kids[i]
    return t


def _with_child(t: Term, i: int, new: Term) -> Term:
    if isinstance(t, Abs) and i == 0:
        return Abs(t.param, new)
    if isinstance(t, App):
        return App(new, t.arg) if i == 0 else App(t.fun, new)
    if isinstance(t, Pair):
        return Pair(new, t.right) if i == 0 else Pair(t.left, new)
    if isinstance(t, LetPair):
        if i == 0:
            return LetPair(t.x, t.y, new, t.body)
        return LetPair(t.x, t.y, t.rhs, new)
    raise IndexError("no such child")


def replace_at(t: Term, path: NodePath, new: Term) -> Term:
    """Copy of ``t`` with the node at ``path`` replaced by ``new``."""
    spine = [t]
    for i in path:
        kids = children(spine[-1])
        if not 0 <= i < len(kids):
            raise IndexError(f"path {list(path)} does not resolve")
        spine.append(kids[i])
    result = new
    for node, i in zip(reversed(spine[:-1]), reversed(path)):
        result = _with_child(node, i, result)
    return result


@deep
def free_vars(t: Term) -> set[str]:
    return _free(t)


def _free(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Abs):
        return _free(t.body) - {t.param}
    if isinstance(t, (App, Pair)):
        a, b = children(t)
        return _free(a) | _free(b)
    return _free(t.rhs) | (_free(t.body) - {t.x, t.y})


def all_names(t: Term) -> set[str]:
    """Every identifier occurring in ``t``, bound or free."""
    names: set[str] = set()
    for _, node in iter_nodes(t):
        if isinstance(node, Var):
            names.add(node.name)
        elif isinstance(node, Abs):
            names.add(node.param)
        elif isinstance(node, LetPair):
            names.update((node.x, node.y))
    return names


_SUFFIX_RE = re.compile(r"_\d+$")


def fresh_name(base: str, avoid) -> str:
    """``base`` itself if unused, else ``base_k`` for the least free ``k``."""
    stem = _SUFFIX_RE.sub("", base) or base
    if stem not in avoid:
        return stem
    k = 1
    while f"{stem}_{k}" in avoid:
        k += 1
    return f"{stem}_{k}"


# ---------------------------------------------------------------------------
# concrete syntax

_TOKEN_RE = re.compile(r"\s+|\(\*|=>|[=(),]|[A-Za-z_][A-Za-z0-9_']*|.", re.S)


def _tokenize(text: str) -> list[tuple[str, int, int]]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        tok = m.group()
        col = pos - line_start + 1
        if tok == "(*":
            depth, j = 1, pos + 2
            while depth and j < n:
                if text.startswith("(*", j):
                    depth, j = depth + 1, j + 2
                elif text.startswith("*)", j):
                    depth, j = depth - 1, j + 2
                else:
                    j += 1
            if depth:
                raise ParseError("unterminated comment", line, col)
            tok = text[pos:j]
        elif tok.isspace():
            pass
        elif not (tok in ("=>", "=", "(", ")", ",") or IDENT_RE.fullmatch(tok)):
            raise ParseError(f"unexpected character {tok!r}", line, col)
        else:
            tokens.append((tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok.rindex("\n") + 1
        pos += len(tok)
    tokens.append(("<eof>", line, pos - line_start + 1))
    return tokens


class _TermParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def error(self, message: str) -> ParseError:
        tok, line, col = self.tokens[self.i]
        return ParseError(f"{message}, found {tok!r}", line, col)

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise self.error(f"expected {tok!r}")
        self.i += 1

    def ident(self) -> str:
        tok = self.peek()
        if tok in KEYWORDS or not IDENT_RE.fullmatch(tok):
            raise self.error("expected identifier")
        self.i += 1
        return tok

    def term(self) -> Term:
        tok = self.peek()
        if tok == "fn":
            self.i += 1
            x = self.ident()
            self.expect("=>")
            return Abs(x, self.term())
        if tok == "let":
            self.i += 1
            self.expect("val")
            self.expect("(")
            x = self.ident()
            self.expect(",")
            y = self.ident()
            if x == y:
                raise self.error(f"let-pair binds {x!r} twice")
            self.expect(")")
            self.expect("=")
            rhs = self.term()
            self.expect("in")
            body = self.term()
            self.expect("end")
            return LetPair(x, y, rhs, body)
        t = self.atom()
        while self._starts_atom():
            t = App(t, self.atom())
        return t

    def _starts_atom(self) -> bool:
        tok = self.peek()
        return tok == "(" or (tok not in KEYWORDS and IDENT_RE.fullmatch(tok) is not None)

    def atom(self) -> Term:
        if self.peek() == "(":
            self.i += 1
            inner = self.term()
            if self.peek() == ",":
                self.i += 1
                right = self.term()
                self.expect(")")
                return Pair(inner, right)
            self.expect(")")
            return inner
        return Var(self.ident())


@deep
def parse_term(text: str) -> Term:
    """Parse concrete syntax; application is left-associative and ``fn`` bodies
    extend as far right as possible.  Comments ``(* ... *)`` are skipped."""
    parser = _TermParser(text)
    t = parser.term()
    if parser.peek() != "<eof>":
        raise parser.error("trailing input")
    return t


@deep
def print_term(t: Term) -> str:
    out: list[str] = []
    _emit(t, out, 0)
    return "".join(out)


# contexts: 0 = top/fn body (anything goes), 1 = function position, 2 = argument
def _emit(t: Term, out: list[str], ctx: int) -> None:
    if isinstance(t, Var):
        out.append(t.name)
    elif isinstance(t, Abs):
        if ctx:
            out.append("(")
        out.append(f"fn {t.param}=> ")
        _emit(t.body, out, 0)
        if ctx:
            out.append(")")
    elif isinstance(t, App):
        if ctx == 2:
            out.append("(")
        _emit(t.fun, out, 1)
        out.append(" ")
        _emit(t.arg, out, 2)
        if ctx == 2:
            out.append(")")
    elif isinstance(t, Pair):
        out.append("(")
        _emit(t.left, out, 0)
        out.append(", ")
        _emit(t.right, out, 0)
        out.append(")")
    else:
        if ctx:
            out.append("(")
        out.append(f"let val ({t.x},{t.y})=")
        _emit(t.rhs, out, 0)
        out.append(" in ")
        _emit(t.body, out, 0)
        out.append(" end")
        if ctx:
            out.append(")")


# ---------------------------------------------------------------------------
# binding

@deep
def alpha_eq(a: Term, b: Term) -> bool:
    """Equality up to consistent renaming of bound variables."""
    return _alpha(a, b, {}, {}, [0])


def _bind(env: dict, name: str, level: int):
    old = env.get(name)
    env[name] = level
    return old


def _unbind(env: dict, name: str, old) -> None:
    if old is None:
        del env[name]
    else:
        env[name] = old


def _alpha(a: Term, b: Term, ea: dict, eb: dict, counter: list[int]) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        la, lb = ea.get(a.name), eb.get(b.name)
        if la is None and lb is None:
            return a.name == b.name
        return la == lb
    if isinstance(a, Abs):
        counter[0] += 1
        lvl = counter[0]
        oa, ob = _bind(ea, a.param, lvl), _bind(eb, b.param, lvl)
        ok = _alpha(a.body, b.body, ea, eb, counter)
        _unbind(ea, a.param, oa)
        _unbind(eb, b.param, ob)
        return ok
    if isinstance(a, (App, Pair)):
        a1, a2 = children(a)
        b1, b2 = children(b)
        return _alpha(a1, b1, ea, eb, counter) and _alpha(a2, b2, ea, eb, counter)
    if not _alpha(a.rhs, b.rhs, ea, eb, counter):
        return False
    counter[0] += 2
    lx, ly = counter[0] - 1, counter[0]
    oax, obx = _bind(ea, a.x, lx), _bind(eb, b.x, lx)
    oay, oby = _bind(ea, a.y, ly), _bind(eb, b.y, ly)
    ok = _alpha(a.body, b.body, ea, eb, counter)
    _unbind(ea, a.y, oay)
    _unbind(eb, b.y, oby)
    _unbind(ea, a.x, oax)
    _unbind(eb, b.x, obx)
    return ok


@dataclass(frozen=True)
class Linearity:
    """Verdict of :func:`is_linear`; truthy iff the term is linear."""

    ok: bool
    variable: str | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@deep
def is_linear(t: Term) -> Linearity:
    """Every bound variable used exactly once in its scope, every free variable
    exactly once in the whole term."""
    free_counts: dict[str, int] = {}
    bound: dict[str, list[int]] = {}
    problem: list[tuple[str, str]] = []

    def use(name: str) -> None:
        stack = bound.get(name)
        if stack:
            stack[-1] += 1
        else:
            free_counts[name] = free_counts.get(name, 0) + 1

    def scope(names, body) -> None:
        for n in names:
            bound.setdefault(n, []).append(0)
        walk(body)
        for n in names:
            uses = bound[n].pop()
            if uses != 1 and not problem:
                problem.append((n, "unused" if uses == 0 else f"used {uses} times"))

    def walk(node: Term) -> None:
        if isinstance(node, Var):
            use(node.name)
        elif isinstance(node, Abs):
            scope((node.param,), node.body)
        elif isinstance(node, (App, Pair)):
            a, b = children(node)
            walk(a)
            walk(b)
        else:
            walk(node.rhs)
            scope((node.x, node.y), node.body)

    walk(t)
    if problem:
        name, why = problem[0]
        return Linearity(False, name, f"bound variable {name} {why}")
    for name, uses in free_counts.items():
        if uses != 1:
            return Linearity(False, name, f"free variable {name} used {uses} times")
    return Linearity(True)


@deep
def substitute(t: Term, v: str, s: Term) -> Term:
    """Capture-avoiding ``t[s/v]``."""
    return _subst(t, v, s, _free(s))


def _rename(t: Term, old: str, new: str) -> Term:
    return _subst(t, old, Var(new), {new})


def _subst(t: Term, v: str, s: Term, fv_s: set[str]) -> Term:
    if isinstance(t, Var):
        return s if t.name == v else t
    if isinstance(t, App):
        return App(_subst(t.fun, v, s, fv_s), _subst(t.arg, v, s, fv_s))
    if isinstance(t, Pair):
        return Pair(_subst(t.left, v, s, fv_s), _subst(t.right, v, s, fv_s))
    if isinstance(t, Abs):
        if t.param == v:
            return t
        body_fv = _free(t.body)
        if v not in body_fv:
            return t
        param, body = t.param, t.body
        if param in fv_s:
            new = fresh_name(param, fv_s | body_fv | {v})
            body, param = _rename(body, param, new), new
        return Abs(param, _subst(body, v, s, fv_s))
    rhs = _subst(t.rhs, v, s, fv_s)
    if v in (t.x, t.y):
        return LetPair(t.x, t.y, rhs, t.body)
    body_fv = _free(t.body)
    if v not in body_fv:
        return LetPair(t.x, t.y, rhs, t.body)
    x, y, body = t.x, t.y, t.body
    avoid = fv_s | body_fv | {v, x, y}
    if x in fv_s:
        nx = fresh_name(x, avoid)
        avoid.add(nx)
        body, x = _rename(body, x, nx), nx
    if y in fv_s:
        ny = fresh_name(y, avoid)
        body, y = _rename(body, y, ny), ny
    return LetPair(x, y, rhs, _subst(body, v, s, fv_s))


@deep
def uniquify(t: Term, reserved=()) -> Term:
    """Alpha-rename binders so every binder name is distinct from every other
    binder, from the free variables, and from ``reserved``.

    The first binder with a given name keeps it, so generated combinators stay
    readable.  Node paths are unchanged.
    """
    used = set(_free(t)) | set(reserved)
    env: dict[str, list[str]] = {}

    def claim(name: str) -> str:
        new = fresh_name(name, used) if name in used else name
        used.add(new)
        env.setdefault(name, []).append(new)
        return new

    def walk(node: Term) -> Term:
        if isinstance(node, Var):
            stack = env.get(node.name)
            if stack:
                new = stack[-1]
                return node if new == node.name else Var(new)
            return node
        if isinstance(node, Abs):
            p = claim(node.param)
            body = walk(node.body)
            env[node.param].pop()
            return Abs(p, body)
        if isinstance(node, App):
            return App(walk(node.fun), walk(node.arg))
        if isinstance(node, Pair):
            return Pair(walk(node.left), walk(node.right))
        rhs = walk(node.rhs)
        x, y = claim(node.x), claim(node.y)
        body = walk(node.body)
        env[node.x].pop()
        env[node.y].pop()
        return LetPair(x, y, rhs, body)

    return walk(t)
