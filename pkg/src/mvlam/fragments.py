"""Term fragments that carry their certificate directives along.

Builders assemble combinators bottom-up; every fragment keeps the directives
for its own subterm in a small tree keyed by child index, so attaching a
fragment under a new node costs O(1) and paths are only materialized once,
when the finished term is turned into a :class:`BuiltTerm`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ._deep import deep
from .checker import Certificate, Directive, Gen, Inst
from .terms import Abs, App, LetPair, Pair, Term, Var, node_count
from .types import A, TypeExpr, print_type

# a directive tree is None or (root_actions, ((child_index, subtree), ...))


@dataclass(frozen=True)
class Frag:
    term: Term
    tree: tuple | None = None
    consts: int = 0

    def mark(self, *actions) -> "Frag":
        """Append directives at this fragment's root."""
        root, kids = self.tree if self.tree else ((), ())
        return Frag(self.term, (root + tuple(actions), kids), self.consts)

    def inst(self, ty: TypeExpr) -> "Frag":
        return self.mark(Inst(ty))

    def gen(self, var: str = "'a") -> "Frag":
        return self.mark(Gen(var))

    def certificate(self) -> Certificate:
        out: list[Directive] = []
        stack = [((), self.tree)]
        while stack:
            path, tree = stack.pop()
            if tree is None:
                continue
            root, kids = tree
            out.extend(Directive(path, a) for a in root)
            for i, sub in reversed(kids):
                stack.append((path + (i,), sub))
        return Certificate(out)


def _node(kids) -> tuple | None:
    kids = tuple((i, f.tree) for i, f in kids if f.tree is not None)
    return ((), kids) if kids else None


def var(name: str) -> Frag:
    return Frag(Var(name))


def lam(params: str | Sequence[str], body: Frag) -> Frag:
    if isinstance(params, str):
        params = [params]
    term, tree = body.term, body.tree
    for p in reversed(list(params)):
        term = Abs(p, term)
        tree = ((), ((0, tree),)) if tree is not None else None
    return Frag(term, tree, body.consts)


def ap(fun: Frag, *args: Frag) -> Frag:
    for a in args:
        fun = Frag(App(fun.term, a.term), _node([(0, fun), (1, a)]), fun.consts + a.consts)
    return fun


def pair(left: Frag, right: Frag) -> Frag:
    return Frag(Pair(left.term, right.term), _node([(0, left), (1, right)]),
                left.consts + right.consts)


def let(x: str, y: str, rhs: Frag, body: Frag) -> Frag:
    return Frag(LetPair(x, y, rhs.term, body.term), _node([(0, rhs), (1, body)]),
                rhs.consts + body.consts)


def tuple_frag(items: Sequence[Frag]) -> Frag:
    """Right-nested tuple."""
    out = items[-1]
    for f in reversed(items[:-1]):
        out = pair(f, out)
    return out


def counted(f: Frag, n: int = 1) -> Frag:
    """Record ``n`` auxiliary const-like terms in ``f``."""
    return Frag(f.term, f.tree, f.consts + n)


class Names:
    """Generator of binder names ``stem1``, ``stem2``, ... for one build."""

    def __init__(self):
        self.counts: dict[str, int] = {}

    def __call__(self, stem: str) -> str:
        k = self.counts.get(stem, 0) + 1
        self.counts[stem] = k
        return f"{stem}{k}"

    def many(self, stem: str, n: int) -> list[str]:
        return [self(stem) for _ in range(n)]


def _convert(node: dict):
    kids = tuple((i, _convert(sub)) for i, sub in sorted(
        (k, v) for k, v in node.items() if k != "_d"))
    return (tuple(node.get("_d", ())), kids)


def identity() -> Frag:
    """Plain ``fn z=> z`` with no directives (checked against an arrow)."""
    return var_lam("z")


def var_lam(name: str) -> Frag:
    return Frag(Abs(name, Var(name)))


@dataclass
class BuiltTerm:
    """A combinator with the certificate that types it at ``declared_type``."""

    term: Term
    certificate: Certificate
    declared_type: TypeExpr
    stats: dict = field(default_factory=dict)
    style: str = "circuit"
    _tree: tuple | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_frag(cls, frag: Frag, declared_type: TypeExpr, style: str = "circuit",
                  **extra) -> "BuiltTerm":
        stats = {"node_count": node_count(frag.term), "const_count": frag.consts, **extra}
        return cls(frag.term, frag.certificate(), declared_type, stats, style, frag.tree)

    def frag(self) -> Frag:
        """This term as a fragment, ready to embed in a larger one."""
        if self._tree is not None or not len(self.certificate):
            return Frag(self.term, self._tree, self.stats.get("const_count", 0))
        trie: dict = {}
        for d in self.certificate:
            node = trie
            for i in d.path:
                node = node.setdefault(i, {})
            node.setdefault("_d", []).append(d.action)

        return Frag(self.term, deep(_convert)(trie), self.stats.get("const_count", 0))

    @property
    def node_count(self) -> int:
        return self.stats["node_count"]

    @property
    def const_count(self) -> int:
        return self.stats["const_count"]

    def summary(self) -> dict:
        return {"type": print_type(self.declared_type), "style": self.style, **self.stats}


__all__ = ["A", "BuiltTerm", "Frag", "Names", "ap", "counted", "identity", "lam", "let",
           "pair", "tuple_frag", "var"]
