"""Reduction with step accounting, value encoding and inhabitant enumeration.

Two engines share one contract:

* :func:`step` contracts the leftmost-outermost redex (preorder: node before
  children, function before argument, ``rhs`` before ``body``) by explicit
  capture-avoiding substitution.  It handles any term and every rule.
* For linear terms under ``{beta1, beta2}`` :func:`normalize` uses a
  normalization-by-evaluation engine that counts the same contractions.  In a
  linear term no redex is ever duplicated or erased, so every reduction
  sequence to normal form performs the same number of each kind of step; the
  fast engine's counts therefore equal the leftmost-outermost counts (checked
  by property tests against the stepper).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from ._deep import deep
from .errors import DomainError, EvalError
from .terms import (
    Abs,
    App,
    LetPair,
    Pair,
    Term,
    Var,
    all_names,
    app,
    free_vars,
    fresh_name,
    is_linear,
    iter_nodes,
    lams,
    replace_at,
    substitute,
    uniquify,
)

BETA1, BETA2, ETA1, ETA2 = "beta1", "beta2", "eta1", "eta2"
ALL_RULES = frozenset({BETA1, BETA2, ETA1, ETA2})
DEFAULT_RULES = frozenset({BETA1, BETA2})
DEFAULT_FUEL = 10**7
INHABITANT_GUARD = 6


@dataclass(frozen=True)
class StepCount:
    beta1: int = 0
    beta2: int = 0
    eta1: int = 0
    eta2: int = 0

    @property
    def total(self) -> int:
        return self.beta1 + self.beta2 + self.eta1 + self.eta2

    def __add__(self, other: "StepCount") -> "StepCount":
        return StepCount(self.beta1 + other.beta1, self.beta2 + other.beta2,
                         self.eta1 + other.eta1, self.eta2 + other.eta2)

    def bump(self, rule: str) -> "StepCount":
        return StepCount(**{**self.as_dict(), rule: getattr(self, rule) + 1})

    def as_dict(self) -> dict[str, int]:
        return {"beta1": self.beta1, "beta2": self.beta2, "eta1": self.eta1, "eta2": self.eta2}


@dataclass(frozen=True)
class NormalizeResult:
    normal_form: Term
    steps: StepCount
    fuel_exhausted: bool = False


# ---------------------------------------------------------------------------
# small-step engine

def _redex_rule(node: Term, rules) -> str | None:
    if isinstance(node, App) and isinstance(node.fun, Abs):
        return BETA1 if BETA1 in rules else None
    if isinstance(node, LetPair):
        if isinstance(node.rhs, Pair) and BETA2 in rules:
            return BETA2
        if (ETA2 in rules and isinstance(node.body, Pair) and node.body.left == Var(node.x)
                and node.body.right == Var(node.y)):
            return ETA2
        return None
    if (ETA1 in rules and isinstance(node, Abs) and isinstance(node.body, App)
            and node.body.arg == Var(node.param) and node.param not in free_vars(node.body.fun)):
        return ETA1
    return None


def contract(node: Term, rule: str) -> Term:
    """Contract the redex ``node`` by ``rule``."""
    if rule == BETA1:
        return substitute(node.fun.body, node.fun.param, node.arg)
    if rule == BETA2:
        u, v, w = node.rhs.left, node.rhs.right, node.body
        # rename both binders apart first so the two substitutions are simultaneous
        avoid = all_names(w) | free_vars(u) | free_vars(v)
        nx = fresh_name(node.x, avoid)
        ny = fresh_name(node.y, avoid | {nx})
        w = substitute(substitute(w, node.x, Var(nx)), node.y, Var(ny))
        return substitute(substitute(w, nx, u), ny, v)
    if rule == ETA1:
        return node.body.fun
    if rule == ETA2:
        return node.rhs
    raise ValueError(f"unknown rule {rule!r}")


def redexes(t: Term, rules=DEFAULT_RULES) -> list[tuple[tuple[int, ...], str]]:
    """All enabled redexes in preorder (the first one is leftmost-outermost)."""
    return [(path, rule) for path, node in iter_nodes(t)
            if (rule := _redex_rule(node, rules)) is not None]


def contract_at(t: Term, path: tuple[int, ...], rules=ALL_RULES) -> tuple[Term, str]:
    from .terms import subterm
    node = subterm(t, path)
    rule = _redex_rule(node, rules)
    if rule is None:
        raise ValueError(f"no redex at {list(path)}")
    return replace_at(t, path, contract(node, rule)), rule


def step(t: Term, rules=DEFAULT_RULES):
    """Leftmost-outermost step: ``(term, rule, path)`` or ``None`` if normal."""
    rules = frozenset(rules)
    for path, node in iter_nodes(t):
        rule = _redex_rule(node, rules)
        if rule is not None:
            return replace_at(t, path, contract(node, rule)), rule, path
    return None


def _normalize_naive(t, rules, fuel, choose=None) -> NormalizeResult:
    counts = dict.fromkeys((BETA1, BETA2, ETA1, ETA2), 0)
    for _ in range(fuel):
        if choose is None:
            nxt = step(t, rules)
            if nxt is None:
                return NormalizeResult(t, StepCount(**counts))
            t, rule, _path = nxt
        else:
            found = redexes(t, rules)
            if not found:
                return NormalizeResult(t, StepCount(**counts))
            path, _ = found[choose(len(found))]
            t, rule = contract_at(t, path, rules)
        counts[rule] += 1
    done = step(t, rules) is None
    return NormalizeResult(t, StepCount(**counts), fuel_exhausted=not done)


# ---------------------------------------------------------------------------
# normalization by evaluation (linear terms, beta rules only)

class _VPair:
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left, self.right = left, right


class _Neu:
    __slots__ = ("term",)

    def __init__(self, term: Term):
        self.term = term


class _OutOfFuel(Exception):
    pass


class _NbE:
    """Closures are ``Abs`` nodes; binder names are unique so one global
    environment suffices, and linearity lets each entry be popped on use."""

    def __init__(self, fuel: int):
        self.env: dict = {}
        self.beta1 = 0
        self.beta2 = 0
        self.fuel = fuel

    def tick(self) -> None:
        if self.beta1 + self.beta2 > self.fuel:
            raise _OutOfFuel

    def eval(self, t):
        env = self.env
        while True:
            cls = type(t)
            if cls is Var:
                v = env.pop(t.name, None)
                return _Neu(t) if v is None else v
            if cls is Abs:
                return t
            if cls is App:
                f = self.eval(t.fun)
                a = self.eval(t.arg)
                if type(f) is Abs:
                    self.beta1 += 1
                    self.tick()
                    env[f.param] = a
                    t = f.body
                    continue
                return _Neu(App(self.quote(f), self.quote(a)))
            if cls is Pair:
                return _VPair(self.eval(t.left), self.eval(t.right))
            r = self.eval(t.rhs)
            if type(r) is _VPair:
                self.beta2 += 1
                self.tick()
                env[t.x] = r.left
                env[t.y] = r.right
                t = t.body
                continue
            env[t.x] = _Neu(Var(t.x))
            env[t.y] = _Neu(Var(t.y))
            return _Neu(LetPair(t.x, t.y, self.quote(r), self.quote(self.eval(t.body))))

    def quote(self, v) -> Term:
        cls = type(v)
        if cls is _Neu:
            return v.term
        if cls is _VPair:
            return Pair(self.quote(v.left), self.quote(v.right))
        self.env[v.param] = _Neu(Var(v.param))
        return Abs(v.param, self.quote(self.eval(v.body)))


def _nbe(t: Term, fuel: int) -> tuple[Term, StepCount] | None:
    machine = _NbE(fuel)
    try:
        nf = machine.quote(machine.eval(t))
    except _OutOfFuel:
        return None
    return nf, StepCount(machine.beta1, machine.beta2)


@deep
def normalize(t: Term, rules=DEFAULT_RULES, fuel: int = DEFAULT_FUEL,
              choose: Callable[[int], int] | None = None) -> NormalizeResult:
    """Normalize ``t``; counts are exact and deterministic.

    ``choose`` selects a redex index among the enabled ones (in preorder) and
    switches to the small-step engine, for strategy experiments.
    """
    if fuel <= 0:
        raise DomainError("fuel must be positive")
    rules = frozenset(rules)
    if not rules <= ALL_RULES:
        raise ValueError(f"unknown rules {sorted(rules - ALL_RULES)}")
    if choose is None and rules == DEFAULT_RULES and is_linear(t):
        out = _nbe(uniquify(t), fuel)
        if out is not None:
            return NormalizeResult(out[0], out[1])
    return _normalize_naive(t, rules, fuel, choose)


def normalize_random(t: Term, rng: random.Random, rules=DEFAULT_RULES,
                     fuel: int = DEFAULT_FUEL) -> NormalizeResult:
    """Normalize contracting a uniformly random enabled redex at each step."""
    return normalize(t, rules, fuel, choose=lambda n: rng.randrange(n))


# ---------------------------------------------------------------------------
# values

def _check_index(i: int, r: int) -> None:
    if not isinstance(r, int) or r < 1:
        raise DomainError(f"radix must be >= 1, got {r!r}")
    if not isinstance(i, int) or not 0 <= i < r:
        raise DomainError(f"value {i!r} out of range for radix {r}")


def value_body(i: int, r: int, fs: Sequence[Term], x: Term) -> Term:
    """``f_i (f_{i+1} (... (f_{i+r-1} x)))`` with ``fs[k]`` standing for ``f_k``."""
    body = x
    for k in range(r - 1, -1, -1):
        body = App(fs[(i + k) % r], body)
    return body


def encode_value(i: int, r: int) -> Term:
    """The canonical value term ``v_i`` of ``T_r``."""
    _check_index(i, r)
    return _encode(i, r, "f", "x")


def _encode(i: int, r: int, prefix: str, x: str) -> Term:
    names = [f"{prefix}{k}" for k in range(r)]
    return lams([*reversed(names), x], value_body(i, r, [Var(n) for n in names], Var(x)))


@dataclass(frozen=True)
class NonCanonical:
    """A normal inhabitant of ``T_r`` whose composition order is not cyclic."""

    permutation: tuple[int, ...]


@dataclass(frozen=True)
class NotValueShaped:
    reason: str


def decode_value(t: Term, r: int):
    """Index ``i`` if ``t`` is alpha-equal to ``v_i``; otherwise a
    :class:`NonCanonical` or :class:`NotValueShaped` verdict."""
    if not isinstance(r, int) or r < 1:
        raise DomainError(f"radix must be >= 1, got {r!r}")
    params = []
    for _ in range(r + 1):
        if not isinstance(t, Abs):
            return NotValueShaped(f"expected {r + 1} leading abstractions")
        params.append(t.param)
        t = t.body
    if len(set(params)) != r + 1:
        return NotValueShaped("binder names shadow each other")
    index = {p: r - 1 - k for k, p in enumerate(params[:r])}
    order = []
    while isinstance(t, App):
        head = t.fun
        if not isinstance(head, Var) or head.name not in index:
            return NotValueShaped("body is not a composition of the function binders")
        order.append(index[head.name])
        t = t.arg
    if t != Var(params[r]):
        return NotValueShaped("innermost argument is not the last binder")
    if sorted(order) != list(range(r)):
        return NotValueShaped("function binders not used exactly once each")
    first = order[0]
    if all(order[k] == (first + k) % r for k in range(r)):
        return first
    return NonCanonical(tuple(order))


def enumerate_normal_inhabitants(r: int) -> list[Term]:
    """The ``r!`` closed normal, eta-long inhabitants of ``T_r``."""
    if not isinstance(r, int) or r < 1:
        raise DomainError(f"radix must be >= 1, got {r!r}")
    if r > INHABITANT_GUARD:
        raise DomainError(f"radix {r} exceeds the enumeration guard {INHABITANT_GUARD}")
    names = [f"f{k}" for k in range(r)]
    out = []
    for perm in itertools.permutations(range(r)):
        body: Term = Var("x")
        for k in reversed(perm):
            body = App(Var(names[k]), body)
        out.append(lams([*reversed(names), "x"], body))
    return out


# ---------------------------------------------------------------------------
# evaluation pipeline

def _arg_value(k: int, a: int, r: int) -> Term:
    return _encode(a, r, f"_a{k}f", f"_a{k}x")


def _reserved(radices: Sequence[int]) -> set[str]:
    names = set()
    for k, r in enumerate(radices):
        names.update(f"_a{k}f{i}" for i in range(r))
        names.add(f"_a{k}x")
    return names


class Evaluator:
    """Applies one closed linear term to many argument tuples.

    The term is renamed apart from the argument encodings once; each call then
    runs the fast engine on a fresh application spine.
    """

    def __init__(self, f: Term, input_radices: Sequence[int], output_radix: int,
                 fuel: int = DEFAULT_FUEL):
        self.input_radices = tuple(input_radices)
        self.output_radix = output_radix
        self.fuel = fuel
        for r in self.input_radices + (output_radix,):
            if not isinstance(r, int) or r < 1:
                raise DomainError(f"radix must be >= 1, got {r!r}")
        if free_vars(f):
            raise EvalError("not-value-shaped", f"term has free variables {sorted(free_vars(f))}")
        lin = is_linear(f)
        if not lin:
            raise EvalError("not-value-shaped", f"term is not linear: {lin.reason}")
        self.term = uniquify(f, _reserved(self.input_radices))
        self._args = [[_arg_value(k, a, r) for a in range(r)]
                      for k, r in enumerate(self.input_radices)]

    def __call__(self, args: Sequence[int]) -> tuple[int, StepCount]:
        return self.run(args)

    @deep
    def run(self, args: Sequence[int]) -> tuple[int, StepCount]:
        return self._run(args)

    @deep
    def sweep(self, inputs=None) -> list[tuple[int, StepCount]]:
        """``run`` over many tuples (default: all, first argument most significant)."""
        if inputs is None:
            inputs = itertools.product(*(range(r) for r in self.input_radices))
        return [self._run(args) for args in inputs]

    def _run(self, args: Sequence[int]) -> tuple[int, StepCount]:
        if len(args) != len(self.input_radices):
            raise DomainError(f"expected {len(self.input_radices)} arguments, got {len(args)}")
        for a, r in zip(args, self.input_radices):
            _check_index(a, r)
        spine = app(self.term, *(self._args[k][a] for k, a in enumerate(args)))
        out = _nbe(spine, self.fuel)
        if out is None:
            raise EvalError("fuel-exhausted", f"more than {self.fuel} steps")
        nf, steps = out
        verdict = decode_value(nf, self.output_radix)
        if isinstance(verdict, NonCanonical):
            raise EvalError("non-canonical", f"permutation {verdict.permutation}")
        if isinstance(verdict, NotValueShaped):
            raise EvalError("not-value-shaped", verdict.reason)
        return verdict, steps

    def table(self) -> list[int]:
        """Outputs for every input tuple, first argument most significant."""
        return [value for value, _ in self.sweep()]


def eval_applied(f: Term, args: Sequence[int], input_radices: Sequence[int],
                 output_radix: int, fuel: int = DEFAULT_FUEL) -> tuple[int, StepCount]:
    """Apply ``f`` to the encoded ``args``, normalize, decode the result."""
    return Evaluator(f, input_radices, output_radix, fuel).run(args)
