"""Exhaustive evaluation sweeps, optionally spread over worker processes.

Workers receive the term as text (pickling a deeply nested term would hit
the interpreter's recursion limit) and return results keyed by input index,
so the merged output is identical for every ``jobs`` setting.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from ._deep import deep
from .errors import EvalError
from .reduce import DEFAULT_FUEL, Evaluator, StepCount
from .table import FunctionTable
from .terms import Term, parse_term, print_term


@dataclass(frozen=True)
class Outcome:
    args: tuple[int, ...]
    value: int | None
    steps: StepCount
    error: str | None = None


@dataclass(frozen=True)
class SweepReport:
    outcomes: tuple[Outcome, ...]
    expected: tuple[int, ...] | None = None

    @property
    def total(self) -> int:
        return len(self.outcomes)

    def mismatches(self) -> list[tuple[Outcome, int | None]]:
        if self.expected is None:
            return [(o, None) for o in self.outcomes if o.error]
        return [(o, e) for o, e in zip(self.outcomes, self.expected)
                if o.error or o.value != e]

    @property
    def agreement(self) -> int:
        return self.total - len(self.mismatches())

    @property
    def ok(self) -> bool:
        return not self.mismatches()

    @property
    def steps(self) -> StepCount:
        total = StepCount()
        for o in self.outcomes:
            total = total + o.steps
        return total

    def to_json(self, limit: int = 10) -> dict:
        bad = self.mismatches()
        return {
            "agreement": self.agreement, "total": self.total,
            "beta1_total": self.steps.beta1, "beta2_total": self.steps.beta2,
            "mismatches": [{"args": list(o.args), "got": o.value, "expected": e,
                            **({"error": o.error} if o.error else {})}
                           for o, e in bad[:limit]],
        }


_worker: Evaluator | None = None


def _init(text: str, radices: tuple[int, ...], out: int, fuel: int) -> None:
    global _worker
    _worker = Evaluator(parse_term(text), radices, out, fuel)


def _evaluate(ev: Evaluator, chunk: Sequence[tuple[int, ...]]) -> list[Outcome]:
    return deep(_evaluate_inline)(ev, chunk)


def _evaluate_inline(ev: Evaluator, chunk) -> list[Outcome]:
    res = []
    for args in chunk:
        try:
            value, steps = ev.run(args)
            res.append(Outcome(tuple(args), value, steps))
        except EvalError as exc:
            res.append(Outcome(tuple(args), None, StepCount(), str(exc)))
    return res


def _run_chunk(chunk) -> list[Outcome]:
    assert _worker is not None
    return _evaluate(_worker, chunk)


def sweep(term: Term, input_radices: Sequence[int], output_radix: int, jobs: int = 1,
          expected: Sequence[int] | None = None, fuel: int = DEFAULT_FUEL) -> SweepReport:
    """Evaluate ``term`` on every input tuple in lexicographic order."""
    radices = tuple(input_radices)
    inputs = list(itertools.product(*(range(r) for r in radices)))
    if expected is not None and len(expected) != len(inputs):
        raise ValueError(f"expected {len(inputs)} reference outputs, got {len(expected)}")
    if jobs <= 1 or len(inputs) < 2:
        outcomes = _evaluate(Evaluator(term, radices, output_radix, fuel), inputs)
    else:
        size = math.ceil(len(inputs) / (jobs * 4))
        chunks = [inputs[k:k + size] for k in range(0, len(inputs), size)]
        with ProcessPoolExecutor(jobs, initializer=_init,
                                 initargs=(print_term(term), radices, output_radix, fuel)) as pool:
            outcomes = [o for part in pool.map(_run_chunk, chunks) for o in part]
    return SweepReport(tuple(outcomes), tuple(expected) if expected is not None else None)


def sweep_table(term: Term, table: FunctionTable, jobs: int = 1,
                fuel: int = DEFAULT_FUEL) -> SweepReport:
    return sweep(term, table.input_radices, table.output_radix, jobs, table.entries, fuel)
