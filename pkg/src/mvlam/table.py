"""Finite multiple-valued functions given by their full truth table."""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .errors import TableError


@dataclass(frozen=True)
class FunctionTable:
    """``f : r_1 x ... x r_n -> r'`` with entries in lexicographic order
    (first argument most significant)."""

    input_radices: tuple[int, ...]
    output_radix: int
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "input_radices", tuple(self.input_radices))
        object.__setattr__(self, "entries", tuple(self.entries))
        for r in self.input_radices + (self.output_radix,):
            if not isinstance(r, int) or isinstance(r, bool) or r < 1:
                raise TableError(f"radices must be integers >= 1, got {r!r}")
        if not self.input_radices:
            raise TableError("a table needs at least one input")
        size = math.prod(self.input_radices)
        if len(self.entries) != size:
            raise TableError(f"expected {size} entries, got {len(self.entries)}")
        for k, e in enumerate(self.entries):
            if not isinstance(e, int) or isinstance(e, bool) or not 0 <= e < self.output_radix:
                raise TableError(f"entry {k} = {e!r} outside 0..{self.output_radix - 1}")

    # -- construction --------------------------------------------------------

    @classmethod
    def from_function(cls, fn: Callable[..., int], input_radices: Sequence[int],
                      output_radix: int) -> "FunctionTable":
        entries = [fn(*args) for args in itertools.product(*(range(r) for r in input_radices))]
        return cls(tuple(input_radices), output_radix, tuple(entries))

    @classmethod
    def uniform(cls, entries: Sequence[int], n: int, r: int) -> "FunctionTable":
        return cls((r,) * n, r, tuple(entries))

    @classmethod
    def random(cls, input_radices: Sequence[int], output_radix: int,
               rng: random.Random) -> "FunctionTable":
        size = math.prod(input_radices)
        return cls(tuple(input_radices), output_radix,
                   tuple(rng.randrange(output_radix) for _ in range(size)))

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[int]], output_radix: int | None = None
                    ) -> "FunctionTable":
        """Binary table from ``rows[x][y]``."""
        rows = [list(row) for row in rows]
        if not rows or any(len(row) != len(rows[0]) for row in rows):
            raise TableError("matrix rows must be nonempty and of equal length")
        if output_radix is None:
            output_radix = max(len(rows), len(rows[0]))
        return cls((len(rows), len(rows[0])), output_radix,
                   tuple(v for row in rows for v in row))

    # -- queries -------------------------------------------------------------

    @property
    def arity(self) -> int:
        return len(self.input_radices)

    @property
    def is_uniform(self) -> bool:
        return all(r == self.output_radix for r in self.input_radices)

    def inputs(self):
        return itertools.product(*(range(r) for r in self.input_radices))

    def index(self, args: Sequence[int]) -> int:
        if len(args) != self.arity:
            raise TableError(f"expected {self.arity} arguments, got {len(args)}")
        k = 0
        for a, r in zip(args, self.input_radices):
            if not 0 <= a < r:
                raise TableError(f"argument {a} outside 0..{r - 1}")
            k = k * r + a
        return k

    def __call__(self, *args: int) -> int:
        return self.entries[self.index(args)]

    def rows(self) -> list[list[int]]:
        """Matrix view of a binary table."""
        if self.arity != 2:
            raise TableError("matrix view needs a binary table")
        r1, r2 = self.input_radices
        return [list(self.entries[i * r2:(i + 1) * r2]) for i in range(r1)]

    def transpose(self) -> "FunctionTable":
        rows = self.rows()
        return FunctionTable.from_matrix([list(col) for col in zip(*rows)], self.output_radix)

    def fix_first(self, j: int) -> "FunctionTable":
        """The subtable ``lambda x_2..x_n. f(j, x_2, ..., x_n)``."""
        if self.arity < 2:
            raise TableError("fixing the first argument needs arity >= 2")
        stride = math.prod(self.input_radices[1:])
        return FunctionTable(self.input_radices[1:], self.output_radix,
                             self.entries[j * stride:(j + 1) * stride])

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"inputs": list(self.input_radices), "output": self.output_radix,
                "entries": list(self.entries)}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> "FunctionTable":
        if not isinstance(data, dict):
            raise TableError("table JSON must be an object")
        missing = {"inputs", "output", "entries"} - set(data)
        if missing:
            raise TableError(f"table JSON is missing {sorted(missing)}")
        inputs, output, entries = data["inputs"], data["output"], data["entries"]
        if not isinstance(inputs, list) or not isinstance(entries, list):
            raise TableError("'inputs' and 'entries' must be arrays")
        return cls(tuple(inputs), output, tuple(entries))

    @classmethod
    def load(cls, path) -> "FunctionTable":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise TableError(f"{path}: not valid JSON ({exc.msg})") from None
        return cls.from_json(data)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")
