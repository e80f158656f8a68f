"""A scikit-learn estimator whose fitted model is a linear lambda term.

``fit`` reads a (possibly partial) truth table from integer samples and
synthesizes a term for it; ``predict`` normalizes the term applied to each
encoded sample and decodes the resulting value.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .checker import check
from .circuit import DEFAULT_SIZE_GUARD, build_dnf, build_hetero, build_unary
from .inductive import build_hybrid, build_inductive
from .optimize import build_unary_opt
from .reduce import DEFAULT_FUEL, Evaluator
from .table import FunctionTable

STYLES = ("inductive", "circuit-dnf", "hybrid")


class MultiValuedLambdaClassifier(ClassifierMixin, BaseEstimator):
    """Exact lookup-table classifier over small integer domains.

    Parameters
    ----------
    style : {"inductive", "circuit-dnf", "hybrid"}
        Synthesis style for functions of two or more variables.  Mixed
        input radices always go through the inductive core.
    input_radices : sequence of int, optional
        Radix of each feature; inferred as ``max + 1`` per column if omitted.
    output_radix : int, optional
        Number of classes; inferred from ``y`` if omitted.
    optimize : bool
        Use identity slots in one-variable terms where possible.
    fill_value : int
        Output for input tuples absent from the training data.
    fuel : int
        Step budget for each prediction.
    size_guard : int
        Largest table accepted by the synthesizers.
    """

    def __init__(self, style="inductive", input_radices=None, output_radix=None,
                 optimize=False, fill_value=0, fuel=DEFAULT_FUEL,
                 size_guard=DEFAULT_SIZE_GUARD):
        self.style = style
        self.input_radices = input_radices
        self.output_radix = output_radix
        self.optimize = optimize
        self.fill_value = fill_value
        self.fuel = fuel
        self.size_guard = size_guard

    def _radices(self, X, y):
        if self.input_radices is None:
            radices = tuple(max(int(c), 1) for c in X.max(axis=0) + 1)
        else:
            radices = tuple(int(r) for r in self.input_radices)
            if len(radices) != X.shape[1]:
                raise ValueError(f"input_radices has {len(radices)} entries, "
                                 f"X has {X.shape[1]} features")
        out = int(y.max()) + 1 if self.output_radix is None else int(self.output_radix)
        out = max(out, int(self.fill_value) + 1, 1)
        return radices, out

    def fit(self, X, y):
        if self.style not in STYLES:
            raise ValueError(f"style must be one of {STYLES}, got {self.style!r}")
        X, y = check_X_y(X, y, dtype=np.int64)
        if (X < 0).any() or (y < 0).any():
            raise ValueError("features and labels must be nonnegative integers")
        radices, out = self._radices(X, y)
        if (X >= np.asarray(radices)).any():
            raise ValueError("a feature value exceeds its radix")
        if (y >= out).any():
            raise ValueError("a label exceeds output_radix")
        if not 0 <= self.fill_value < out:
            raise ValueError(f"fill_value must lie in 0..{out - 1}")
        seen: dict[tuple[int, ...], int] = {}
        for row, label in zip(map(tuple, X.tolist()), y.tolist()):
            if seen.setdefault(row, label) != label:
                raise ValueError(f"conflicting labels for input {row}")
        table = FunctionTable.from_function(lambda *a: seen.get(a, self.fill_value), radices, out)
        self.term_ = self._build(table)
        report = check([], self.term_.term, self.term_.certificate, self.term_.declared_type)
        if not report.ok:
            raise RuntimeError(f"synthesized term failed its type check: {report.error}")
        self.table_ = table
        self.certificate_ = self.term_.certificate
        self.classes_ = np.arange(out)
        self.n_features_in_ = X.shape[1]
        self.coverage_ = len(seen) / len(table.entries)
        self._evaluator = Evaluator(self.term_.term, radices, out, self.fuel)
        return self

    def _build(self, table: FunctionTable):
        if table.arity == 1:
            if table.is_uniform and self.optimize:
                return build_unary_opt(table)
            return build_unary(table)
        if not table.is_uniform:
            return build_hetero(table, self.size_guard)
        builder = {"inductive": build_inductive, "circuit-dnf": build_dnf,
                   "hybrid": build_hybrid}[self.style]
        return builder(table, self.size_guard)

    def predict(self, X):
        check_is_fitted(self, "term_")
        X = check_array(X, dtype=np.int64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        radices = np.asarray(self.table_.input_radices)
        if (X < 0).any() or (X >= radices).any():
            raise ValueError("a feature value lies outside its radix")
        rows = [tuple(r) for r in X.tolist()]
        return np.array([v for v, _ in self._evaluator.sweep(rows)], dtype=np.int64)

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("_evaluator", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        if "term_" in state:
            self._evaluator = Evaluator(self.term_.term, self.table_.input_radices,
                                        self.table_.output_radix, self.fuel)
