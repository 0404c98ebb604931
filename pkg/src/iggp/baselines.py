"""Propositional baselines: True, Inertia, Mean and k-nearest-neighbours.

All of them look only at flattened ground atoms.  A predictor is fitted on
training triples and then answers ``predict(bk, atom) -> bool``.
"""

from __future__ import annotations

import heapq
from collections import Counter
from typing import Iterable, Sequence

from .errors import PredictorError
from .extract import Triple
from .gdl.terms import Atom, atom_to_prolog

METHODS = ("true", "inertia", "mean", "knn1", "knn5")


def distance(a: Iterable, b: Iterable) -> int:
    """Size of the symmetric difference."""
    return len(set(a) ^ set(b))


def bit_distance(x: int, y: int) -> int:
    return (x ^ y).bit_count()


def predict_true(bk, a: Atom) -> bool:
    return True


def inertia_source(a: Atom) -> Atom | None:
    """The ``true`` counterpart of a ``next`` atom, or None for other atoms."""
    pred = a.predicate
    if pred.startswith("next_"):
        return Atom("true_" + pred[5:], a.args)
    if pred == "next":
        return Atom("true", a.args)
    return None


def predict_inertia(bk, a: Atom) -> bool:
    src = inertia_source(a)
    return True if src is None else src in bk


class TruePredictor:
    name = "true"

    def fit(self, train: Sequence[Triple]) -> "TruePredictor":
        return self

    def predict(self, bk, a: Atom) -> bool:
        return True


class InertiaPredictor(TruePredictor):
    name = "inertia"

    def predict(self, bk, a: Atom) -> bool:
        return predict_inertia(bk, a)


class MeanPredictor:
    """True for atoms that are positive in at least half of the training triples."""

    name = "mean"

    def __init__(self):
        self.counts: Counter | None = None
        self.size = 0

    def fit(self, train: Sequence[Triple]) -> "MeanPredictor":
        if not train:
            raise PredictorError("mean needs at least one training triple")
        self.counts = Counter(a for t in train for a in t.pos)
        self.size = len(train)
        return self

    def predict(self, bk, a: Atom) -> bool:
        if self.counts is None:
            raise PredictorError("mean predictor used before fit")
        return 2 * self.counts[a] >= self.size


class KNNPredictor:
    """Vote of the k training triples whose backgrounds are closest to ``bk``.

    Backgrounds are bitsets over the sorted atom universe of the training
    backgrounds.  Test atoms outside that universe add the same amount to
    every distance, so they are dropped.  Ties go to the lower training index.
    """

    def __init__(self, k: int):
        if k < 1:
            raise PredictorError(f"k must be at least 1, got {k}")
        self.k = k
        self.name = f"knn{k}"
        self.train: list[Triple] | None = None
        self._bit: dict = {}
        self._codes: list[int] = []
        self._near: dict = {}

    def fit(self, train: Sequence[Triple]) -> "KNNPredictor":
        if self.k > len(train):
            raise PredictorError(f"k={self.k} exceeds the number of training triples ({len(train)})")
        universe = sorted({a for t in train for a in t.bk}, key=atom_to_prolog)
        self._bit = {a: 1 << i for i, a in enumerate(universe)}
        self.train = list(train)
        self._codes = [self.encode(t.bk) for t in self.train]
        self._near = {}
        return self

    def encode(self, bk) -> int:
        bit = self._bit
        code = 0
        for a in bk:
            code |= bit.get(a, 0)
        return code

    def neighbours(self, bk) -> list[int]:
        """Training indices of the k nearest backgrounds."""
        if self.train is None:
            raise PredictorError("knn predictor used before fit")
        key = frozenset(bk)
        hit = self._near.get(key)
        if hit is None:
            code = self.encode(key)
            hit = [i for _, i in heapq.nsmallest(self.k, ((bit_distance(code, c), i) for i, c in enumerate(self._codes)))]
            self._near[key] = hit
        return hit

    def predict(self, bk, a: Atom) -> bool:
        votes = sum(1 for i in self.neighbours(bk) if a in self.train[i].pos)
        return 2 * votes >= self.k


def make_predictor(method: str, k: int | None = None):
    """Unfitted predictor for a CLI-style method name."""
    if method == "true":
        return TruePredictor()
    if method == "inertia":
        return InertiaPredictor()
    if method == "mean":
        return MeanPredictor()
    if method == "knn":
        if k is None:
            raise PredictorError("method 'knn' needs k")
        return KNNPredictor(k)
    if method.startswith("knn") and method[3:].isdigit():
        return KNNPredictor(int(method[3:]))
    raise PredictorError(f"unknown method {method!r}; expected one of {', '.join(METHODS)} or knn with k")
