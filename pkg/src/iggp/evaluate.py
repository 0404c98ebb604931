"""Balanced accuracy and perfectly-solved scoring of baselines and rule sets.

Counts are pooled over every test triple of a (game, target) task before the
balanced accuracy is computed.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .baselines import make_predictor
from .datasets import Dataset
from .errors import IGGPError, NestingTooDeep
from .extract import Triple
from .flatten import FlatMap, flatten
from .gdl import parse_any
from .gdl.terms import Atom, Program
from .inference import engine_for
from .signature import parse_signature


def balanced_accuracy(tp: int, p: int, tn: int, n: int) -> float:
    """(tp/p + tn/n) / 2, falling back to the one defined class."""
    if p < 0 or n < 0 or not 0 <= tp <= p or not 0 <= tn <= n:
        raise IGGPError(f"inconsistent counts tp={tp} p={p} tn={tn} n={n}")
    if p == 0 and n == 0:
        raise IGGPError("balanced accuracy is undefined with no examples")
    if p == 0:
        return tn / n
    if n == 0:
        return tp / p
    return (tp / p + tn / n) / 2


@dataclass(frozen=True)
class TaskScore:
    game: str
    target: str
    method: str
    tp: int
    p: int
    tn: int
    n: int

    @property
    def balanced_accuracy(self) -> float:
        return balanced_accuracy(self.tp, self.p, self.tn, self.n)

    @property
    def perfectly_solved(self) -> bool:
        return self.tp == self.p and self.tn == self.n

    @property
    def single_class(self) -> bool:
        return self.p == 0 or self.n == 0


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (game, target) pairs with no test triples

    @property
    def mean_balanced_accuracy(self) -> float:
        return sum(r.balanced_accuracy for r in self.rows) / len(self.rows) if self.rows else 0.0

    @property
    def percent_perfectly_solved(self) -> float:
        return 100.0 * sum(r.perfectly_solved for r in self.rows) / len(self.rows) if self.rows else 0.0

    def row(self, game: str, target: str) -> TaskScore:
        for r in self.rows:
            if r.game == game and r.target == target:
                return r
        raise KeyError((game, target))

    def to_tsv(self) -> str:
        out = ["game\ttarget\tmethod\ttp\tp\ttn\tn\tba\tperfectly_solved\tsingle_class"]
        for r in self.rows:
            out.append(
                f"{r.game}\t{r.target}\t{r.method}\t{r.tp}\t{r.p}\t{r.tn}\t{r.n}\t"
                f"{r.balanced_accuracy:.6f}\t{str(r.perfectly_solved).lower()}\t{str(r.single_class).lower()}"
            )
        return "\n".join(out) + "\n"

    def summary(self) -> str:
        lines = [
            f"{r.game:<24} {r.target:<9} ba={r.balanced_accuracy:.4f} "
            f"{'solved' if r.perfectly_solved else 'not solved'}{' (single class)' if r.single_class else ''}"
            for r in self.rows
        ]
        lines += [f"{g:<24} {t:<9} skipped: empty test split" for g, t in self.skipped]
        lines.append(
            f"tasks: {len(self.rows)}  mean ba: {self.mean_balanced_accuracy:.4f}  "
            f"perfectly solved: {self.percent_perfectly_solved:.1f}%"
        )
        return "\n".join(lines) + "\n"


def pooled_counts(classify: Callable[[Triple, Atom], bool], tests: Sequence[Triple]) -> tuple[int, int, int, int]:
    tp = p = tn = n = 0
    for t in tests:
        for a in t.pos:
            p += 1
            tp += bool(classify(t, a))
        for a in t.neg:
            n += 1
            tn += not classify(t, a)
    return tp, p, tn, n


# ---------------------------------------------------------------- hypotheses


class Hypothesis:
    """A rule set evaluated against triple backgrounds.

    The background is added as facts both as given and, when a signature is
    supplied, un-flattened back into GDL form, so a flat rule set and the
    original game description can both be scored.  Derived atoms are
    flattened before they are compared with examples.
    """

    def __init__(self, program: Program, flatmap: FlatMap | None = None):
        self.program = program
        self.flatmap = flatmap
        self.engine = engine_for(program)
        self._last_bk = None
        self._last = frozenset()

    def derived(self, bk) -> frozenset:
        if bk is self._last_bk:
            return self._last
        extra = set(bk)
        if self.flatmap is not None:
            extra.update(self.flatmap.unflatten(a) for a in bk)
        out = set()
        for a in self.engine.model(extra):
            try:
                out.add(flatten(a))
            except NestingTooDeep:
                continue  # cannot be an example atom
        self._last_bk, self._last = bk, frozenset(out)
        return self._last

    def classify(self, t: Triple, a: Atom) -> bool:
        return a in self.derived(t.bk)


def classify_hypothesis(h: Program, triple: Triple, atom: Atom, flatmap: FlatMap | None = None) -> bool:
    """Whether ``atom`` is in the least model of ``h`` plus the triple's background."""
    return Hypothesis(h, flatmap).classify(triple, atom)


# ---------------------------------------------------------------- scoring


@dataclass(frozen=True)
class Method:
    """What to score: a baseline by name, or a rule set.

    ``hypothesis`` is rule text (GDL or, with a ``.pl`` name, Prolog style);
    with ``reference=True`` each game's own description is used instead.
    """

    name: str
    k: int | None = None
    hypothesis: str | None = None
    hypothesis_name: str = ""
    reference: bool = False

    @property
    def is_rules(self) -> bool:
        return self.reference or self.hypothesis is not None


def _classifier(method: Method, game_gdl: str, signature: str, train: Sequence[Triple]):
    if method.is_rules:
        text, fname = (game_gdl, "game.gdl") if method.reference else (method.hypothesis, method.hypothesis_name)
        flatmap = FlatMap(parse_signature(signature)) if signature.strip() else None
        return Hypothesis(parse_any(text, fname), flatmap).classify
    pred = make_predictor(method.name, method.k).fit(train)
    return lambda t, a: pred.predict(t.bk, a)


def score_task(method: Method, game: str, target: str, gdl: str, signature: str, train, test) -> TaskScore:
    classify = _classifier(method, gdl, signature, train)
    return TaskScore(game, target, method.name, *pooled_counts(classify, test))


def _score_star(args):
    return score_task(*args)


def score(method: Method, dataset: Dataset, jobs: int = 1) -> EvalReport:
    """Score every task of ``dataset`` on its test split."""
    report = EvalReport()
    work = []
    for game, target, ts in dataset.tasks():
        if not ts.test:
            report.skipped.append((game, target))
            continue
        gd = dataset.games[game]
        work.append((method, game, target, gd.gdl, gd.signature, ts.train, ts.test))
    if jobs <= 1 or len(work) <= 1:
        report.rows = [_score_star(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            report.rows = list(pool.map(_score_star, work))
    return report
