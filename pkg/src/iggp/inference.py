"""Bottom-up evaluation of stratified programs.

The model is computed stratum by stratum with semi-naive forward chaining.
Negative literals and ``distinct`` are only ever tested on ground values,
against strata that are already complete.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator

from .errors import IterationCapExceeded, TermDepthExceeded, UnsafeRule
from .gdl.strata import BUILTINS, Strata, rule_safety_violation, stratify, validate_safety
from .gdl.terms import Atom, Compound, Program, Rule, Var, atom_key, term_depth

DEFAULT_MAX_DEPTH = 8
DEFAULT_MAX_DERIVATIONS = 10**6


class FactSet:
    """A set of ground atoms indexed by predicate, with lazy argument indexes."""

    __slots__ = ("_rels", "_idx")

    def __init__(self, atoms: Iterable[Atom] = ()):
        self._rels: dict[str, set] = defaultdict(set)
        self._idx: dict[str, dict] = {}
        for a in atoms:
            self.add(a)

    # -- atom-level API
    def add(self, atom: Atom) -> bool:
        return self._add(atom.predicate, atom.args)

    def __contains__(self, atom: Atom) -> bool:
        rel = self._rels.get(atom.predicate)
        return rel is not None and atom.args in rel

    def __iter__(self) -> Iterator[Atom]:
        for pred, rel in self._rels.items():
            for args in rel:
                yield Atom(pred, args)

    def __len__(self) -> int:
        return sum(len(r) for r in self._rels.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, FactSet):
            return set(self) == set(other)
        if isinstance(other, (set, frozenset)):
            return set(self) == other
        return NotImplemented

    def __repr__(self) -> str:
        return "FactSet({" + ", ".join(map(str, sorted(self, key=atom_key))) + "})"

    def predicates(self) -> set[str]:
        return {p for p, r in self._rels.items() if r}

    def atoms(self, predicate: str) -> set[Atom]:
        return {Atom(predicate, args) for args in self._rels.get(predicate, ())}

    def copy(self) -> "FactSet":
        new = FactSet()
        for p, rel in self._rels.items():
            new._rels[p] = set(rel)
        return new

    # -- tuple-level API used by the evaluator
    def _add(self, pred: str, args: tuple) -> bool:
        rel = self._rels[pred]
        if args in rel:
            return False
        rel.add(args)
        by_pos = self._idx.get(pred)
        if by_pos:
            for positions, index in by_pos.items():
                key = tuple(args[i] for i in positions)
                index.setdefault(key, []).append(args)
        return True

    def _has(self, pred: str, args: tuple) -> bool:
        rel = self._rels.get(pred)
        return rel is not None and args in rel

    def _lookup(self, pred: str, positions: tuple, key: tuple):
        by_pos = self._idx.setdefault(pred, {})
        index = by_pos.get(positions)
        if index is None:
            index = {}
            for args in self._rels.get(pred, ()):
                index.setdefault(tuple(args[i] for i in positions), []).append(args)
            by_pos[positions] = index
        return index.get(key, ())


def query(m: FactSet, predicate: str) -> set[Atom]:
    return m.atoms(predicate)


# ---------------------------------------------------------------- compilation

_POS, _NEG, _DISTINCT = 0, 1, 2


def _subst(t, b):
    tp = type(t)
    if tp is str:
        return t
    if tp is Var:
        return b[t.name]
    return Compound(t.functor, tuple([_subst(a, b) for a in t.args]))


def _match(pat, val, b) -> bool:
    tp = type(pat)
    if tp is str:
        return pat == val
    if tp is Var:
        cur = b.get(pat.name)
        if cur is None:
            b[pat.name] = val
            return True
        return cur == val
    if type(val) is not Compound or val.functor != pat.functor or len(val.args) != len(pat.args):
        return False
    for p, v in zip(pat.args, val.args):
        if not _match(p, v, b):
            return False
    return True


def _names(t, out: set):
    if type(t) is Var:
        out.add(t.name)
    elif type(t) is Compound:
        for a in t.args:
            _names(a, out)
    return out


class _Step:
    __slots__ = ("kind", "pred", "args", "keys", "free", "full")

    def __init__(self, kind, pred, args, bound: set):
        self.kind = kind
        self.pred = pred
        self.args = args
        keys, free = [], []
        for i, a in enumerate(args):
            (keys if _names(a, set()) <= bound else free).append(i)
        self.keys = tuple(keys)
        self.free = tuple(free)
        self.full = not free


class _CompiledRule:
    """Body scheduled left to right: each positive literal is followed by the
    negative and ``distinct`` literals that just became ground."""

    def __init__(self, rule: Rule):
        v = rule_safety_violation(rule)
        if v is not None:
            raise UnsafeRule(rule, v.name)
        self.rule = rule
        self.head_pred = rule.head.predicate
        self.head_args = rule.head.args
        pending = [l for l in rule.body if not l.positive or l.atom.predicate in BUILTINS]
        steps: list[_Step] = []
        bound: set = set()

        def flush():
            for l in list(pending):
                if _names_atom(l.atom) <= bound:
                    kind = _DISTINCT if l.atom.predicate in BUILTINS else _NEG
                    if kind == _DISTINCT and not l.positive:
                        kind = -_DISTINCT  # not distinct: equality test
                    steps.append(_Step(kind, l.atom.predicate, l.atom.args, bound))
                    pending.remove(l)

        flush()
        for l in rule.body:
            if l.positive and l.atom.predicate not in BUILTINS:
                steps.append(_Step(_POS, l.atom.predicate, l.atom.args, bound))
                bound |= _names_atom(l.atom)
                flush()
        self.steps = tuple(steps)
        self.pos_index = tuple(i for i, s in enumerate(steps) if s.kind == _POS)

    def evaluate(self, db: FactSet, delta: FactSet | None = None, delta_at: int = -1) -> list:
        out = []
        steps = self.steps
        n = len(steps)
        head_args = self.head_args

        def go(i, b):
            if i == n:
                out.append(tuple([_subst(a, b) for a in head_args]))
                return
            st = steps[i]
            kind = st.kind
            if kind == _POS:
                store = delta if i == delta_at else db
                args = st.args
                if st.full:
                    key = tuple([_subst(a, b) for a in args])
                    if store._has(st.pred, key):
                        go(i + 1, b)
                    return
                if st.keys:
                    key = tuple([_subst(args[k], b) for k in st.keys])
                    cands = store._lookup(st.pred, st.keys, key)
                else:
                    cands = store._rels.get(st.pred, ())
                free = st.free
                for cand in cands:
                    b2 = dict(b)
                    for k in free:
                        if not _match(args[k], cand[k], b2):
                            break
                    else:
                        go(i + 1, b2)
            elif kind == _NEG:
                if not db._has(st.pred, tuple([_subst(a, b) for a in st.args])):
                    go(i + 1, b)
            else:
                x, y = st.args
                differ = _subst(x, b) != _subst(y, b)
                if differ == (kind == _DISTINCT):
                    go(i + 1, b)

        go(0, {})
        return out


def _names_atom(a: Atom) -> set:
    out: set = set()
    for t in a.args:
        _names(t, out)
    return out


# ---------------------------------------------------------------- evaluation


class Engine:
    """Compiled program.  ``model(extra)`` returns the minimal model of the
    program's facts plus ``extra``.

    Predicates that cannot be affected by the extra facts are computed once
    and reused; only the rules downstream of the extra predicates re-run.
    """

    def __init__(
        self,
        program: Program,
        strata: Strata | None = None,
        max_depth: int = DEFAULT_MAX_DEPTH,
        max_derivations: int = DEFAULT_MAX_DERIVATIONS,
    ):
        validate_safety(program)
        self.program = program
        self.strata = strata if strata is not None else stratify(program)
        self.max_depth = max_depth
        self.max_derivations = max_derivations
        self.rules = [_CompiledRule(r) for r in program.rules]
        self._by_head = defaultdict(list)
        self._users = defaultdict(set)  # predicate -> heads of rules using it
        for cr in self.rules:
            self._by_head[cr.head_pred].append(cr)
            for lit in cr.rule.body:
                self._users[lit.atom.predicate].add(cr.head_pred)
        self._fact_preds = defaultdict(list)
        for f in program.facts:
            self._fact_preds[f.predicate].append(f.args)
        self._base: FactSet | None = None
        self._plans: dict[frozenset, list] = {}

    # -- public
    def model(self, extra: Iterable[Atom] = ()) -> FactSet:
        base = self._static_model()
        extra = [a for a in extra if a not in base]
        for a in extra:
            self._check_depth(a.predicate, a.args)
        dynamic = self._downstream(frozenset(a.predicate for a in extra))
        db = FactSet()
        for pred, rel in base._rels.items():
            if pred not in dynamic:
                # shared with the cached static model; static relations are never written here
                db._rels[pred] = rel
                db._idx[pred] = base._idx.setdefault(pred, {})
        for pred in dynamic:
            for args in self._fact_preds.get(pred, ()):
                db._add(pred, args)
        for a in extra:
            db._add(a.predicate, a.args)
        self._saturate(db, self._plan(dynamic))
        return db

    # -- internals
    def _static_model(self) -> FactSet:
        if self._base is None:
            db = FactSet()
            for pred, rows in self._fact_preds.items():
                for args in rows:
                    db._add(pred, args)
            self._saturate(db, self._plan(None))
            self._base = db
        return self._base

    def _downstream(self, preds: frozenset) -> frozenset:
        seen = set(preds)
        stack = list(preds)
        while stack:
            p = stack.pop()
            for h in self._users.get(p, ()):
                if h not in seen:
                    seen.add(h)
                    stack.append(h)
        return frozenset(seen)

    def _plan(self, dynamic: frozenset | None) -> list:
        plan = self._plans.get(dynamic)
        if plan is None:
            plan = []
            for layer in self.strata:
                rules = [
                    cr for cr in self.rules
                    if cr.head_pred in layer and (dynamic is None or cr.head_pred in dynamic)
                ]
                if rules:
                    plan.append((layer, rules))
            self._plans[dynamic] = plan
        return plan

    def _check_depth(self, pred, args):
        for t in args:
            if type(t) is Compound and term_depth(t) > self.max_depth:
                raise TermDepthExceeded(
                    f"term depth above {self.max_depth} in {Atom(pred, args)}; "
                    "function symbols are probably used recursively"
                )

    def _saturate(self, db: FactSet, plan: list) -> None:
        derived = 0
        for layer, rules in plan:
            recursive = [
                (cr, [i for i in cr.pos_index if cr.steps[i].pred in layer]) for cr in rules
            ]
            new = self._fresh(db, [cr.evaluate(db) for cr in rules], rules)
            while new:
                derived += len(new)
                if derived > self.max_derivations:
                    raise IterationCapExceeded(
                        f"more than {self.max_derivations} derived facts; "
                        "the description may not have a finite model"
                    )
                delta = FactSet()
                for pred, args in new:
                    db._add(pred, args)
                    delta._add(pred, args)
                batches, owners = [], []
                for cr, positions in recursive:
                    for j in positions:
                        if cr.steps[j].pred in delta._rels:
                            batches.append(cr.evaluate(db, delta, j))
                            owners.append(cr)
                new = self._fresh(db, batches, owners)

    def _fresh(self, db: FactSet, batches, owners) -> list:
        out = {}
        for cr, heads in zip(owners, batches):
            pred = cr.head_pred
            for args in heads:
                if not db._has(pred, args) and (pred, args) not in out:
                    self._check_depth(pred, args)
                    out[(pred, args)] = None
        return list(out)


def engine_for(program: Program, **caps) -> Engine:
    """Engine cached on the (immutable) program instance."""
    key = ("engine", tuple(sorted(caps.items())))
    eng = program._cache.get(key)
    if eng is None:
        eng = program._cache[key] = Engine(program, **caps)
    return eng


def minimal_model(
    p: Program,
    strata: Strata | None = None,
    extra: Iterable[Atom] = (),
    *,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_derivations: int = DEFAULT_MAX_DERIVATIONS,
) -> FactSet:
    """Least model of ``p.facts`` plus ``extra`` under ``p.rules``."""
    if strata is None:
        return engine_for(p, max_depth=max_depth, max_derivations=max_derivations).model(extra)
    return Engine(p, strata, max_depth, max_derivations).model(extra)
