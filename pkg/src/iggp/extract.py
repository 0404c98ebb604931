"""Turn playout traces into (background, positive, negative) triples.

Negatives come from the closed-world assumption: every well-typed ground
atom of the target family that is not a positive example is a negative one.
Backgrounds hold the game's static facts, the current state as ``true_*``
atoms and, for ``next`` tasks only, the joint action as ``does*`` atoms.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import SignatureError
from .flatten import FlatMap, flatten
from .game import Game, GameState, does_atoms
from .gdl.terms import Atom, Program, atom_to_prolog
from .inference import FactSet
from .signature import TypeSignature
from .tracegen import Trace

TARGETS = ("legal", "goal", "terminal", "next")
# never part of a background: targets, state/action wrappers, and init
_NOT_STATIC = frozenset({"legal", "goal", "terminal", "next", "true", "does", "init"})


@dataclass(frozen=True)
class Triple:
    bk: frozenset
    pos: frozenset
    neg: frozenset
    target: str

    def examples(self) -> list[tuple[Atom, bool]]:
        """Every example atom with its label, in canonical text order."""
        labelled = [(a, True) for a in self.pos] + [(a, False) for a in self.neg]
        return sorted(labelled, key=lambda x: atom_to_prolog(x[0]))


def ground_family(sig: TypeSignature, target: str) -> frozenset:
    """Flattened ground(sig, target)."""
    return frozenset(flatten(a) for a in sig.ground_atoms(target))


def static_facts(p: Program) -> frozenset:
    """Flattened atoms of the state-independent part of the model."""
    base = Game(p).engine.model(())
    return frozenset(flatten(a) for a in base if a.predicate not in _NOT_STATIC)


def _closed_world(pos: frozenset, universe: frozenset, target: str) -> frozenset:
    stray = pos - universe
    if stray:
        example = atom_to_prolog(min(stray, key=atom_to_prolog))
        raise SignatureError(f"{target} atom {example} is not generated by the signature")
    return universe - pos


def triple_single(
    s: GameState,
    model: FactSet,
    statics: frozenset,
    target: str,
    sig: TypeSignature,
    universe: frozenset | None = None,
) -> Triple:
    if universe is None:
        universe = ground_family(sig, target)
    pos = frozenset(flatten(a) for a in model.atoms(target))
    bk = statics | frozenset(flatten(a) for a in s.true_atoms())
    return Triple(bk, pos, _closed_world(pos, universe, target), target)


def triple_transition(
    s_i: GameState,
    a,
    s_next: GameState,
    statics: frozenset,
    sig: TypeSignature,
    universe: frozenset | None = None,
) -> Triple:
    if universe is None:
        universe = ground_family(sig, "next")
    bk = (
        statics
        | frozenset(flatten(x) for x in s_i.true_atoms())
        | frozenset(flatten(x) for x in does_atoms(a))
    )
    pos = frozenset(flatten(Atom("next", (f,))) for f in s_next.fluents)
    return Triple(bk, pos, _closed_world(pos, universe, "next"), "next")


class Extractor:
    """Per-game extraction context: checked signature, statics, universes."""

    def __init__(self, p: Program, sig: TypeSignature):
        sig.check_program(p)
        FlatMap(sig)  # raises NameCollision if flattening is not injective
        self.program = p
        self.sig = sig
        self.game = Game(p)
        self.statics = static_facts(p)
        self.universes = {t: ground_family(sig, t) for t in TARGETS if t in sig.decls}
        missing = [t for t in TARGETS if t not in sig.decls]
        if missing:
            raise SignatureError(f"signature does not declare target predicate(s): {', '.join(missing)}")

    def trace(self, t: Trace) -> list[Triple]:
        states = t.states
        out = []
        for target in ("legal", "goal", "terminal"):
            for s in states:
                m = self.game.state_model(s)
                out.append(triple_single(s, m, self.statics, target, self.sig, self.universes[target]))
        for cur, nxt in zip(t.steps, t.steps[1:]):
            out.append(
                triple_transition(cur.state, cur.action, nxt.state, self.statics, self.sig, self.universes["next"])
            )
        return out


def extract_trace(t: Trace, p: Program, sig: TypeSignature) -> list[Triple]:
    """legal, goal and terminal triples for each state, then next triples for
    each consecutive pair."""
    return Extractor(p, sig).trace(t)


def _extract_chunk(p: Program, sig: TypeSignature, traces: Sequence[Trace]) -> list[list[Triple]]:
    ex = Extractor(p, sig)
    return [ex.trace(t) for t in traces]


def extract_all(p: Program, sig: TypeSignature, traces: Sequence[Trace], jobs: int = 1) -> dict[str, list[Triple]]:
    """Triples grouped by target, in trace order."""
    if jobs <= 1:
        ex = Extractor(p, sig)
        per_trace: Iterable[list[Triple]] = (ex.trace(t) for t in traces)
    else:
        Extractor(p, sig)  # fail fast in this process
        size = max(1, -(-len(traces) // (jobs * 4)))
        parts = [traces[i:i + size] for i in range(0, len(traces), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_extract_chunk, [p] * len(parts), [sig] * len(parts), parts))
        per_trace = (ts for chunk in results for ts in chunk)
    grouped: dict[str, list[Triple]] = {t: [] for t in TARGETS}
    for ts in per_trace:
        for tr in ts:
            grouped[tr.target].append(tr)
    return grouped
