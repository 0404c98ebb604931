"""GDL programs viewed as deterministic Markov games.

States are sets of fluents (the ``f`` in ``true(f)``); the engine boundary
wraps them into ``true`` atoms and unwraps ``next``/``init`` atoms.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DeadEnd, GameError, IllegalAction, RewardError
from .gdl.terms import Atom, Program, Term, atom_key, term_key
from .inference import FactSet, engine_for

JointAction = Mapping[str, Term]
RewardAssignment = dict


@dataclass(frozen=True)
class GameState:
    fluents: frozenset

    @classmethod
    def of(cls, fluents: Iterable[Term]) -> "GameState":
        return cls(frozenset(fluents))

    def sorted(self) -> list:
        return sorted(self.fluents, key=term_key)

    def true_atoms(self) -> list[Atom]:
        return [Atom("true", (f,)) for f in self.sorted()]

    def __iter__(self):
        return iter(self.fluents)

    def __len__(self):
        return len(self.fluents)

    def __contains__(self, f):
        return f in self.fluents


def does_atoms(action: JointAction) -> list[Atom]:
    return [Atom("does", (r, a)) for r, a in action.items()]


class Game:
    """Thin stateless wrapper around a compiled program.

    Models of recently visited states are memoised, which matters because
    generation and extraction look at every state more than once.
    """

    def __init__(self, program: Program, cache_size: int = 256):
        self.program = program
        self.engine = engine_for(program)
        self._roles = program.roles
        self._cache: OrderedDict = OrderedDict()
        self._cache_size = cache_size

    @property
    def roles(self) -> list[str]:
        if not self._roles:
            raise GameError("game description has no role facts")
        return list(self._roles)

    def _memo(self, key, compute):
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        val = compute()
        self._cache[key] = val
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return val

    def state_model(self, s: GameState) -> FactSet:
        return self._memo(("s", s), lambda: self.engine.model(s.true_atoms()))

    def transition_model(self, s: GameState, a: JointAction) -> FactSet:
        key = ("t", s, tuple(sorted(a.items(), key=lambda kv: kv[0])))
        return self._memo(key, lambda: self.engine.model(s.true_atoms() + does_atoms(a)))

    def initial_state(self) -> GameState:
        m = self.engine.model(())
        return GameState.of(a.args[0] for a in m.atoms("init"))

    def legal_moves(self, s: GameState, *, allow_empty: bool = False) -> dict[str, set]:
        m = self.state_model(s)
        moves = {r: set() for r in self.roles}
        for a in m.atoms("legal"):
            if a.args[0] in moves:
                moves[a.args[0]].add(a.args[1])
        if not allow_empty and not self.is_terminal(s):
            for r in self.roles:
                if not moves[r]:
                    raise DeadEnd(r)
        return moves

    def step(self, s: GameState, a: JointAction) -> GameState:
        roles = self.roles
        if set(a) != set(roles):
            raise GameError(f"joint action must name every role exactly once: {sorted(a)} vs {roles}")
        legal = self.legal_moves(s, allow_empty=True)
        for r in roles:
            if a[r] not in legal[r]:
                raise IllegalAction(r, a[r])
        m = self.transition_model(s, a)
        return GameState.of(x.args[0] for x in m.atoms("next"))

    def rewards(self, s: GameState) -> RewardAssignment:
        m = self.state_model(s)
        out: dict[str, Term] = {}
        for g in sorted(m.atoms("goal"), key=atom_key):
            r, v = g.args
            if r in out:
                raise RewardError(f"role {r} has more than one reward: {out[r]} and {v}")
            out[r] = v
        missing = [r for r in self.roles if r not in out]
        if missing:
            raise RewardError(f"no reward for role(s) {', '.join(missing)}")
        return out

    def is_terminal(self, s: GameState) -> bool:
        return Atom("terminal") in self.state_model(s)


def _game(p: Program) -> Game:
    g = p._cache.get("game")
    if g is None:
        g = p._cache["game"] = Game(p)
    return g


def roles(p: Program) -> list[str]:
    return _game(p).roles


def initial_state(p: Program) -> GameState:
    return _game(p).initial_state()


def legal_moves(p: Program, s: GameState) -> dict[str, set]:
    return _game(p).legal_moves(s)


def step(p: Program, s: GameState, a: JointAction) -> GameState:
    return _game(p).step(s, a)


def rewards(p: Program, s: GameState) -> RewardAssignment:
    return _game(p).rewards(s)


def is_terminal(p: Program, s: GameState) -> bool:
    return _game(p).is_terminal(s)
