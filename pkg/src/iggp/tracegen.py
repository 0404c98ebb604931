"""Seeded random playouts.

Each episode draws from its own RNG, seeded from a keyed hash of the master
seed and the episode index, so episodes can be generated in any order (or in
parallel) without changing the result.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DeadEnd, IGGPError
from .flatten import flatten
from .game import Game, GameState
from .gdl.terms import Atom, Program, Term, atom_to_prolog, term_key

DEFAULT_TRACES = 1000
DEFAULT_MAX_TIME = 100
DEFAULT_SEED = 0


@dataclass(frozen=True)
class EpisodeConfig:
    max_traces: int = DEFAULT_TRACES
    max_time: int = DEFAULT_MAX_TIME
    master_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.max_traces < 1:
            raise IGGPError("max_traces must be at least 1")
        if self.max_time < 1:
            raise IGGPError("max_time must be at least 1")


@dataclass(frozen=True)
class TraceStep:
    state: GameState
    action: Mapping[str, Term] | None


@dataclass(frozen=True)
class Trace:
    steps: tuple
    terminated: bool

    @property
    def states(self) -> list[GameState]:
        return [s.state for s in self.steps]

    def __len__(self):
        return len(self.steps)


def episode_seed(master_seed: int, episode: int) -> int:
    key = master_seed.to_bytes(16, "big", signed=True)
    h = hashlib.blake2b(episode.to_bytes(8, "big"), key=key, digest_size=8)
    return int.from_bytes(h.digest(), "big")


def choose_joint_action(rng: random.Random, legal: Mapping[str, set], roles: Sequence[str] | None = None) -> dict:
    """One uniform pick per role, over actions in canonical order."""
    out = {}
    for r in roles if roles is not None else sorted(legal):
        options = sorted(legal[r], key=term_key)
        if not options:
            raise DeadEnd(r)
        out[r] = options[rng.randrange(len(options))]
    return out


def play_episode(game: Game, cfg: EpisodeConfig, index: int) -> Trace:
    rng = random.Random(episode_seed(cfg.master_seed, index))
    roles = game.roles
    s = game.initial_state()
    steps = []
    terminated = game.is_terminal(s)
    while not terminated and len(steps) + 1 < cfg.max_time:
        try:
            legal = game.legal_moves(s)
            a = choose_joint_action(rng, legal, roles)
        except DeadEnd as e:
            raise DeadEnd(e.role, index, len(steps)) from None
        steps.append(TraceStep(s, a))
        s = game.step(s, a)
        terminated = game.is_terminal(s)
    steps.append(TraceStep(s, None))
    return Trace(tuple(steps), terminated)


def _play_chunk(program: Program, cfg: EpisodeConfig, indices: list[int]) -> list[Trace]:
    game = Game(program)
    return [play_episode(game, cfg, i) for i in indices]


def chunks(n: int, jobs: int) -> list[list[int]]:
    size = max(1, -(-n // (jobs * 4)))
    return [list(range(i, min(n, i + size))) for i in range(0, n, size)]


def generate_traces(p: Program, cfg: EpisodeConfig, jobs: int = 1) -> list[Trace]:
    """``cfg.max_traces`` random playouts, in episode-index order."""
    if jobs <= 1:
        game = Game(p)
        return [play_episode(game, cfg, i) for i in range(cfg.max_traces)]
    out: list[Trace] = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = [pool.submit(_play_chunk, p, cfg, c) for c in chunks(cfg.max_traces, jobs)]
        for f in parts:
            out.extend(f.result())
    return out


# ---------------------------------------------------------------- dump format


def format_traces(traces: Sequence[Trace]) -> str:
    """Text dump: one ``#episode`` record per trace, flattened atom lines."""
    lines = []
    for i, t in enumerate(traces):
        lines.append(f"#episode {i} steps={len(t)} terminated={'true' if t.terminated else 'false'}")
        for j, st in enumerate(t.steps):
            lines.append(f"#state {j}")
            lines.extend(sorted(atom_to_prolog(flatten(a)) + "." for a in st.state.true_atoms()))
            if st.action is not None:
                lines.append(f"#action {j}")
                lines.extend(
                    sorted(atom_to_prolog(flatten(Atom("does", (r, m)))) + "." for r, m in st.action.items())
                )
    return "\n".join(lines) + ("\n" if lines else "")
