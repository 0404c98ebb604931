"""Terms, atoms, rules and programs.

Constants are plain strings, variables are :class:`Var`, compound terms are
:class:`Compound`.  Everything is immutable and hashable so that facts can
live in sets and programs can be shared between threads and processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


class Compound(NamedTuple):
    functor: str
    args: tuple

    def __str__(self) -> str:
        return term_to_prolog(self)


Term = Union[str, Var, Compound]


class Atom(NamedTuple):
    predicate: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(is_ground(a) for a in self.args)

    def __str__(self) -> str:
        return atom_to_prolog(self)


# A flattened atom is an ordinary Atom whose arguments are all constants.
FlatAtom = Atom


class Literal(NamedTuple):
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"


def is_ground(t: Term) -> bool:
    if type(t) is str:
        return True
    if type(t) is Var:
        return False
    return all(is_ground(a) for a in t.args)


def term_vars(t: Term) -> Iterator[Var]:
    if type(t) is Var:
        yield t
    elif type(t) is Compound:
        for a in t.args:
            yield from term_vars(a)


def atom_vars(a: Atom) -> Iterator[Var]:
    for t in a.args:
        yield from term_vars(t)


def term_depth(t: Term) -> int:
    if type(t) is Compound:
        return 1 + max(term_depth(a) for a in t.args)
    return 0


def term_key(t: Term):
    """Canonical, platform-independent sort key for terms."""
    if type(t) is str:
        return (0, t)
    if type(t) is Var:
        return (1, t.name)
    return (2, t.functor, len(t.args), tuple(term_key(a) for a in t.args))


def atom_key(a: Atom):
    return (a.predicate, len(a.args), tuple(term_key(t) for t in a.args))


def rename(t: Term, mapping: dict) -> Term:
    if type(t) is Var:
        return mapping.get(t, t)
    if type(t) is Compound:
        return Compound(t.functor, tuple(rename(a, mapping) for a in t.args))
    return t


@dataclass(frozen=True)
class Rule:
    """``head :- body``.  Equality and hashing are up to variable renaming."""

    head: Atom
    body: tuple

    def variables(self) -> list[Var]:
        seen: dict[Var, None] = {}
        for v in atom_vars(self.head):
            seen.setdefault(v)
        for lit in self.body:
            for v in atom_vars(lit.atom):
                seen.setdefault(v)
        return list(seen)

    def canonical(self) -> "Rule":
        mapping = {v: Var(f"_{i}") for i, v in enumerate(self.variables())}
        head = Atom(self.head.predicate, tuple(rename(t, mapping) for t in self.head.args))
        body = tuple(
            Literal(Atom(l.atom.predicate, tuple(rename(t, mapping) for t in l.atom.args)), l.positive)
            for l in self.body
        )
        return Rule(head, body)

    def _key(self):
        c = self.canonical()
        return (c.head, c.body)

    def __eq__(self, other):
        if not isinstance(other, Rule):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self) -> str:
        return rule_to_prolog(self)


@dataclass(frozen=True)
class Program:
    """Ground facts (in declaration order) plus rules."""

    facts: tuple = ()
    rules: tuple = ()
    # per-instance scratch space for compiled engines; never compared or pickled
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def roles(self) -> list[str]:
        return [f.args[0] for f in self.facts if f.predicate == "role" and len(f.args) == 1]

    def predicates(self) -> set[str]:
        preds = {f.predicate for f in self.facts}
        for r in self.rules:
            preds.add(r.head.predicate)
            preds.update(l.atom.predicate for l in r.body)
        return preds

    def __getstate__(self):
        return {"facts": self.facts, "rules": self.rules}

    def __setstate__(self, state):
        object.__setattr__(self, "facts", state["facts"])
        object.__setattr__(self, "rules", state["rules"])
        object.__setattr__(self, "_cache", {})

    def __str__(self) -> str:
        return program_to_gdl(self)


# ---------------------------------------------------------------- printing


def term_to_gdl(t: Term) -> str:
    if type(t) is str:
        return t
    if type(t) is Var:
        return "?" + t.name
    return "(" + " ".join([t.functor, *map(term_to_gdl, t.args)]) + ")"


def atom_to_gdl(a: Atom) -> str:
    if not a.args:
        return a.predicate
    return "(" + " ".join([a.predicate, *map(term_to_gdl, a.args)]) + ")"


def literal_to_gdl(l: Literal) -> str:
    return atom_to_gdl(l.atom) if l.positive else f"(not {atom_to_gdl(l.atom)})"


def rule_to_gdl(r: Rule) -> str:
    return "(<= " + " ".join([atom_to_gdl(r.head), *map(literal_to_gdl, r.body)]) + ")"


def program_to_gdl(p: Program) -> str:
    lines = [atom_to_gdl(f) for f in p.facts]
    lines += [rule_to_gdl(r) for r in p.rules]
    return "\n".join(lines) + ("\n" if lines else "")


def _prolog_var(v: Var) -> str:
    name = v.name
    return name if name[:1].isupper() or name[:1] == "_" else "V" + name


def term_to_prolog(t: Term) -> str:
    if type(t) is str:
        return t
    if type(t) is Var:
        return _prolog_var(t)
    return t.functor + "(" + ",".join(map(term_to_prolog, t.args)) + ")"


def atom_to_prolog(a: Atom) -> str:
    if not a.args:
        return a.predicate
    return a.predicate + "(" + ",".join(map(term_to_prolog, a.args)) + ")"


def rule_to_prolog(r: Rule) -> str:
    body = ", ".join(atom_to_prolog(l.atom) if l.positive else "\\+ " + atom_to_prolog(l.atom) for l in r.body)
    return f"{atom_to_prolog(r.head)} :- {body}."
