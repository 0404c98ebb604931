"""Type signatures for game descriptions.

A signature file is a sequence of period-terminated statements::

    true, next :: prop -> bool.
    at :: pos -> pos -> cell -> prop.
    red, black :: agent.
    agent :> cell.

``t1 :> t2`` declares ``t1`` a subtype of ``t2``.  Lines starting with ``%``
are comments.  Predicates are symbols whose result type is ``bool``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property

from .errors import (
    EnumerationCapExceeded,
    IllTyped,
    ParseError,
    SignatureError,
    UndeclaredSymbol,
)
from .gdl.strata import BUILTINS
from .gdl.terms import Atom, Compound, Program, Term, Var, term_key

BOOL = "bool"
DEFAULT_MAX_ATOMS = 10**7

_NAME = re.compile(r"^[^\s,:>()]+$")


@dataclass(frozen=True)
class Decl:
    args: tuple
    result: str


@dataclass(frozen=True)
class TypeSignature:
    decls: dict = field(default_factory=dict)
    subtypes: frozenset = frozenset()  # pairs (sub, super) as written `sub :> super`

    @cached_property
    def types(self) -> frozenset:
        ts = {BOOL}
        for d in self.decls.values():
            ts.add(d.result)
            ts.update(d.args)
        return frozenset(ts)

    @cached_property
    def _supers(self) -> dict:
        # reflexive transitive closure
        up = {t: {t} for t in self.types}
        for a, b in self.subtypes:
            up[a].add(b)
        changed = True
        while changed:
            changed = False
            for t in up:
                extra = set().union(*(up[s] for s in up[t])) - up[t]
                if extra:
                    up[t] |= extra
                    changed = True
        return {t: frozenset(s) for t, s in up.items()}

    def subtype(self, t1: str, t2: str) -> bool:
        for t in (t1, t2):
            if t not in self.types:
                raise SignatureError(f"unknown type {t!r}")
        return t2 in self._supers[t1]

    def decl(self, symbol: str) -> Decl:
        try:
            return self.decls[symbol]
        except KeyError:
            raise UndeclaredSymbol(symbol) from None

    def predicates(self) -> list[str]:
        return sorted(s for s, d in self.decls.items() if d.result == BOOL)

    # -- typing

    def well_formed(self, term) -> str:
        """Type of a ground term (atoms have type ``bool``)."""
        if isinstance(term, Atom):
            sym, args = term.predicate, term.args
        elif type(term) is Compound:
            sym, args = term.functor, term.args
        elif type(term) is Var:
            raise IllTyped(term, 0, "variables have no type")
        else:
            sym, args = term, ()
        d = self.decl(sym)
        if len(d.args) != len(args):
            raise IllTyped(term, 0, f"{sym} takes {len(d.args)} arguments, got {len(args)}")
        for i, (want, arg) in enumerate(zip(d.args, args), start=1):
            try:
                got = self.well_formed(arg)
            except UndeclaredSymbol as e:
                raise IllTyped(term, i, str(e)) from None
            if not self.subtype(got, want):
                raise IllTyped(term, i, f"{got} is not a subtype of {want}")
        return d.result

    # -- enumeration

    def inhabitants(self, t: str) -> tuple:
        """All ground terms whose type is a subtype of ``t``, canonically ordered."""
        return self._inhabitants_cache(t)

    @cached_property
    def _inhabitant_table(self) -> dict:
        return {}

    def _inhabitants_cache(self, t: str) -> tuple:
        table = self._inhabitant_table
        if t not in table:
            self._check_finite()
            out = []
            for sym in sorted(self.decls):
                d = self.decls[sym]
                if d.result == BOOL or not self.subtype(d.result, t):
                    continue
                if not d.args:
                    out.append(sym)
                else:
                    pools = [self._inhabitants_cache(a) for a in d.args]
                    out.extend(Compound(sym, combo) for combo in itertools.product(*pools))
            table[t] = tuple(sorted(out, key=term_key))
        return table[t]

    def count_ground(self, predicate: str) -> int:
        d = self.decl(predicate)
        return math.prod(len(self.inhabitants(a)) for a in d.args)

    def ground_atoms(self, predicate: str, max_atoms: int = DEFAULT_MAX_ATOMS) -> list[Atom]:
        d = self.decl(predicate)
        if d.result != BOOL:
            raise SignatureError(f"{predicate} is declared as a function, not a predicate")
        total = self.count_ground(predicate)
        if total > max_atoms:
            raise EnumerationCapExceeded(
                f"ground({predicate}) has {total} atoms, above the cap of {max_atoms}"
            )
        pools = [self.inhabitants(a) for a in d.args]
        return [Atom(predicate, combo) for combo in itertools.product(*pools)]

    def _check_finite(self) -> None:
        if getattr(self, "_finite_ok", False):
            return
        # type t depends on the argument types of every constructor producing a subtype of t
        deps = {t: set() for t in self.types}
        for sym, d in self.decls.items():
            if not d.args or d.result == BOOL:
                continue
            for t in self.types:
                if self.subtype(d.result, t):
                    deps[t].update(d.args)
        state: dict[str, int] = {}

        def visit(t, path):
            state[t] = 1
            for u in deps[t]:
                if state.get(u) == 1:
                    cyc = path[path.index(u):] + [u] if u in path else [t, u]
                    raise SignatureError("recursive signature (infinite terms): " + " -> ".join(cyc))
                if u not in state:
                    visit(u, path + [u])
            state[t] = 2

        for t in sorted(self.types):
            if t not in state:
                visit(t, [t])
        object.__setattr__(self, "_finite_ok", True)

    # -- checking descriptions

    def check_program(self, p: Program) -> None:
        """Every symbol of ``p`` must be declared with a matching arity."""

        def check(sym, n, where):
            if sym in BUILTINS:
                return
            d = self.decls.get(sym)
            if d is None:
                raise UndeclaredSymbol(sym, f" (used in {where})")
            if len(d.args) != n:
                raise SignatureError(
                    f"{sym} declared with {len(d.args)} arguments but used with {n} in {where}"
                )

        def walk(t, where):
            if type(t) is Compound:
                check(t.functor, len(t.args), where)
                for a in t.args:
                    walk(a, where)
            elif type(t) is str:
                check(t, 0, where)

        atoms = [(f, f"fact {f}") for f in p.facts]
        for r in p.rules:
            atoms.append((r.head, f"rule {r}"))
            atoms.extend((l.atom, f"rule {r}") for l in r.body)
        for a, where in atoms:
            check(a.predicate, len(a.args), where)
            for t in a.args:
                walk(t, where)


def _strip_comments(text: str) -> list[tuple[int, str]]:
    lines = []
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.split("%", 1)[0]
        lines.append((no, s))
    return lines


def _statements(text: str):
    buf, start = [], None
    for no, line in _strip_comments(text):
        rest = line
        while rest:
            if start is None and rest.strip():
                start = no
            m = re.search(r"\.(?=\s|$)", rest)
            if m is None:
                buf.append(rest)
                break
            buf.append(rest[: m.start()])
            stmt = " ".join(buf).strip()
            if stmt:
                yield start, stmt
            buf, start = [], None
            rest = rest[m.end():]
    leftover = " ".join(buf).strip()
    if leftover:
        raise ParseError("statement not terminated by '.'", start, 1)


def parse_signature(text: str) -> TypeSignature:
    decls: dict[str, Decl] = {}
    subs: list[tuple[str, str, int]] = []
    for line, stmt in _statements(text):
        if "::" in stmt:
            names, _, typ = stmt.partition("::")
            symbols = [s.strip() for s in names.split(",")]
            parts = [t.strip() for t in typ.split("->")]
            if not all(symbols) or not all(parts):
                raise ParseError(f"malformed declaration {stmt!r}", line, 1)
            for s in symbols + parts:
                if not _NAME.match(s):
                    raise ParseError(f"bad name {s!r}", line, 1)
            d = Decl(tuple(parts[:-1]), parts[-1])
            for s in symbols:
                if s in decls:
                    raise SignatureError(f"line {line}: {s!r} declared more than once")
                decls[s] = d
        elif ":>" in stmt:
            a, _, b = stmt.partition(":>")
            a, b = a.strip(), b.strip()
            if not (_NAME.match(a or " ") and _NAME.match(b or " ")):
                raise ParseError(f"malformed subtype statement {stmt!r}", line, 1)
            subs.append((a, b, line))
        else:
            raise ParseError(f"expected '::' or ':>' in {stmt!r}", line, 1)

    sig = TypeSignature(decls, frozenset((a, b) for a, b, _ in subs))
    for a, b, line in subs:
        for t in (a, b):
            if t not in sig.types:
                raise SignatureError(f"line {line}: unknown type {t!r} in '{a} :> {b}'")
    for a, b, line in subs:
        if a != b and sig.subtype(b, a):
            raise SignatureError(f"line {line}: cyclic subtype chain between {a!r} and {b!r}")
    return sig


def subtype(sig: TypeSignature, t1: str, t2: str) -> bool:
    return sig.subtype(t1, t2)


def well_formed(sig: TypeSignature, term: Term | Atom) -> str:
    return sig.well_formed(term)


def ground_atoms(sig: TypeSignature, predicate: str, max_atoms: int = DEFAULT_MAX_ATOMS) -> list[Atom]:
    return sig.ground_atoms(predicate, max_atoms)
