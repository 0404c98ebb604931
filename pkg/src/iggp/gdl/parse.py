"""Readers for game descriptions and hypotheses.

Two surface syntaxes produce the same :class:`Program`:

* KIF-style prefix GDL, ``(<= (next (step ?n)) (true (step ?m)) (succ ?m ?n))``
* Prolog-style clauses, ``next_step(N) :- true_step(M), succ(M,N).``
"""

from __future__ import annotations

import re
from typing import Iterable

from ..errors import ArityError, ParseError
from .terms import Atom, Compound, Literal, Program, Rule, Term, Var

_UNSUPPORTED = {"or", "and", "=>"}


# ------------------------------------------------------------------ prefix GDL


class _Sym(str):
    """Symbol token that remembers where it came from."""

    line: int
    column: int


class _List(list):
    line: int
    column: int


def _tokens(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c.isspace():
            col += 1
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, line, col
            i += 1
            col += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield text[i:j], line, col
            col += j - i
            i = j


def read_sexprs(text: str) -> list:
    stack: list[_List] = []
    top: list = []
    for tok, line, col in _tokens(text):
        if tok == "(":
            lst = _List()
            lst.line, lst.column = line, col
            stack.append(lst)
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            (stack[-1] if stack else top).append(done)
        else:
            sym = _Sym(tok)
            sym.line, sym.column = line, col
            (stack[-1] if stack else top).append(sym)
    if stack:
        raise ParseError("unbalanced '(' (missing ')')", stack[-1].line, stack[-1].column)
    return top


def _where(x):
    return getattr(x, "line", None), getattr(x, "column", None)


def _term(x) -> Term:
    if isinstance(x, _List):
        if not x:
            raise ParseError("empty term '()'", *_where(x))
        head = x[0]
        if isinstance(head, _List):
            raise ParseError("functor must be a symbol", *_where(head))
        if head.startswith("?"):
            raise ParseError(f"variable {head} used as a functor", *_where(head))
        if len(x) == 1:
            raise ParseError(f"compound term ({head}) has no arguments", *_where(x))
        return Compound(str(head), tuple(_term(a) for a in x[1:]))
    if x.startswith("?"):
        if len(x) == 1:
            raise ParseError("empty variable name '?'", *_where(x))
        return Var(x[1:])
    return str(x)


def _atom(x, what: str = "atom") -> Atom:
    if isinstance(x, _List):
        if not x or isinstance(x[0], _List):
            raise ParseError(f"malformed {what}", *_where(x))
        pred = x[0]
        if pred.startswith("?"):
            raise ParseError(f"variable {pred} in predicate position", *_where(pred))
        if pred in _UNSUPPORTED:
            raise ParseError(f"connective '{pred}' is not supported; rewrite as separate rules", *_where(pred))
        if pred in ("<=", "not"):
            raise ParseError(f"'{pred}' cannot appear as an {what}", *_where(pred))
        return Atom(str(pred), tuple(_term(a) for a in x[1:]))
    if x.startswith("?"):
        raise ParseError(f"variable {x} cannot be an {what}", *_where(x))
    if x in ("<=", "not"):
        raise ParseError(f"'{x}' cannot appear as an {what}", *_where(x))
    return Atom(str(x), ())


def _literal(x) -> Literal:
    if isinstance(x, _List) and x and x[0] == "not":
        if len(x) != 2:
            raise ParseError("(not ...) takes exactly one literal", *_where(x))
        inner = x[1]
        if isinstance(inner, _List) and inner and inner[0] == "not":
            raise ParseError("double negation is not supported", *_where(inner))
        return Literal(_atom(inner, "negated atom"), False)
    return Literal(_atom(x, "body literal"), True)


def parse_program(text: str) -> Program:
    """Parse prefix-notation GDL into a validated :class:`Program`."""
    facts: list[Atom] = []
    rules: list[Rule] = []
    for x in read_sexprs(text):
        if isinstance(x, _List) and x and x[0] == "<=":
            if len(x) < 2:
                raise ParseError("rule without a head", *_where(x))
            if len(x) < 3:
                raise ParseError("'<=' with no body; write the head as a fact instead", *_where(x))
            head_src = x[1]
            if isinstance(head_src, _List) and head_src and head_src[0] == "not":
                raise ParseError("rule head cannot be negated", *_where(head_src))
            head = _atom(head_src, "rule head")
            rules.append(Rule(head, tuple(_literal(b) for b in x[2:])))
        else:
            fact = _atom(x, "fact")
            if not fact.is_ground():
                raise ParseError(f"fact {fact} is not ground", *_where(x))
            facts.append(fact)
    return make_program(facts, rules)


# ------------------------------------------------------------------ Prolog style

_PL_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<naf>\\\+)
  | (?P<punct>[(),.])
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z0-9][A-Za-z0-9_]*|'[^']*')
    """,
    re.VERBOSE,
)


def _pl_tokens(text: str):
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _PL_TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        val = m.group()
        if kind != "ws":
            yield kind, val, line, m.start() - line_start + 1
        nl = val.count("\n")
        if nl:
            line += nl
            line_start = m.start() + val.rindex("\n") + 1
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


class _PrologReader:
    def __init__(self, text: str):
        self.toks = list(_pl_tokens(text))
        self.i = 0
        self.anon = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (val and tok[1] != val):
            want = val or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def name(self) -> str:
        _, val, _, _ = self.take("name")
        return val[1:-1] if val.startswith("'") else val

    def args(self) -> tuple:
        if self.peek()[1] != "(":
            return ()
        self.take(val="(")
        out = [self.term()]
        while self.peek()[1] == ",":
            self.take(val=",")
            out.append(self.term())
        self.take(val=")")
        return tuple(out)

    def term(self) -> Term:
        kind, val, line, col = self.peek()
        if kind == "var":
            self.take()
            if val == "_":
                self.anon += 1
                return Var(f"_G{self.anon}")
            return Var(val)
        f = self.name()
        args = self.args()
        return Compound(f, args) if args else f

    def atom(self) -> Atom:
        if self.peek()[0] == "var":
            _, val, line, col = self.peek()
            raise ParseError(f"variable {val} cannot be an atom", line, col)
        pred = self.name()
        return Atom(pred, self.args())

    def literal(self) -> Literal:
        kind, val, _, _ = self.peek()
        if kind == "naf":
            self.take()
            return Literal(self.atom(), False)
        if kind == "name" and val == "not" and self.toks[self.i + 1][1] == "(":
            self.take()
            self.take(val="(")
            a = self.atom()
            self.take(val=")")
            return Literal(a, False)
        return Literal(self.atom(), True)

    def clauses(self):
        while self.peek()[0] != "eof":
            _, _, line, col = self.peek()
            head = self.atom()
            if self.peek()[0] == "neck":
                self.take()
                body = [self.literal()]
                while self.peek()[1] == ",":
                    self.take(val=",")
                    body.append(self.literal())
                self.take(val=".")
                yield Rule(head, tuple(body)), line, col
            else:
                self.take(val=".")
                yield head, line, col


def parse_prolog(text: str) -> Program:
    """Parse Prolog-style clauses (``\\+`` or ``not(...)`` for negation)."""
    facts, rules = [], []
    for clause, line, col in _PrologReader(text).clauses():
        if isinstance(clause, Rule):
            rules.append(clause)
        elif not clause.is_ground():
            raise ParseError(f"fact {clause} is not ground", line, col)
        else:
            facts.append(clause)
    return make_program(facts, rules)


def parse_any(text: str, filename: str = "") -> Program:
    """Pick the reader from the file extension (``.pl`` means Prolog style)."""
    if filename.endswith((".pl", ".pro", ".prolog")):
        return parse_prolog(text)
    return parse_program(text)


# ------------------------------------------------------------------ validation


def _collect_arities(atom: Atom, arities: dict, origin: dict, where: str):
    def note(sym, n):
        prev = arities.setdefault(sym, n)
        if prev != n:
            raise ArityError(
                f"symbol {sym!r} used with arity {prev} ({origin[sym]}) and arity {n} ({where})"
            )
        origin.setdefault(sym, where)

    def walk(t):
        if type(t) is Compound:
            note(t.functor, len(t.args))
            for a in t.args:
                walk(a)
        elif type(t) is str:
            note(t, 0)

    note(atom.predicate, len(atom.args))
    for t in atom.args:
        walk(t)


def check_arities(facts: Iterable[Atom], rules: Iterable[Rule]) -> dict[str, int]:
    arities: dict[str, int] = {}
    origin: dict[str, str] = {}
    for f in facts:
        _collect_arities(f, arities, origin, f"fact {f}")
    for r in rules:
        where = f"rule {r}"
        _collect_arities(r.head, arities, origin, where)
        for l in r.body:
            _collect_arities(l.atom, arities, origin, where)
    return arities


def make_program(facts: Iterable[Atom], rules: Iterable[Rule]) -> Program:
    """Validate and assemble; duplicate facts keep their first position."""
    facts = list(dict.fromkeys(facts))
    rules = list(rules)
    for f in facts:
        if not f.is_ground():
            raise ParseError(f"fact {f} is not ground")
        if f.predicate == "distinct":
            raise ParseError("distinct is a builtin and cannot be asserted as a fact")
    for r in rules:
        if r.head.predicate == "distinct":
            raise ParseError(f"rule head cannot be the builtin distinct: {r}")
        for l in r.body:
            if l.atom.predicate == "distinct" and len(l.atom.args) != 2:
                raise ArityError(f"distinct takes two arguments: {r}")
    check_arities(facts, rules)
    return Program(tuple(facts), tuple(rules))
