from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iggp.bundles import BUNDLED, load_bundle
from iggp.errors import (
    EnumerationCapExceeded,
    IllTyped,
    ParseError,
    SignatureError,
    UndeclaredSymbol,
)
from iggp.gdl import Atom, Compound, parse_program
from iggp.signature import ground_atoms, parse_signature, subtype, well_formed

from oracles import brute_force_atoms

CHECKERS = """
true, next :: prop -> bool.
at :: pos -> pos -> cell -> prop.
red, black :: agent.
blank :: cell.
1, 2, 3, 4, 5 :: pos.
agent :> cell.
legal :: agent -> move -> bool.
"""

ONE_PLAYER = """
legal :: agent -> move -> bool.
p1 :: agent.
up, down, left, right :: move.
terminal :: bool.
"""


def test_constants():
    sig = parse_signature("red, black :: agent.")
    assert sig.decl("red").result == "agent" and sig.decl("red").args == ()
    assert sig.decl("black").result == "agent"


def test_subtype_declaration():
    sig = parse_signature(CHECKERS)
    assert subtype(sig, "agent", "cell")
    assert not subtype(sig, "cell", "agent")
    assert subtype(sig, "pos", "pos")


def test_empty_signature():
    sig = parse_signature("")
    assert sig.decls == {}
    assert parse_signature("% nothing here\n").decls == {}


def test_subtype_is_transitive():
    sig = parse_signature("a :: t1. b :: t2. c :: t3. t1 :> t2. t2 :> t3.")
    assert subtype(sig, "t1", "t3")
    assert not subtype(sig, "t3", "t1")


@pytest.mark.parametrize(
    "text,err",
    [
        ("a :: t. a :: u.", SignatureError),
        ("a :: t. t :> nosuch.", SignatureError),
        ("a :: t. b :: u. t :> u. u :> t.", SignatureError),
        ("a :: t", ParseError),
        ("a t.", ParseError),
        (":: t.", ParseError),
    ],
)
def test_bad_signatures(text, err):
    with pytest.raises(err):
        parse_signature(text)


def test_well_formed_atom():
    sig = parse_signature(CHECKERS)
    t = Atom("true", (Compound("at", ("3", "4", "black")),))
    assert well_formed(sig, t) == "bool"


def test_well_formed_term():
    sig = parse_signature(CHECKERS)
    assert well_formed(sig, Compound("at", ("3", "4", "blank"))) == "prop"


def test_ill_typed_position():
    sig = parse_signature(CHECKERS)
    with pytest.raises(IllTyped) as e:
        well_formed(sig, Compound("at", ("black", "4", "blank")))
    assert e.value.position == 1


def test_one_player_legal():
    sig = parse_signature(ONE_PLAYER)
    got = set(ground_atoms(sig, "legal"))
    assert got == {Atom("legal", ("p1", m)) for m in ("up", "down", "left", "right")}


def test_nullary():
    assert ground_atoms(parse_signature(ONE_PLAYER), "terminal") == [Atom("terminal")]


def test_undeclared_predicate():
    with pytest.raises(UndeclaredSymbol):
        ground_atoms(parse_signature(ONE_PLAYER), "goal")


def test_fizz_buzz_legal_family():
    # integers 0..31 and the three words
    _, sig = load_bundle("fizz_buzz")
    atoms = ground_atoms(sig, "legal")
    assert len(atoms) == 35
    assert Atom("legal", ("player", Compound("say", ("fizzbuzz",)))) in atoms


def test_enumeration_cap():
    sig = parse_signature("p :: n -> n -> n -> bool. " + " ".join(f"c{i} :: n." for i in range(30)))
    assert sig.count_ground("p") == 27000
    with pytest.raises(EnumerationCapExceeded):
        ground_atoms(sig, "p", max_atoms=1000)


def test_recursive_signature_rejected():
    sig = parse_signature("z :: nat. s :: nat -> nat. p :: nat -> bool.")
    with pytest.raises(SignatureError):
        ground_atoms(sig, "p")


def test_closed_under_subtyping():
    sig = parse_signature(CHECKERS)
    atoms = set(ground_atoms(sig, "true"))
    assert Atom("true", (Compound("at", ("1", "1", "red")),)) in atoms
    assert Atom("true", (Compound("at", ("1", "1", "blank")),)) in atoms
    assert len(atoms) == 5 * 5 * 3


@pytest.mark.parametrize("text,pred", [(CHECKERS, "true"), (CHECKERS, "legal"), (ONE_PLAYER, "legal")])
def test_matches_brute_force(text, pred):
    sig = parse_signature(text)
    assert set(ground_atoms(sig, pred)) == brute_force_atoms(sig, pred)


@st.composite
def small_signatures(draw):
    types = ["t0", "t1", "t2"]
    lines = []
    n = 0
    for t in types:
        for _ in range(draw(st.integers(0, 3))):
            lines.append(f"k{n} :: {t}.")
            n += 1
    # constructors only build a higher-numbered type from lower ones, so no recursion
    if draw(st.booleans()):
        lines.append("f :: t0 -> t1 -> t2.")
    if draw(st.booleans()):
        lines.append("t0 :> t1.")
    if draw(st.booleans()):
        lines.append("t1 :> t2.")
    arity = draw(st.integers(0, 2))
    args = [draw(st.sampled_from(types)) for _ in range(arity)]
    lines.append("p :: " + " -> ".join(args + ["bool"]) + ".")
    lines.append("anchor :: t0 -> t1 -> t2 -> bool.")
    return "\n".join(lines)


@settings(max_examples=100, deadline=None)
@given(small_signatures())
def test_ground_atoms_property(text):
    sig = parse_signature(text)
    atoms = ground_atoms(sig, "p")
    assert set(atoms) == brute_force_atoms(sig, "p")
    assert len(atoms) == sig.count_ground("p")
    for a in atoms:
        assert well_formed(sig, a) == "bool"


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_signatures_cover_their_games(name):
    p, sig = load_bundle(name)
    for f in p.facts:
        assert well_formed(sig, f) == "bool"


def test_check_program_names_the_symbol():
    sig = parse_signature(ONE_PLAYER)
    with pytest.raises(UndeclaredSymbol) as e:
        sig.check_program(parse_program("(legal p1 sideways)"))
    assert e.value.symbol == "sideways"
