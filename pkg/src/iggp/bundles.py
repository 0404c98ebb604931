"""Reference games shipped with the package."""

from __future__ import annotations

from importlib import resources
from typing import NamedTuple

from .errors import UnknownGame
from .gdl import parse_program, stratify, validate_safety
from .gdl.terms import Program
from .signature import TypeSignature, parse_signature

BUNDLED = ("rock_paper_scissors", "fizz_buzz", "minimal_decay", "buttons_and_lights")


class GameBundle(NamedTuple):
    name: str
    gdl: str
    signature: str
    provenance: str


def _dir(name: str):
    if name not in BUNDLED:
        raise UnknownGame(f"no bundled game named {name!r}; known: {', '.join(BUNDLED)}")
    return resources.files("iggp") / "games" / name


def bundle(name: str) -> GameBundle:
    d = _dir(name)
    return GameBundle(
        name,
        (d / "game.gdl").read_text(encoding="utf-8"),
        (d / "signature.sig").read_text(encoding="utf-8"),
        (d / "PROVENANCE.txt").read_text(encoding="utf-8"),
    )


def bundle_path(name: str, filename: str = "game.gdl"):
    return _dir(name) / filename


def load_bundle(name: str) -> tuple[Program, TypeSignature]:
    """Parsed, safety-checked, stratified and type-checked game and signature."""
    b = bundle(name)
    p = parse_program(b.gdl)
    validate_safety(p)
    stratify(p)
    sig = parse_signature(b.signature)
    sig.check_program(p)
    return p, sig
