"""Train/validate/test splits and their on-disk layout::

    <root>/<game>/game.gdl
    <root>/<game>/signature.sig
    <root>/<game>/<target>/{train,validate,test}.triples
    <root>/<game>/<target>/multiplicity.tsv

A ``.triples`` file is a list of records::

    #triple 0
    #bk
    succ(0,1).
    #pos
    next_step(1).
    #neg
    next_step(0).

Atoms inside a section are sorted by their text, so writing is byte-stable.
"""

from __future__ import annotations

import hashlib
import os
import random
import re
import shutil
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DatasetFormatError
from .extract import TARGETS, Triple
from .gdl.terms import Atom, atom_to_prolog

SPLITS = ("train", "validate", "test")
MIN_SPLITTABLE = 6


@dataclass
class TaskSplit:
    train: list = field(default_factory=list)
    validate: list = field(default_factory=list)
    test: list = field(default_factory=list)
    # how many times each triple occurred before de-duplication, aligned with the split lists
    counts: dict = field(default_factory=dict)

    @property
    def unsplit(self) -> bool:
        """True when there were too few triples to split and all went to train."""
        return 0 < len(self.train) < MIN_SPLITTABLE and not self.validate and not self.test

    def split(self, name: str) -> list:
        return getattr(self, name)


@dataclass
class GameData:
    name: str
    gdl: str
    signature: str
    tasks: dict = field(default_factory=dict)


@dataclass
class Dataset:
    games: dict = field(default_factory=dict)

    def task(self, game: str, target: str) -> TaskSplit:
        return self.games[game].tasks[target]

    def tasks(self):
        for g in sorted(self.games):
            for t in TARGETS:
                if t in self.games[g].tasks:
                    yield g, t, self.games[g].tasks[t]


def _derived_seed(*parts) -> int:
    h = hashlib.blake2b("\x1f".join(map(str, parts)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def split_sizes(n: int) -> tuple[int, int, int]:
    """4:1:1 with the remainder going to train; tiny sets all go to train."""
    if n < MIN_SPLITTABLE:
        return n, 0, 0
    k = n // 6
    return n - 2 * k, k, k


def dedupe(triples: Sequence[Triple]) -> tuple[list[Triple], list[int]]:
    seen: dict[Triple, int] = {}
    for t in triples:
        seen[t] = seen.get(t, 0) + 1
    return list(seen), list(seen.values())


def split_task(triples: Sequence[Triple], seed: int, game: str = "", target: str = "") -> TaskSplit:
    unique, mult = dedupe(triples)
    order = list(range(len(unique)))
    random.Random(_derived_seed(seed, game, target)).shuffle(order)
    a, b, _ = split_sizes(len(order))
    parts = {"train": order[:a], "validate": order[a:a + b], "test": order[a + b:]}
    ts = TaskSplit()
    for name, idx in parts.items():
        setattr(ts, name, [unique[i] for i in idx])
        ts.counts[name] = [mult[i] for i in idx]
    return ts


def build_dataset(
    triples: Mapping[str, Sequence[Triple]],
    seed: int,
    game: str = "game",
    gdl: str = "",
    signature: str = "",
) -> Dataset:
    """Seeded shuffle then 4:1:1 split, independently per target."""
    gd = GameData(game, gdl, signature)
    for target in TARGETS:
        if target in triples:
            gd.tasks[target] = split_task(triples[target], seed, game, target)
    return Dataset({game: gd})


# ---------------------------------------------------------------- writing


def _atom_line(a: Atom, cache: dict) -> str:
    s = cache.get(a)
    if s is None:
        s = cache[a] = atom_to_prolog(a) + "."
    return s


def format_triples(triples: Sequence[Triple], cache: dict | None = None) -> str:
    cache = {} if cache is None else cache
    out = []
    for i, t in enumerate(triples):
        out.append(f"#triple {i}")
        for header, atoms in (("#bk", t.bk), ("#pos", t.pos), ("#neg", t.neg)):
            out.append(header)
            out.extend(sorted(_atom_line(a, cache) for a in atoms))
    return "\n".join(out) + ("\n" if out else "")


@contextmanager
def atomic_dir(path):
    """Yield a scratch directory that replaces ``path`` only on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{path.name}.", dir=path.parent))
    try:
        yield tmp
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    old = None
    if path.exists():
        old = path.with_name(f".{path.name}.old.{os.getpid()}")
        os.replace(path, old)
    os.replace(tmp, path)
    if old is not None:
        shutil.rmtree(old, ignore_errors=True)


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_into(d: Dataset, root: Path) -> None:
    cache: dict = {}
    for name, gd in sorted(d.games.items()):
        gdir = root / name
        gdir.mkdir(parents=True, exist_ok=True)
        (gdir / "game.gdl").write_text(gd.gdl, encoding="utf-8")
        (gdir / "signature.sig").write_text(gd.signature, encoding="utf-8")
        for target, ts in gd.tasks.items():
            tdir = gdir / target
            tdir.mkdir(exist_ok=True)
            rows = []
            for split in SPLITS:
                (tdir / f"{split}.triples").write_text(format_triples(ts.split(split), cache), encoding="utf-8")
                rows += [f"{split}\t{i}\t{c}" for i, c in enumerate(ts.counts.get(split, []))]
            (tdir / "multiplicity.tsv").write_text("\n".join(rows) + ("\n" if rows else ""), encoding="utf-8")


def write_dataset(d: Dataset, directory, extra_files: Mapping[str, str] | None = None) -> None:
    """Write atomically: the directory appears complete or not at all."""
    with atomic_dir(directory) as tmp:
        _write_into(d, tmp)
        for rel, text in (extra_files or {}).items():
            (tmp / rel).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- reading

_FLAT = re.compile(r"^([^(),\s]+?)(?:\(([^()\s]*)\))?\.$")


def parse_flat_atom(line: str, lineno: int = 0, path: str = "") -> Atom:
    m = _FLAT.match(line)
    if not m:
        col = 1
        if not line.endswith("."):
            col = len(line) + 1
        elif "(" in line and not line.endswith(")."):
            col = line.index("(") + 1
        raise DatasetFormatError(f"{path}: malformed atom {line!r}", lineno, col)
    pred, inner = m.group(1), m.group(2)
    if inner is None:
        return Atom(pred, ())
    args = tuple(inner.split(","))
    if not all(args):
        raise DatasetFormatError(f"{path}: empty argument in {line!r}", lineno, line.index("(") + 2)
    return Atom(pred, args)


def parse_triples(text: str, target: str, path: str = "") -> list[Triple]:
    triples: list[Triple] = []
    cache: dict[str, Atom] = {}
    cur = None
    section = None
    expected = 0

    def finish():
        if cur is not None:
            if set(cur) != {"#bk", "#pos", "#neg"}:
                missing = {"#bk", "#pos", "#neg"} - set(cur)
                raise DatasetFormatError(f"{path}: triple {expected - 1} lacks {sorted(missing)}", lineno, 1)
            triples.append(Triple(frozenset(cur["#bk"]), frozenset(cur["#pos"]), frozenset(cur["#neg"]), target))

    lineno = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#triple"):
            finish()
            parts = line.split()
            if len(parts) != 2 or parts[1] != str(expected):
                raise DatasetFormatError(f"{path}: expected '#triple {expected}'", lineno, 1)
            expected += 1
            cur, section = {}, None
        elif line in ("#bk", "#pos", "#neg"):
            if cur is None:
                raise DatasetFormatError(f"{path}: section {line} before any #triple", lineno, 1)
            if line in cur:
                raise DatasetFormatError(f"{path}: duplicate section {line}", lineno, 1)
            section = line
            cur[section] = []
        else:
            if section is None:
                raise DatasetFormatError(f"{path}: atom outside a section", lineno, 1)
            atom = cache.get(line)
            if atom is None:
                atom = cache[line] = parse_flat_atom(line, lineno, path)
            cur[section].append(atom)
    finish()
    return triples


def read_dataset(directory) -> Dataset:
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {root}")
    d = Dataset()
    for gdir in sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith(".")):
        if not (gdir / "game.gdl").exists():
            continue
        gd = GameData(
            gdir.name,
            (gdir / "game.gdl").read_text(encoding="utf-8"),
            (gdir / "signature.sig").read_text(encoding="utf-8"),
        )
        for target in TARGETS:
            tdir = gdir / target
            if not tdir.is_dir():
                continue
            ts = TaskSplit()
            for split in SPLITS:
                f = tdir / f"{split}.triples"
                setattr(ts, split, parse_triples(f.read_text(encoding="utf-8"), target, str(f)))
            ts.counts = _read_counts(tdir / "multiplicity.tsv", ts)
            gd.tasks[target] = ts
        d.games[gd.name] = gd
    return d


def _read_counts(path: Path, ts: TaskSplit) -> dict:
    counts = {s: [1] * len(ts.split(s)) for s in SPLITS}
    if not path.exists():
        return counts
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        parts = line.split("\t")
        try:
            split, idx, c = parts[0], int(parts[1]), int(parts[2])
            counts[split][idx] = c
        except (ValueError, IndexError, KeyError):
            raise DatasetFormatError(f"{path}: bad multiplicity row {line!r}", lineno, 1) from None
    return counts
