"""Command-line front end: ``iggp {parse,simulate,gen,baseline,eval}``.

Every command that writes output also writes ``<out>.manifest.json`` next to
it, recording what is needed to rerun it and a digest of what it produced.
Exit status is 0 on success, 1 for domain errors and 2 for I/O or usage
errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from pathlib import Path

from . import __version__
from .baselines import METHODS
from .bundles import BUNDLED, bundle_path
from .datasets import Dataset, atomic_write_text, build_dataset, read_dataset, write_dataset
from .errors import IGGPError
from .evaluate import EvalReport, Method, score
from .extract import TARGETS, extract_all
from .gdl import parse_any, stratify, validate_safety
from .signature import parse_signature
from .tracegen import DEFAULT_MAX_TIME, DEFAULT_SEED, DEFAULT_TRACES, EpisodeConfig, format_traces, generate_traces


class GameSource:
    """A game file (or bundled game name) resolved to text and a dataset name."""

    def __init__(self, spec: str, sig: str | None = None):
        path = Path(spec)
        if not path.exists() and spec in BUNDLED:
            self.name = spec
            self.path = spec
            self.text = bundle_path(spec).read_text(encoding="utf-8")
            self.sig_text = (
                Path(sig).read_text(encoding="utf-8")
                if sig
                else bundle_path(spec, "signature.sig").read_text(encoding="utf-8")
            )
            self.sig_path = sig or f"{spec}:signature.sig"
            return
        self.path = str(path)
        self.text = path.read_text(encoding="utf-8")
        self.name = path.parent.name if path.stem == "game" and path.parent.name else path.stem
        sig_path = Path(sig) if sig else path.with_name("signature.sig") if path.name == "game.gdl" else path.with_suffix(".sig")
        self.sig_path = str(sig_path)
        self._sig_file = sig_path
        self.sig_text = None

    def signature_text(self) -> str:
        if self.sig_text is None:
            self.sig_text = self._sig_file.read_text(encoding="utf-8")
        return self.sig_text

    def program(self):
        p = parse_any(self.text, self.path)
        validate_safety(p)
        stratify(p)
        return p


# ---------------------------------------------------------------- manifests


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_path(path) -> str:
    """sha256 of a file, or of a directory's relative paths and contents."""
    path = Path(path)
    if path.is_file():
        return digest_bytes(path.read_bytes())
    h = hashlib.sha256()
    for f in sorted(p for p in path.rglob("*") if p.is_file()):
        h.update(f.relative_to(path).as_posix().encode() + b"\0")
        h.update(digest_bytes(f.read_bytes()).encode() + b"\n")
    return h.hexdigest()


def write_manifest(out, command: str, games: list, seed, config: dict) -> dict:
    manifest = {
        "command": command,
        "games": games,
        "seed": seed,
        "config": config,
        "version": __version__,
        "output_digest": digest_path(out),
    }
    atomic_write_text(manifest_path(out), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def manifest_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def _seed(args) -> int:
    if args.random_seed:
        return random.SystemRandom().randrange(2**63)
    return args.seed


# ---------------------------------------------------------------- commands


def cmd_parse(args) -> int:
    src = GameSource(args.game, args.sig)
    p = parse_any(src.text, src.path)
    print(f"parsed: {len(p.facts)} facts, {len(p.rules)} rules")
    validate_safety(p)
    print("safe: yes")
    strata = stratify(p)
    print(f"stratified: yes, strata: {len(strata)}")
    if src.sig_text is not None or src._sig_file.exists():
        parse_signature(src.signature_text()).check_program(p)
        print("signature: ok")
    return 0


def cmd_simulate(args) -> int:
    src = GameSource(args.game)
    seed = _seed(args)
    cfg = EpisodeConfig(args.traces, args.max_steps, seed)
    traces = generate_traces(src.program(), cfg, jobs=args.jobs)
    text = format_traces(traces)
    if args.out is None:
        sys.stdout.write(text)
        return 0
    atomic_write_text(args.out, text)
    m = write_manifest(
        args.out, "simulate", [src.path], seed, {"traces": args.traces, "max_steps": args.max_steps}
    )
    print(f"wrote {len(traces)} episodes to {args.out} (sha256 {m['output_digest'][:16]})")
    return 0


def cmd_gen(args) -> int:
    sigs = args.sig or []
    if sigs and len(sigs) != len(args.game):
        raise IGGPError("give either no --sig or one --sig per --game")
    sources = [GameSource(g, sigs[i] if sigs else None) for i, g in enumerate(args.game)]
    names = [s.name for s in sources]
    if len(set(names)) != len(names):
        raise IGGPError(f"two games share a dataset name: {names}")
    seed = _seed(args)
    cfg = EpisodeConfig(args.traces, args.max_steps, seed)
    dataset = Dataset()
    for src in sources:
        p = src.program()
        sig_text = src.signature_text()
        sig = parse_signature(sig_text)
        traces = generate_traces(p, cfg, jobs=args.jobs)
        triples = extract_all(p, sig, traces, jobs=args.jobs)
        d = build_dataset(triples, seed, src.name, src.text, sig_text)
        for target, ts in d.games[src.name].tasks.items():
            if ts.unsplit:
                print(f"warning: {src.name}/{target} has fewer than 6 distinct triples; all kept in train",
                      file=sys.stderr)
        dataset.games.update(d.games)
    write_dataset(dataset, args.out)
    m = write_manifest(
        args.out,
        "gen",
        [s.path for s in sources],
        seed,
        {"traces": args.traces, "max_steps": args.max_steps, "signatures": [s.sig_path for s in sources]},
    )
    for g, t, ts in dataset.tasks():
        print(f"{g}/{t}: train {len(ts.train)}, validate {len(ts.validate)}, test {len(ts.test)}")
    print(f"dataset written to {args.out} (sha256 {m['output_digest'][:16]})")
    return 0


def _restrict(d: Dataset, game: str | None, target: str | None) -> Dataset:
    if game is None and target is None:
        return d
    out = Dataset()
    for name, gd in d.games.items():
        if game is not None and name != game:
            continue
        if target is not None:
            gd = type(gd)(gd.name, gd.gdl, gd.signature, {t: v for t, v in gd.tasks.items() if t == target})
        out.games[name] = gd
    if not out.games:
        raise IGGPError(f"no task matches game={game} target={target}")
    return out


def _report(args, report: EvalReport, command: str, config: dict) -> int:
    sys.stdout.write(report.summary())
    if args.out is not None:
        atomic_write_text(args.out, report.to_tsv())
        write_manifest(args.out, command, [str(args.dataset)], None, config)
    else:
        sys.stdout.write(report.to_tsv())
    return 0


def cmd_baseline(args) -> int:
    d = _restrict(read_dataset(args.dataset), args.game, args.target)
    name = args.method
    if name == "knn" and args.k is None:
        raise IGGPError("--method knn needs --k")
    method = Method(name if name != "knn" else f"knn{args.k}", args.k if name == "knn" else None)
    report = score(method, d, jobs=args.jobs)
    return _report(args, report, "baseline", {"method": method.name, "game": args.game, "target": args.target})


def cmd_eval(args) -> int:
    d = _restrict(read_dataset(args.dataset), args.game, args.target)
    if args.reference:
        method = Method("reference", reference=True)
        label = "reference"
    else:
        path = Path(args.hypothesis)
        method = Method(path.stem, hypothesis=path.read_text(encoding="utf-8"), hypothesis_name=path.name)
        label = str(path)
    report = score(method, d, jobs=args.jobs)
    return _report(args, report, "eval", {"hypothesis": label, "game": args.game, "target": args.target})


# ---------------------------------------------------------------- argument parsing


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iggp", description="Build and score rule-learning datasets from GDL games.")
    ap.add_argument("--version", action="version", version=f"iggp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def seeded(sp):
        sp.add_argument("--traces", type=_positive, default=DEFAULT_TRACES, help="episodes to play")
        sp.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_TIME, help="states per episode, at most")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--random-seed", action="store_true", help="draw a fresh seed (recorded in the manifest)")
        sp.add_argument("--jobs", type=_positive, default=1, help="worker processes; output does not depend on it")

    sp = sub.add_parser("parse", help="check a game file")
    sp.add_argument("game", help="game file or bundled game name")
    sp.add_argument("--sig", help="signature file to check against")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("simulate", help="play random episodes and dump the traces")
    sp.add_argument("--game", required=True)
    sp.add_argument("--out", help="trace file (stdout if omitted)")
    seeded(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("gen", help="generate a train/validate/test dataset")
    sp.add_argument("--game", required=True, action="append", help="game file or bundled name; repeatable")
    sp.add_argument("--sig", action="append", help="signature file, one per --game")
    sp.add_argument("--out", required=True, help="dataset directory")
    seeded(sp)
    sp.set_defaults(func=cmd_gen)

    def scoring(sp):
        sp.add_argument("--dataset", required=True)
        sp.add_argument("--game", help="only this game")
        sp.add_argument("--target", choices=TARGETS, help="only this target")
        sp.add_argument("--out", help="TSV report file (printed if omitted)")
        sp.add_argument("--jobs", type=_positive, default=1)

    sp = sub.add_parser("baseline", help="score a baseline predictor")
    scoring(sp)
    sp.add_argument("--method", required=True, choices=METHODS + ("knn",))
    sp.add_argument("--k", type=_positive, help="neighbours for --method knn")
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("eval", help="score a rule set")
    scoring(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--hypothesis", help="rules in GDL, or Prolog style with a .pl name")
    g.add_argument("--reference", action="store_true", help="use each game's own description")
    sp.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IGGPError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
