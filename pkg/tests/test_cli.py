from __future__ import annotations

import json
from pathlib import Path

import pytest

from iggp.bundles import bundle
from iggp.cli import digest_path, main, manifest_path
from iggp.datasets import build_dataset, write_dataset
from iggp.extract import TARGETS, Triple
from iggp.gdl import Atom

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_bundled(capsys):
    code, out, _ = run(capsys, "parse", "rock_paper_scissors")
    assert code == 0
    assert "stratified: yes, strata: 1" in out and "safe: yes" in out


def test_parse_file_with_signature(capsys, tmp_path):
    g = tmp_path / "tiny.gdl"
    g.write_text("(role r) (init on) (legal r go) (<= (next on) (true on)) (<= terminal (true on)) (goal r 1)")
    s = tmp_path / "tiny.sig"
    s.write_text("role :: agent -> bool. true, next, init :: prop -> bool. legal, does :: agent -> act -> bool.\n"
                 "goal :: agent -> num -> bool. terminal :: bool. r :: agent. on :: prop. go :: act. 1 :: num.")
    code, out, _ = run(capsys, "parse", g)
    assert code == 0 and "signature: ok" in out


def test_parse_negative_cycle(capsys, tmp_path):
    g = tmp_path / "loop.gdl"
    g.write_text("(q a) (<= (p ?x) (q ?x) (not (p ?x)))")
    code, _, err = run(capsys, "parse", g)
    assert code == 1 and "error" in err


def test_parse_syntax_error(capsys, tmp_path):
    g = tmp_path / "bad.gdl"
    g.write_text("(role r")
    assert run(capsys, "parse", g)[0] == 1


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "parse", tmp_path / "nope.gdl")[0] == 2


def test_usage_errors():
    with pytest.raises(SystemExit) as e:
        main(["gen", "--game", "fizz_buzz"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["simulate", "--game", "fizz_buzz", "--traces", "0"])
    assert e.value.code == 2


def test_simulate_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(capsys, "simulate", "--game", "buttons_and_lights", "--traces", 5, "--seed", 3, "--out", a)
    run(capsys, "simulate", "--game", "buttons_and_lights", "--traces", 5, "--seed", 3, "--out", b)
    assert a.read_bytes() == b.read_bytes()
    m = json.loads(manifest_path(a).read_text())
    assert m["seed"] == 3 and m["output_digest"] == digest_path(a)


def test_simulate_one_state(capsys):
    code, out, _ = run(capsys, "simulate", "--game", "rock_paper_scissors", "--traces", 1, "--max-steps", 1)
    assert code == 0
    assert out.startswith("#episode 0 steps=1 terminated=false")
    assert "#action" not in out


def test_random_seed_recorded(capsys, tmp_path):
    out = tmp_path / "t.txt"
    run(capsys, "simulate", "--game", "minimal_decay", "--traces", 2, "--random-seed", "--out", out)
    assert isinstance(json.loads(manifest_path(out).read_text())["seed"], int)


def test_gen_layout(capsys, tmp_path):
    out = tmp_path / "ds"
    code, text, _ = run(capsys, "gen", "--game", "rock_paper_scissors", "--traces", 10, "--out", out)
    assert code == 0
    for t in ("legal", "goal", "terminal", "next"):
        for split in ("train", "validate", "test"):
            assert (out / "rock_paper_scissors" / t / f"{split}.triples").is_file()
    assert (out / "rock_paper_scissors" / "game.gdl").is_file()
    assert manifest_path(out).is_file()
    assert "rock_paper_scissors/next" in text


def test_gen_tiny_run_warns(capsys, tmp_path):
    out = tmp_path / "ds"
    code, _, err = run(capsys, "gen", "--game", "rock_paper_scissors", "--traces", 2, "--max-steps", 3, "--out", out)
    assert code == 0 and "fewer than 6" in err
    text = (out / "rock_paper_scissors" / "next" / "train.triples").read_text()
    assert text.count("#triple") >= 2


def test_gen_signature_mismatch(capsys, tmp_path):
    sig = (Path(__file__).parents[1] / "src/iggp/games/rock_paper_scissors/signature.sig").read_text()
    bad = tmp_path / "rps.sig"
    bad.write_text(sig.replace("stone, ", "").replace(", stone", ""))
    code, _, err = run(capsys, "gen", "--game", "rock_paper_scissors", "--sig", bad, "--traces", 2, "--out", tmp_path / "ds")
    assert code == 1 and "stone" in err
    assert not (tmp_path / "ds").exists()


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "ds"
    assert main(["gen", "--game", "fizz_buzz", "--game", "minimal_decay", "--traces", "20", "--seed", "1", "--out", str(out)]) == 0
    return out


def test_baseline_true(capsys, small_dataset, tmp_path):
    report = tmp_path / "r.tsv"
    code, out, _ = run(capsys, "baseline", "--dataset", small_dataset, "--method", "true", "--target", "next", "--out", report)
    assert code == 0
    rows = [line.split("\t") for line in report.read_text().splitlines()[1:]]
    assert len(rows) == 2 and all(r[7] == "0.500000" for r in rows)
    assert manifest_path(report).is_file()


def test_baseline_knn_k(capsys, small_dataset):
    code, out, _ = run(capsys, "baseline", "--dataset", small_dataset, "--method", "knn", "--k", 3, "--game", "minimal_decay")
    assert code == 0 and "minimal_decay\tnext\tknn3" in out
    assert run(capsys, "baseline", "--dataset", small_dataset, "--method", "knn")[0] == 1


def test_knn5_too_few_training_triples(capsys, tmp_path):
    # six distinct triples split 4/1/1, leaving knn5 four neighbours to choose from
    b = bundle("minimal_decay")
    triples = {t: [] for t in TARGETS}
    for i in range(6):
        bk = frozenset({Atom("true_level", (str(i),))})
        triples["next"].append(Triple(bk, frozenset({Atom("next_level", (str(i),))}), frozenset(), "next"))
    out = tmp_path / "ds"
    write_dataset(build_dataset(triples, 0, "minimal_decay", b.gdl, b.signature), out)
    code, _, err = run(capsys, "baseline", "--dataset", out, "--method", "knn5")
    assert code == 1 and "PredictorError" in err
    assert run(capsys, "baseline", "--dataset", out, "--method", "knn1")[0] == 0


def test_eval_reference(capsys, small_dataset):
    code, out, _ = run(capsys, "eval", "--dataset", small_dataset, "--reference")
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines() if line.startswith(("fizz_buzz\t", "minimal_decay\t"))]
    assert len(rows) == 8 and all(r[8] == "true" for r in rows)


def test_eval_hypothesis_file(capsys, small_dataset):
    code, out, _ = run(capsys, "eval", "--dataset", small_dataset, "--hypothesis", DATA / "fizz_buzz_next.pl",
                       "--game", "fizz_buzz", "--target", "next")
    assert code == 0
    (row,) = [line.split("\t") for line in out.splitlines() if line.startswith("fizz_buzz\tnext")]
    assert row[8] == "true"


def test_eval_bad_dataset(capsys, tmp_path):
    assert run(capsys, "eval", "--dataset", tmp_path / "none", "--reference")[0] == 2
    with pytest.raises(SystemExit):
        main(["eval", "--dataset", str(tmp_path), "--reference", "--hypothesis", "x.pl"])
