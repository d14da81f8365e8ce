import pytest

from nlpuzzle.app import build_theory, solve
from nlpuzzle.app.corpus import check_corpus, load_manifest
from nlpuzzle.app.resources import corpus_dir

from corpus_oracle import ORACLE, solution_roles

FILES = sorted(p.name for p in corpus_dir().glob("*.txt"))


def test_oracle_covers_the_corpus():
    assert sorted(ORACLE) == FILES


@pytest.mark.parametrize("name", FILES)
def test_oracle_has_a_unique_solution(name):
    assert len(solution_roles(name)) == 1


@pytest.mark.parametrize("name", FILES)
def test_pipeline_agrees_with_oracle(name):
    theory = build_theory((corpus_dir() / name).read_text(encoding="utf-8"))
    assert list(theory.persons.persons) == ORACLE[name][0]
    assert not theory.diagnostics
    report = solve(theory)
    assert report.verdict == "solved"
    assert [report.assignment] == solution_roles(name)


@pytest.mark.parametrize("name", FILES)
def test_manifest_matches_oracle(name):
    entry = load_manifest(corpus_dir())[name]
    assert entry["persons"] == ORACLE[name][0]
    assert [entry["solution"]] == solution_roles(name)


def test_parallel_check_matches_serial():
    serial = check_corpus(corpus_dir())
    parallel = check_corpus(corpus_dir(), jobs=2)
    assert serial.as_dict() == parallel.as_dict()
    assert serial.rate == 1.0


def test_wrong_expectation_is_a_failure(tmp_path):
    (tmp_path / "p.txt").write_text((corpus_dir() / "sue-alice.txt").read_text())
    (tmp_path / "manifest.json").write_text(
        '{"puzzles": [{"file": "p.txt", "persons": ["Sue", "Alice"],'
        ' "solution": {"Sue": "knave", "Alice": "knight"}}]}'
    )
    report = check_corpus(tmp_path)
    assert report.solved == 0 and report.unexplained == 1
    assert "expected" in report.outcomes[0].detail


def test_ner_failure_is_counted(tmp_path):
    (tmp_path / "nobody.txt").write_text("knights always tell the truth.")
    report = check_corpus(tmp_path)
    assert report.failures("ner") == 1 and report.rate == 0.0
