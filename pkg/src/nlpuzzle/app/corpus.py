"""Running the solver over a directory of puzzles."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .theory import COREF, GRAMMAR, NER, SOLVED, NoPersonsError, build_theory, solve

STAGES = (NER, COREF, GRAMMAR)
MANIFEST = "manifest.json"


@dataclass(frozen=True)
class PuzzleOutcome:
    name: str
    solved: bool
    failures: tuple[str, ...] = ()
    detail: str = ""


@dataclass
class CorpusReport:
    outcomes: list[PuzzleOutcome] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.outcomes)

    @property
    def solved(self) -> int:
        return sum(o.solved for o in self.outcomes)

    def failures(self, stage: str) -> int:
        return sum(stage in o.failures for o in self.outcomes)

    @property
    def unexplained(self) -> int:
        """Unsolved puzzles that no stage counter accounts for."""
        return sum(not o.solved and not set(o.failures) & set(STAGES) for o in self.outcomes)

    @property
    def rate(self) -> float:
        return self.solved / self.total if self.total else 0.0

    def render(self) -> str:
        lines = [f"{o.name}: {'pass' if o.solved else 'FAIL'}{' ' + o.detail if o.detail else ''}"
                 for o in self.outcomes]
        lines.append(f"solved {self.solved}/{self.total} ({100 * self.rate:.2f}%)")
        for stage in STAGES:
            lines.append(f"  {stage} failures: {self.failures(stage)}")
        lines.append(f"  other failures: {self.unexplained}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "solved": self.solved,
            "rate": self.rate,
            "stage_failures": {s: self.failures(s) for s in STAGES},
            "other_failures": self.unexplained,
            "puzzles": [
                {"name": o.name, "solved": o.solved, "failures": list(o.failures), "detail": o.detail}
                for o in self.outcomes
            ],
        }


def load_manifest(directory: Path) -> dict[str, dict]:
    path = Path(directory) / MANIFEST
    if not path.exists():
        return {}
    data = json.loads(path.read_text(encoding="utf-8"))
    return {p["file"]: p for p in data["puzzles"]}


def check_puzzle(path: Path, expected: Optional[dict] = None, **options) -> PuzzleOutcome:
    """Solve one puzzle file and attribute any failure to a pipeline stage."""
    name = path.name
    try:
        theory = build_theory(path.read_text(encoding="utf-8"), **options)
    except NoPersonsError as e:
        return PuzzleOutcome(name, False, (NER,), str(e))
    failures = []
    if expected and expected.get("persons") and list(theory.persons.persons) != expected["persons"]:
        failures.append(NER)
    stages = {d.stage for d in theory.diagnostics}
    failures += [s for s in (COREF, GRAMMAR) if s in stages]
    report = solve(theory)
    ok = report.verdict == SOLVED
    detail = report.summary()
    if ok and expected and expected.get("solution"):
        ok = report.assignment == expected["solution"]
        if not ok:
            detail = f"expected {expected['solution']}, got {report.assignment}"
    return PuzzleOutcome(name, ok and not failures, tuple(failures), detail)


def _check_one(args):
    path, expected, options = args
    return check_puzzle(path, expected, **options)


def check_corpus(directory, jobs: int = 1, **options) -> CorpusReport:
    directory = Path(directory)
    manifest = load_manifest(directory)
    files = sorted(directory.glob("*.txt"))
    work = [(f, manifest.get(f.name), options) for f in files]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_check_one, work))
    else:
        outcomes = [_check_one(w) for w in work]
    return CorpusReport(outcomes)
