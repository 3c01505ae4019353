import time

import pytest

from deepnorm.corpus import generate_corpus
from deepnorm.normalise import normalise

VERDICTS: list[str] = []


@pytest.fixture(scope="session")
def verdict():
    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        VERDICTS.append(line)
        print(line)

    return record


@pytest.fixture(scope="session")
def corpus_runs():
    """The acceptance corpus normalised once: (proof, final proof, report) triples and the wall time."""
    t0 = time.perf_counter()
    runs = []
    for p in generate_corpus(seed=0, count=100, atom_budget=3, max_leaves=60):
        out, report = normalise(p)
        runs.append((p, out, report))
    return runs, time.perf_counter() - t0


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
