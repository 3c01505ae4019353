import io
import json

import pytest

from deepnorm.cli import run
from deepnorm.corpus import generate_corpus
from deepnorm.derivation import load, to_text


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def proof_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("proofs") / "p.sks"
    path.write_text(to_text(generate_corpus(seed=2, count=1, atom_budget=2, max_leaves=24)[0]))
    return path


def test_theta():
    assert call("theta", "-k", "2", "-n", "3") == (0, "[(a1.[a2.a3]).(a2.a3)]\n", "")
    code, out, _ = call("theta", "-k", "1", "--atoms", "x,y", "--format", "json")
    assert code == 0 and json.loads(out) == {"formula": "[x.y]"}


def test_theta_profile_is_csv():
    code, out, _ = call("theta", "--profile", "-n", "4")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,k,size" and len(lines) == 1 + sum(n + 2 for n in range(1, 5))


def test_gamma_prints_a_derivation():
    code, out, _ = call("gamma", "-k", "1", "-l", "2", "-n", "3")
    assert code == 0 and load(out).steps


def test_check_and_flow(proof_file):
    code, out, _ = call("check", str(proof_file))
    assert code == 0 and out.startswith("valid;")
    code, out, _ = call("flow", str(proof_file), "--format", "dot")
    assert code == 0 and out.startswith("digraph")


def test_normalise_writes_a_report(proof_file, tmp_path):
    report = tmp_path / "r.csv"
    code, out, err = call("normalise", str(proof_file), "--report", str(report))
    assert code == 0 and "analytic: ok" in err
    assert report.read_text().startswith("stage,")
    assert "ai↑" not in out


def test_invalid_input_exits_one(tmp_path):
    bad = tmp_path / "bad.sks"
    bad.write_text("(a.[b.c])\n  -- s @-\n[(a.c).b]\n")
    code, _, err = call("check", str(bad))
    assert code == 1 and "step 0" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("check", "/nonexistent/file"),
        ("theta", "-n", "3"),
        ("theta", "-k", "1", "-n", "3", "--atoms", "a,b"),
        ("gamma", "-k", "1", "-l", "9", "-n", "3"),
        ("bogus",),
    ],
)
def test_usage_errors_exit_two(argv):
    assert call(*argv)[0] == 2


def test_malformed_file_exits_two(tmp_path):
    bad = tmp_path / "junk.sks"
    bad.write_text("[a.\n")
    assert call("check", str(bad))[0] == 2


def test_corpus_to_directory(tmp_path):
    code, _, err = call("corpus", "--count", "3", "--budget", "2", "--out", str(tmp_path), "--format", "json")
    assert code == 0 and sorted(p.name for p in tmp_path.iterdir()) == ["proof000.json", "proof001.json", "proof002.json"]
    code, out, err = call("stats", *map(str, sorted(tmp_path.iterdir())))
    assert code == 0 and out.startswith("proof,atoms,valid,size_input")
    assert "trend" in err or "envelope" in err
