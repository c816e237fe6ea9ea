import json

import numpy as np
import pytest

from qil import cli
from qil.dsl import parse_circuit
from qil.scenarios import (
    CORPUS_NAMES, load_corpus, random_circuit, run_analyze, run_corpus, run_duality, run_verify,
)

PSI3L = "qubits 4\nh 1\ncx 1 2\nh 3\ncx 3 2\ncx 2 4\n"
GHZ = "qubits 3\nh 1\ncx 1 2\ncx 2 3\n"
NOT_REPR = "qubits 3\nh 1\ncx 1 2\nh 3\ncx 3 2\nh 1\npair 1 2\n"


@pytest.fixture(scope="module")
def corpus():
    return load_corpus()


def test_corpus_files(corpus):
    assert sorted(corpus) == sorted(CORPUS_NAMES)
    for sc in corpus.values():
        assert sc.expected
        assert all(fx.citation for fx in sc.expected)


def test_analyze_psi4(corpus):
    report = run_analyze(corpus["psi4"].circuit)
    text = report.render()
    assert "c: 1+2+3+4=0" in text
    assert report.exit_code == 0


def test_analyze_psi3L():
    report = run_analyze(parse_circuit(PSI3L))
    assert report.classes == [(0, 2), (1, 3)]
    assert report.table[0].pair == (0, 1) and report.table[0].all_basis_uncorrelated


def test_analyze_single_qubit():
    report = run_analyze(parse_circuit("qubits 1\n"))
    assert report.system.to_text() == "c: 1=0 | h: none"
    assert report.table == []


def test_analyze_not_representable():
    report = run_analyze(parse_circuit(NOT_REPR))
    assert report.system is None and report.exit_code == 2


def test_verify_psi3L_passes():
    report = run_verify(parse_circuit(PSI3L + "pair 1 2\n"), trials=100, seed=0)
    assert report.ok, [c.name for c in report.failures]


def test_verify_ghz_script():
    report = run_verify(parse_circuit(GHZ + "measure 3 h 0\npair 1 2\n"))
    assert report.ok
    names = [c.name for c in report.checks]
    assert any("pair 1-2 h perfect(0)" in n for n in names)


def test_verify_degrades_when_not_representable():
    report = run_verify(parse_circuit(NOT_REPR))
    assert report.ok and report.coverage.startswith("not representable")


def test_duality_examples(corpus):
    assert run_duality(parse_circuit(GHZ), corpus["psi3"].circuit).dual
    bell = corpus["bell"].circuit
    r = run_duality(bell, bell)
    assert r.dual and r.fidelity > 1 - 1e-10
    r = run_duality(parse_circuit(GHZ), corpus["psi4"].circuit)
    assert not r.dual and r.reason == "different qubit counts"


def test_run_corpus_is_green():
    report = run_corpus(trials=20)
    assert report.ok, [(s, c.name, c.detail) for s, c in report.results if not c.passed]
    names = [s for s, _ in report.results]
    assert names == sorted(names)


def test_random_circuits_verify():
    rng = np.random.default_rng(11)
    for _ in range(30):
        doc = random_circuit(rng, int(rng.integers(1, 5)), int(rng.integers(0, 12)))
        assert run_verify(doc, trials=5, seed=1).ok


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_cli_exit_codes(tmp_path, capsys):
    good = _write(tmp_path, "ghz.qil", GHZ + "pair 1 2\n")
    assert cli.main(["analyze", good]) == 0
    assert cli.main(["verify", good, "--trials", "5", "--seed", "3"]) == 0
    assert cli.main(["analyze", _write(tmp_path, "bad.qil", "qubits 2\ncx 1 1\n")]) == 2
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["analyze", _write(tmp_path, "nr.qil", NOT_REPR)]) == 2
    script = _write(tmp_path, "clash.qil", GHZ + "measure 3 c 0\nmeasure 1 c 1\n")
    assert cli.main(["analyze", script]) == 2


def test_cli_json(tmp_path, capsys):
    a = _write(tmp_path, "ghz.qil", GHZ)
    b = _write(tmp_path, "psi3.qil", "qubits 3\nh 1\ncx 1 2\nh 3\ncx 3 2\n")
    for argv in (["analyze", a], ["verify", a, "--trials", "3"], ["duality", a, b]):
        capsys.readouterr()
        assert cli.main(argv + ["--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["schema"] == 1 and data["command"] == argv[0]
    cli.main(["duality", a, b, "--json"])
    assert json.loads(capsys.readouterr().out)["dual"] is True


def test_cli_output_is_deterministic(tmp_path, capsys):
    path = _write(tmp_path, "psi3L.qil", PSI3L)
    outs = []
    for _ in range(2):
        cli.main(["analyze", path, "--json"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
