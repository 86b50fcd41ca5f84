import json
import subprocess
import sys

import pytest

from conftest import CORPUS, corpus_files
from dcsep.cli import main

SEARCH = {"subgroup": "subgroup-sep", "conjugacy": "conj-distinguish"}


def command_for(stem):
    return SEARCH.get(stem.split("_")[0], "doublecoset-sep")


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_emit_then_verify(path, tmp_path):
    out = tmp_path / "out.json"
    code = main([command_for(path.stem), "-i", str(path), "-o", str(out)])
    assert code in (0, 2)
    text = out.read_text()
    if code == 0 and '"outcome"' not in text:
        # a certificate file: verify must accept it
        assert main(["verify", "-i", str(path), "-c", str(out)]) == 0


def test_case1_certificate_primes(tmp_path):
    out = tmp_path / "c.json"
    assert main(["doublecoset-sep", "-i", str(CORPUS / "case1.json"), "-o", str(out)]) == 0
    assert json.loads(out.read_text())["primes"] == [5]


def test_exit_codes(tmp_path, capsys):
    assert main(["doublecoset-sep", "-i", str(CORPUS / "case2_unsupported.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["doublecoset-sep", "-i", str(bad)]) == 4
    bad.write_text(json.dumps({"field": {"min_poly": ["0", "1"]}, "gamma": [[["1"], ["x"]], [["0"], ["1"]]]}))
    assert main(["classify", "-i", str(bad)]) == 4
    bad.write_text(json.dumps({"field": {"min_poly": ["0", "1"]}, "gamma": [[["1"], ["1"]], [["1"], ["1"]]]}))
    assert main(["classify", "-i", str(bad)]) == 4
    scalar = tmp_path / "o.json"
    scalar.write_text(json.dumps({"field": {"min_poly": ["0", "1"]}, "delta": ["2"], "m": "6"}))
    assert main(["order-find", "-i", str(scalar), "--max-prime", "500"]) == 3


def test_tampered_certificate(tmp_path, capsys):
    cert = tmp_path / "c.json"
    main(["doublecoset-sep", "-i", str(CORPUS / "case1.json"), "-o", str(cert)])
    data = json.loads(cert.read_text())
    data["residue_rings"] = [{"p": 7, "factor": ["0", "1"]}]
    data["primes"] = [7]
    cert.write_text(json.dumps(data))
    capsys.readouterr()
    assert main(["verify", "-i", str(CORPUS / "case1.json"), "-c", str(cert)]) == 4
    report = json.loads(capsys.readouterr().out)
    assert report["outcome"] == "rejected" and report["failure_reason"]
    # same certificate against another problem
    main(["doublecoset-sep", "-i", str(CORPUS / "case1.json"), "-o", str(cert)])
    capsys.readouterr()
    assert main(["verify", "-i", str(CORPUS / "case1_star.json"), "-c", str(cert)]) == 4
    assert "digest" in json.loads(capsys.readouterr().out)["failure_reason"]


def test_determinism(tmp_path):
    for path in corpus_files():
        a, b = tmp_path / "a", tmp_path / "b"
        main([command_for(path.stem), "-i", str(path), "-o", str(a)])
        main([command_for(path.stem), "-i", str(path), "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()


def test_scalar_commands(tmp_path, capsys):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"field": {"min_poly": ["0", "1"]}, "lambda": ["3"], "omega": ["2"]}))
    assert main(["power-sep", "-i", str(f)]) == 0
    assert json.loads(capsys.readouterr().out)["primes"] == [7]
    f.write_text(json.dumps({"field": {"min_poly": ["1", "0", "0", "0", "1"]}, "b": ["0", "1", "0", "0"], "beta": ["0", "0", "1", "0"]}))
    assert main(["additive-sep", "-i", str(f)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["p"] == 5 and out["rings"][0]["factor"] == ["2", "0", "1"]
    f.write_text(json.dumps({"field": {"min_poly": ["0", "1"]}, "delta": ["2"], "m": "4"}))
    assert main(["order-find", "-i", str(f)]) == 0
    assert json.loads(capsys.readouterr().out)["ring"]["p"] == 5


def test_probe_and_classify(capsys):
    assert main(["probe", "-i", str(CORPUS / "case4_membership.json")]) == 0
    assert json.loads(capsys.readouterr().out)["exponents"] == {"H": ["2"], "K": ["3"]}
    assert main(["classify", "-i", str(CORPUS / "case1.json")]) == 0
    assert json.loads(capsys.readouterr().out)["gamma"] == "nonparabolic"


def test_batch_mode(tmp_path, capsys):
    src = tmp_path / "in"
    src.mkdir()
    names = [p for p in corpus_files() if p.stem.startswith("case")]
    for p in names:
        (src / p.name).write_text(p.read_text())
    dst = tmp_path / "out"
    code = main(["doublecoset-sep", "-i", str(src), "-o", str(dst), "--jobs", "2"])
    assert code == 2  # worst exit code: some files are unsupported cases
    kinds = {p.name: json.loads(p.read_text())["outcome"] for p in dst.glob("*.out.json")}
    assert len(kinds) == len(names)
    assert kinds["case1.out.json"] == "certificate"
    assert kinds["case4_membership.out.json"] == "membership"
    assert kinds["case2_unsupported.out.json"] == "unsupported"


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "dcsep", "doublecoset-sep", "-i", str(CORPUS / "case1.json"), "--trace"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["certificate"]["primes"] == [5]
    assert "scan p=5" in r.stderr


def test_docs_schemas_match_packaged():
    from conftest import ROOT

    for path in (ROOT / "src" / "dcsep" / "schemas").glob("*.json"):
        assert (ROOT / "docs" / path.name).read_text() == path.read_text()
