import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from main import attach_flag_values, main  # noqa: E402

V1_ARGS = ["construct", "--kind", "v1", "--minpoly", "-3,0,1", "--S", "73", "--a", "73", "--v1", "11", "--v2", "23"]


@pytest.fixture
def v1_cert_file(no_home_config, capsys):
    target = no_home_config / "v1.json"
    assert main(V1_ARGS + ["--sample-bound", "20", "--out", str(target)]) == 0
    capsys.readouterr()
    return target


def test_attach_flag_values():
    assert attach_flag_values(["construct", "--minpoly", "-3,0,1", "--S", "73"]) == [
        "construct",
        "--minpoly=-3,0,1",
        "--S=73",
    ]
    assert attach_flag_values(["hilbert", "2", "3"]) == ["hilbert", "2", "3"]


def test_no_command(no_home_config):
    assert main([]) == 2


def test_hilbert(no_home_config, capsys):
    assert main(["hilbert", "377", "5", "--place", "13"]) == 0
    assert capsys.readouterr().out.strip() == "-1"
    assert main(["hilbert", "--place", "real", "-1", "-1"]) == 0
    assert capsys.readouterr().out.strip() == "-1"
    assert main(["hilbert", "--place", "3", "--", "-1/3", "5"]) == 0
    assert capsys.readouterr().out.strip() == "-1"
    assert main(["hilbert", "73", "98", "--place", "73"]) == 0
    assert capsys.readouterr().out.strip() == "+1"


def test_hilbert_errors(no_home_config, capsys):
    assert main(["hilbert", "0", "5", "--place", "3"]) == 2
    assert "ZeroArgument" in capsys.readouterr().err
    assert main(["hilbert", "2", "3", "--place", "4"]) == 4
    assert main(["hilbert", "two", "3", "--place", "3"]) == 4


def test_construct_to_stdout(no_home_config, capsys):
    assert main(V1_ARGS + ["--sample-bound", "20"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["params"]["b"] == "1/73"
    assert document["params"]["c"] == "99"
    assert document["verdict"]["wa"] == "FailsWA"


def test_construct_writes_digest(v1_cert_file):
    sidecar = v1_cert_file.with_name(v1_cert_file.name + ".sha256")
    assert sidecar.exists()
    assert len(sidecar.read_text().split()[0]) == 64


def test_construct_rejects_inert_place(no_home_config, capsys):
    assert main(["construct", "--kind", "v2", "--minpoly", "-3,0,1", "--S", "7"]) == 2
    assert "SplitCheckFailed" in capsys.readouterr().err
    assert main(["construct", "--kind", "v1", "--minpoly", "1,0,1", "--S", "7"]) == 2


def test_construct_respects_max_iter_env(no_home_config, monkeypatch, capsys):
    monkeypatch.setenv("CHATELET_MAX_ITER", "1")
    assert main(["construct", "--kind", "v2", "--minpoly", "-1,-2,1,1", "--S", "13"]) == 3
    assert "SolverExhausted" in capsys.readouterr().err


def test_verify(v1_cert_file, capsys):
    assert main(["verify", "--cert", str(v1_cert_file)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["ok"]
    assert result["digest"] == "match"


def test_verify_detects_tampering(v1_cert_file, capsys):
    document = json.loads(v1_cert_file.read_text())
    document["places"][0]["invariant_set"] = ["1/2"]
    v1_cert_file.write_text(json.dumps(document))
    assert main(["verify", "--cert", str(v1_cert_file)]) == 4
    result = json.loads(capsys.readouterr().out)
    assert not result["ok"]
    assert result["digest"] == "mismatch"


def test_verify_malformed(no_home_config, capsys):
    truncated = no_home_config / "broken.json"
    truncated.write_text('{"version": "chatelet-certificate/1", "kin')
    assert main(["verify", "--cert", str(truncated)]) == 4
    assert main(["verify", "--cert", str(no_home_config / "missing.json")]) == 4


def test_invariants(v1_cert_file, capsys):
    assert main(["invariants", "--cert", str(v1_cert_file), "--place", "73"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["invariant_set"] == ["0", "1/2"]
    assert document["case_id"] == "V1-(6)"
    assert document["class"] == "s_finite"
    assert main(["invariants", "--cert", str(v1_cert_file), "--place", "5"]) == 0
    assert json.loads(capsys.readouterr().out)["invariant_set"] == ["0"]


def test_verdict(v1_cert_file, capsys):
    assert main(["verdict", "--cert", str(v1_cert_file)]) == 0
    assert json.loads(capsys.readouterr().out)["wa"] == "FailsWA"
    assert main(["verdict", "--cert", str(v1_cert_file), "--off", "73"]) == 0
    assert json.loads(capsys.readouterr().out)["wa"] == "SatisfiesWA_off"
    assert main(["verdict", "--cert", str(v1_cert_file), "--subfield", "-3,0,1"]) == 0
    assert json.loads(capsys.readouterr().out)["places_above_S"] == 2


def test_verify_paper_examples(no_home_config, capsys):
    assert main(["verify-paper-examples"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert [entry["passed"] for entry in summary] == [True, True]
