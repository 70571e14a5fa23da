import json

import pytest

from channels import identity_channel, two_dim_channel
from graphs import Graph
from main import EXIT_CLAIM_FAILURE, EXIT_INPUT_ERROR, EXIT_PASS, main
from opsys import sk_system
from params import BoundsReport, ParamCertificate, replay_certificate, verify_gamma_certificate
from reproduce import SuiteReport
from theta import CapacityReport


@pytest.fixture
def write_json(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return write


@pytest.fixture
def s2_file(write_json):
    return write_json("s2.json", sk_system(2).to_payload().model_dump())


def test_theta_command(write_json, capsys):
    path = write_json("k3.json", Graph.complete(3).to_payload().model_dump())
    assert main(["--no-timestamp", "theta", path]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["theta"] == pytest.approx(1.0, abs=1e-5)
    assert "generated_at" not in report


def test_timestamp_is_added_by_default(write_json, capsys):
    path = write_json("k2.json", {"n": 2, "edges": [[0, 1]]})
    assert main(["theta", path]) == EXIT_PASS
    assert "generated_at" in json.loads(capsys.readouterr().out)


@pytest.mark.parametrize(
    "content",
    ["{not json", json.dumps({"n": 2, "edges": [[0, 5]]}), json.dumps({"vertices": 3})],
)
def test_bad_inputs_exit_with_two(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert main(["params", str(path)]) == EXIT_INPUT_ERROR


def test_missing_file(tmp_path):
    assert main(["theta", str(tmp_path / "absent.json")]) == EXIT_INPUT_ERROR


def test_verify_accepts_a_valid_certificate(write_json, s2_file, tmp_path):
    cert = verify_gamma_certificate(sk_system(2), two_dim_channel())
    cert_file = write_json("cert.json", cert.to_payload())
    out = tmp_path / "report.json"
    assert main(["--no-timestamp", "--json", str(out), "verify", cert_file, s2_file]) == EXIT_PASS
    report = json.loads(out.read_text())
    assert report["verified"] is True
    assert report["recomputed"] == 3


def test_verify_rejects_a_wrong_certificate(write_json, s2_file):
    cert = verify_gamma_certificate(sk_system(2), identity_channel(2))
    cert_file = write_json("cert.json", cert.to_payload())
    assert main(["--no-timestamp", "verify", cert_file, s2_file]) == EXIT_CLAIM_FAILURE


def test_params_on_a_graph(write_json, capsys):
    path = write_json("k2.json", Graph.complete(2).to_payload().model_dump())
    assert main(["--no-timestamp", "--budget", "20", "--starts", "1", "params", path]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    intervals = {i["parameter"]: i for i in report["intervals"]}
    assert intervals["gamma"]["upper"]["value"] == 1


def test_capacity_needs_a_graph_or_channel(s2_file):
    assert main(["capacity", s2_file]) == EXIT_INPUT_ERROR


def test_unknown_reproduction_case():
    assert main(["reproduce", "no-such-case"]) == EXIT_INPUT_ERROR


def test_reproduce_is_byte_identical_without_timestamps(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--no-timestamp", "--json", str(first), "reproduce", "appendix-C6c"]) == EXIT_PASS
    assert main(["--no-timestamp", "--json", str(second), "reproduce", "appendix-C6c"]) == EXIT_PASS
    assert first.read_bytes() == second.read_bytes()
    assert "appendix-C6c" in capsys.readouterr().err


def test_reproduce_pentagon_case(capsys):
    assert main(["--no-timestamp", "reproduce", "appendix-C5"]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert [case["id"] for case in report["cases"]] == ["appendix-C5"]
    assert report["cases"][0]["status"] == "pass"


def test_verify_rejects_an_unsupported_certificate_kind(write_json, s2_file):
    cert_file = write_json(
        "cert.json",
        {"parameter": "alpha", "direction": "lower", "value": 1, "witness_kind": "none", "witness": None},
    )
    assert main(["--no-timestamp", "verify", cert_file, s2_file]) == EXIT_INPUT_ERROR


def _strip(report, *keys):
    return {k: v for k, v in report.items() if k not in ("command",) + keys}


def test_command_outputs_reparse(write_json, s2_file, capsys):
    k2 = write_json("k2.json", Graph.complete(2).to_payload().model_dump())
    flags = ["--no-timestamp", "--budget", "20", "--starts", "1"]

    assert main(flags + ["theta", k2]) == EXIT_PASS
    theta = json.loads(capsys.readouterr().out)
    assert json.loads(json.dumps(theta)) == theta

    assert main(flags + ["params", s2_file]) == EXIT_PASS
    params = json.loads(capsys.readouterr().out)
    bounds = BoundsReport.model_validate(_strip(params))
    assert bounds.model_dump() == _strip(params)
    for payload in bounds.certificates:
        cert = ParamCertificate.from_payload(payload)
        assert replay_certificate(cert, sk_system(2)).verified

    assert main(flags + ["capacity", k2]) == EXIT_PASS
    capacity = json.loads(capsys.readouterr().out)
    assert CapacityReport.model_validate(_strip(capacity)).model_dump() == _strip(capacity)

    cert = verify_gamma_certificate(sk_system(2), two_dim_channel())
    cert_file = write_json("cert.json", cert.to_payload())
    assert main(flags + ["verify", cert_file, s2_file]) == EXIT_PASS
    verify = json.loads(capsys.readouterr().out)
    assert json.loads(json.dumps(verify)) == verify and verify["verified"] is True

    assert main(flags + ["reproduce", "appendix-C6c"]) == EXIT_PASS
    suite = json.loads(capsys.readouterr().out)
    assert SuiteReport.model_validate(_strip(suite)).model_dump() == _strip(suite)
