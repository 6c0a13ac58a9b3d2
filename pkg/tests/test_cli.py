"""CLI integration tests: exit codes, JSON round-trips, determinism."""

import json

import numpy as np
import pytest

from awkit.cli import element_from_json, element_to_json, main
from awkit.core import AlgebraElement, frobenius_norm
from awkit.sampling import random_element


def write_matrix(path, element):
    path.write_text(json.dumps(element_to_json(element)))


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def nilpotent_file(tmp_path):
    f = tmp_path / "x.json"
    write_matrix(f, AlgebraElement([[[0, 1], [0, 0]]]))
    return str(f)


def test_matrix_json_roundtrip_exact():
    rng = np.random.default_rng(0)
    x = random_element((2, 3), rng)
    back = element_from_json(json.loads(json.dumps(element_to_json(x))))
    assert frobenius_norm(x - back) <= 1e-15


def test_polar_regularized_subcommand(nilpotent_file, capsys):
    code, out, _ = run_cli(capsys, "polar", nilpotent_file, "--method", "regularized")
    assert code == 0
    doc = json.loads(out)
    assert doc["accepted"] is True
    u = element_from_json(doc["artifacts"]["u"])
    assert np.allclose(u.blocks[0], [[0, 1], [0, 0]], atol=1e-12)
    assert doc["artifacts"]["diagnostics"][0][0] == 1
    assert doc["residuals"]["partial_isometry"] <= 1e-9


def test_polar_direct_subcommand(nilpotent_file, capsys):
    code, out, _ = run_cli(capsys, "polar", nilpotent_file, "--method", "direct")
    assert code == 0
    doc = json.loads(out)
    assert doc["artifacts"]["diagnostics"] == []


def test_spectral_rejects_non_normal(nilpotent_file, capsys):
    code, out, err = run_cli(capsys, "spectral", nilpotent_file)
    assert code == 1
    assert "not normal" in err
    doc = json.loads(out)
    assert doc["accepted"] is False


def test_spectral_on_normal_input(tmp_path, capsys):
    f = tmp_path / "a.json"
    write_matrix(f, AlgebraElement([np.diag([2.0, 0.5, 0.5])]))
    code, out, _ = run_cli(capsys, "spectral", str(f))
    assert code == 0
    doc = json.loads(out)
    assert doc["accepted"] is True
    assert doc["artifacts"]["regularity"] is True
    mults = sorted(entry["multiplicity"] for entry in doc["artifacts"]["spectrum"])
    assert mults == [1, 2]


def test_cut_subcommand(tmp_path, capsys):
    f = tmp_path / "x.json"
    write_matrix(f, AlgebraElement([np.diag([2.0, 0.5, 0.0])]))
    code, out, _ = run_cli(capsys, "cut", str(f), "--mu", "1.0")
    assert code == 0
    doc = json.loads(out)
    assert doc["accepted"] is True
    p = element_from_json(doc["artifacts"]["p"])
    assert np.allclose(p.blocks[0], np.diag([1.0, 0.0, 0.0]), atol=1e-9)
    assert doc["artifacts"]["mu"] == 1.0


def test_cut_rejects_bad_mu(tmp_path, capsys):
    f = tmp_path / "x.json"
    write_matrix(f, AlgebraElement([np.diag([2.0, 0.5, 0.0])]))
    code, _, err = run_cli(capsys, "cut", str(f), "--mu", "9.0")
    assert code == 1
    assert "cut point" in err


def test_closure_subcommand(tmp_path, capsys):
    f = tmp_path / "b.json"
    write_matrix(f, AlgebraElement([np.diag([1.0, 1.0, 2.0])]))
    code, out, _ = run_cli(capsys, "closure", str(f), "--seed1", "1", "--seed2", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["accepted"] is True
    assert doc["seed"] == [1, 2]
    assert doc["artifacts"]["closure_dim"] == 2
    assert doc["residuals"]["correspondence_delta"] <= 1e-9


def test_certify_subcommand(tmp_path, capsys):
    d = tmp_path / "seq"
    d.mkdir()
    one = AlgebraElement.identity((2,))
    for n in range(1, 6):
        write_matrix(d / f"{n:03d}.json", one * (1.0 / n))
    limit = tmp_path / "limit.json"
    write_matrix(limit, AlgebraElement.zeros((2,)))
    code, out, _ = run_cli(
        capsys, "certify", str(d), "--limit", str(limit), "--rate", "1.0"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["accepted"] is True
    assert doc["artifacts"]["terms"] == 5
    assert doc["artifacts"]["ordering"] == [f"{n:03d}.json" for n in range(1, 6)]

    # a constant non-null sequence is rejected as a mathematical failure
    bad = tmp_path / "bad"
    bad.mkdir()
    for n in range(1, 6):
        write_matrix(bad / f"{n:03d}.json", one)
    code, _, err = run_cli(
        capsys, "certify", str(bad), "--limit", str(limit), "--rate", "1.0"
    )
    assert code == 1
    assert "over" in err


def test_ineq_subcommand(nilpotent_file, capsys):
    code, out, _ = run_cli(capsys, "ineq", nilpotent_file, "--n", "1", "--m", "3")
    assert code == 0
    assert json.loads(out)["accepted"] is True


def test_malformed_input_exit_two(tmp_path, capsys):
    f = tmp_path / "junk.json"
    f.write_text("{not json")
    code, out, err = run_cli(capsys, "polar", str(f))
    assert code == 2
    assert "malformed" in err
    assert json.loads(out)["accepted"] is False

    g = tmp_path / "rect.json"
    g.write_text(json.dumps({"blocks": [[[[1, 0], [0, 0]]]]}))  # 1x2 block
    code, _, _ = run_cli(capsys, "polar", str(g))
    assert code == 2

    code, _, _ = run_cli(capsys, "polar", str(tmp_path / "missing.json"))
    assert code == 2


def test_selftest_subcommand(capsys):
    code, out, err = run_cli(capsys, "selftest", "--trials", "10", "--seed", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["accepted"] is True
    assert len(doc["artifacts"]) == 10
    assert err.count("PASS") == 10


def test_report_determinism(nilpotent_file, capsys):
    _, out1, _ = run_cli(capsys, "polar", nilpotent_file)
    _, out2, _ = run_cli(capsys, "polar", nilpotent_file)
    assert out1 == out2
    _, out3, _ = run_cli(capsys, "selftest", "--trials", "5", "--seed", "3")
    _, out4, _ = run_cli(capsys, "selftest", "--trials", "5", "--seed", "3")
    assert out3 == out4


def test_tolerance_flags_apply(nilpotent_file, capsys):
    code, out, _ = run_cli(capsys, "polar", nilpotent_file, "--pos-slack", "1e-8")
    assert code == 0
    assert json.loads(out)["tolerances"]["pos_slack"] == 1e-8


def test_tolerance_env_var(nilpotent_file, capsys, monkeypatch):
    monkeypatch.setenv("AWKIT_POS_SLACK", "1e-7")
    code, out, _ = run_cli(capsys, "polar", nilpotent_file)
    assert code == 0
    assert json.loads(out)["tolerances"]["pos_slack"] == 1e-7
    # flags win over the environment
    code, out, _ = run_cli(capsys, "polar", nilpotent_file, "--pos-slack", "1e-8")
    assert json.loads(out)["tolerances"]["pos_slack"] == 1e-8
