"""Front-end contract: config handling, report format, exit codes, determinism."""

import json

import pytest

from dynhecke import RunConfig, list_identities, run
from dynhecke.cli import ConfigError, main, parse_complex
from dynhecke.suites import catalog_entries


def small_config(**overrides):
    base = dict(
        cartan_label="A2",
        seeds=(0,),
        samples_per_identity=4,
        suites=("weyl",),
    )
    base.update(overrides)
    return RunConfig(**base)


def test_run_weyl_suite_passes():
    report = run(small_config())
    names = [r.name for r in report.records]
    assert any(name.startswith("weyl:braid") for name in names)
    assert any(name.startswith("weyl:quadratic") for name in names)
    assert report.overall_pass


def test_run_theta_suite_derivative_record():
    report = run(small_config(cartan_label="A1", suites=("theta",)))
    record = next(r for r in report.records if r.name == "theta:derivative-at-zero")
    assert record.passed
    assert record.max_residual < 1e-8


def test_negative_control_fails_with_witness():
    report = run(small_config(negative_control=True, suites=("weyl", "inverse")))
    assert not report.overall_pass
    failing = [r for r in report.records if not r.passed]
    assert failing
    assert any(r.max_residual > r.threshold for r in failing)


def test_report_body_is_deterministic():
    a = run(small_config(suites=("weyl", "psi")))
    b = run(small_config(suites=("weyl", "psi")))
    assert a.wall_clock_seconds != 0.0
    assert json.dumps(a.body(), sort_keys=True) == json.dumps(b.body(), sort_keys=True)


def test_report_json_shape():
    report = run(small_config())
    doc = json.loads(report.to_json())
    assert doc["schema"].startswith("dynhecke-report/")
    assert set(doc) == {"schema", "body", "wall_clock_seconds"}
    body = doc["body"]
    assert body["config"]["cartan_label"] == "A2"
    names = [r["name"] for r in body["records"]]
    assert names == sorted(names)
    for record in body["records"]:
        # 17 significant digits in scientific notation
        mantissa = record["max_residual"].split("e")[0].replace("-", "").replace(".", "")
        assert len(mantissa) == 17


def test_config_validation_errors():
    with pytest.raises(ConfigError):
        small_config(tau=0.5).validate()
    with pytest.raises(ConfigError):
        small_config(suites=("nope",)).validate()
    with pytest.raises(ConfigError):
        small_config(seeds=()).validate()
    with pytest.raises(ConfigError):
        small_config(cartan_label="E8").validate()


def test_parse_complex_accepts_i_and_j():
    assert parse_complex("0.2+0.1j") == 0.2 + 0.1j
    assert parse_complex("0.2+0.1i") == 0.2 + 0.1j
    with pytest.raises(ConfigError):
        parse_complex("zebra")


def test_catalog_is_stable_and_large_enough():
    entries = catalog_entries()
    assert len(entries) >= 12
    names = [e.name for e in entries]
    assert len(set(names)) == len(names)
    assert "weyl:braid" in names
    assert "gamma:dual-generator" in names
    text = list_identities()
    assert "weyl:braid" in text
    assert text == list_identities()  # stable ordering


def test_main_exit_codes(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(
        ["--type", "A1", "--suites", "theta", "--seeds", "0", "--samples", "4", "--out", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["body"]["overall_pass"] is True

    code = main(["--type", "A2", "--tau", "0.5", "--suites", "theta"])
    assert code == 2
    assert "tau" in capsys.readouterr().err

    code = main(
        [
            "--type", "A2", "--suites", "weyl", "--seeds", "0", "--samples", "4",
            "--negative-control", "--out", str(tmp_path / "neg.json"),
        ]
    )
    assert code == 1


def test_main_list_flag(capsys):
    assert main(["--list"]) == 0
    printed = capsys.readouterr().out
    assert "inverse:unit" in printed


def test_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment line\n"
        "type = A1\n"
        "suites = theta\n"
        "seeds = 5\n"
        "samples = 4\n"
        "tau = 0.8j\n"
    )
    out = tmp_path / "r.json"
    code = main([str(cfg), "--seeds", "1,2", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["body"]["config"]["cartan_label"] == "A1"
    assert doc["body"]["config"]["tau"] == "0.8j"
    assert doc["body"]["config"]["seeds"] == [1, 2]  # flag beats file


def test_config_file_rejects_garbage(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this is not a key value line\n")
    assert main([str(cfg)]) == 2


def test_two_cli_runs_identical_bodies(tmp_path):
    args = ["--type", "A2", "--suites", "weyl,inverse", "--seeds", "0", "--samples", "4"]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main([*args, "--out", str(out1)]) == 0
    assert main([*args, "--out", str(out2)]) == 0
    a = json.loads(out1.read_text())
    b = json.loads(out2.read_text())
    assert a["body"] == b["body"]
