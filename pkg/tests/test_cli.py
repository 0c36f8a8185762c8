import json

import pytest

from noisyzd.cli import main

BASE = ["--G", "0.5", "--L", "0.5", "--noise-strength", "0.14"]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_payoffs(capsys):
    code, out, _ = run(capsys, ["payoffs", *BASE])
    assert code == 0
    data = json.loads(out)
    assert [data[k] for k in ("R_E", "S_E", "T_E", "P_E")] == [0.79, -0.29, 1.29, 0.21]
    assert data["pd_ordering"] is True


def test_output_is_byte_identical(capsys):
    argv = ["analyze", *BASE, "--p1", "0.9", "--p2", "0.3", "--p3", "0.6", "--p4", "0.1",
            "--q1", "0.7", "--q2", "0.2", "--q3", "0.8", "--q4", "0.4"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second
    data = json.loads(first)
    assert data["discrepancy"] <= 1e-8
    assert data["relation_enforced"] is False


def test_analyze_dump_matrix(capsys):
    code, out, _ = run(capsys, ["analyze", *BASE, "--dump-matrix",
                                "--p1", "1", "--p2", "1", "--p3", "1", "--p4", "1",
                                "--q1", "1", "--q2", "1", "--q3", "1", "--q4", "1"])
    assert code == 0
    data = json.loads(out)
    assert data["matrix"][0] == [1.0, 0.0, 0.0, 0.0]
    assert data["s_x_determinant"] == pytest.approx(0.79)


def test_pin_noise_free_example(capsys):
    code, out, _ = run(capsys, ["pin", "--G", "0.5", "--L", "0.5", "--noise-strength", "0",
                                "--p1", "0.8", "--p4", "0.1"])
    assert code == 0
    data = json.loads(out)
    assert data["p"] == pytest.approx([0.8, 0.65, 0.25, 0.1])
    assert data["pinned_sY"] == pytest.approx(1 / 3)


@pytest.mark.parametrize(
    "argv, code",
    [
        (["pin", *BASE, "--p1", "1", "--p4", "0"], 5),
        (["pin", *BASE, "--p1", "0.1", "--p4", "0.9"], 4),
        (["extort", "--G", "1", "--L", "0.5", "--noise-strength", "0.1", "--chi", "1.2", "--delta", "0.3"], 4),
        (["analyze", "--G", "0.5", "--L", "0.5", "--noise-strength", "0",
          "--p1", "1", "--p2", "0", "--p3", "0", "--p4", "0",
          "--q1", "1", "--q2", "0", "--q3", "0", "--q4", "0"], 3),
        (["payoffs", "--G", "0.5", "--L", "0.5"], 2),
        (["payoffs", *BASE, "--epsilon", "0.1", "--r", "0.02"], 2),
        (["payoffs", "--G", "0.5", "--L", "0.5", "--epsilon", "0.1"], 2),
        (["payoffs", *BASE, "--payoffs", "3,0,5,1"], 2),
        (["payoffs", "--G", "0.5", "--L", "0.5", "--epsilon", "0.25", "--r", "0.25"], 2),
        (["simulate", "--payoffs", "3,0,5,1", "--noise-strength", "0.1",
          "--p1", "1", "--p2", "1", "--p3", "1", "--p4", "1",
          "--q1", "1", "--q2", "1", "--q3", "1", "--q4", "1"], 2),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, argv)
    assert got == code
    assert out == ""
    assert json.loads(err)["error"]


def test_infeasible_reports_violations(capsys):
    _, _, err = run(capsys, ["pin", *BASE, "--p1", "0.1", "--p4", "0.9"])
    assert json.loads(err)["violations"]


def test_extort_classic(capsys):
    code, out, _ = run(capsys, ["extort", "--payoffs", "3,0,5,1", "--noise-strength", "0",
                                "--chi", "2"])
    assert code == 0
    data = json.loads(out)
    assert data["fullcoop_s_x"] == pytest.approx(3.5)
    assert data["fullcoop_s_y"] == pytest.approx(2.25)
    assert data["phi"] == pytest.approx(data["max_phi"] / 2)


def test_strong_check_default_payoffs(capsys):
    code, out, _ = run(capsys, ["strong-check", "--noise-strength", "0.05", "--chi", "3"])
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "INFEASIBLE"
    assert data["certificate"]["violated"] == ["row3", "row4"]
    _, out, _ = run(capsys, ["strong-check", "--noise-strength", "0", "--chi", "3"])
    assert json.loads(out)["verdict"] == "FEASIBLE"


def test_pin_scan_csv_to_file(capsys, tmp_path):
    target = tmp_path / "scan.csv"
    code, out, _ = run(capsys, ["pin-scan", *BASE, "--grid", "5", "--out", str(target)])
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "p1,p4,feasible,p2,p3,pinned_sY"
    assert len(lines) == 26


def test_pin_scan_json_summary(capsys):
    _, out, _ = run(capsys, ["pin-scan", *BASE, "--grid", "20", "--format", "json"])
    data = json.loads(out)
    assert data["feasible_cells"] == sum(c["feasible"] for c in data["cells"])


def test_extort_scan(capsys):
    code, out, _ = run(capsys, ["extort-scan", "--G", "1", "--L", "0.5", "--noise-strength", "0.06",
                                "--grid", "20", "--chi-max", "4", "--delta-resolution", "50",
                                "--format", "json"])
    assert code == 0
    data = json.loads(out)
    assert 1.3 < data["chi_threshold"] < 1.7
    assert data["negative_delta_feasible"] is False


def test_simulate_deterministic(capsys):
    argv = ["simulate", *BASE, "--stages", "5000", "--seed", "4",
            "--p1", "0.9", "--p2", "0.3", "--p3", "0.6", "--p4", "0.1",
            "--q1", "0.7", "--q2", "0.2", "--q3", "0.8", "--q4", "0.4"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second
    assert json.loads(first)["recorded_stages"] == 4950


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "game.cfg"
    cfg.write_text("# game\nG = 0.5\nL = 0.5\nnoise-strength = 0.06\n")
    _, out, _ = run(capsys, ["payoffs", "--config", str(cfg)])
    assert json.loads(out)["R_E"] == pytest.approx(0.91)
    # command-line noise replaces the config's noise entirely
    _, out, _ = run(capsys, ["payoffs", "--config", str(cfg), "--epsilon", "0.1", "--r", "0.04"])
    assert json.loads(out)["R_E"] == pytest.approx(0.79)


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, _ = run(capsys, ["payoffs", "--config", str(cfg)])
    assert code == 2


def test_argparse_rejects_unknown_command():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
