import json
import math
import subprocess
import sys

import pytest

from dmqfi.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_pure_exchange(capsys):
    code, out, _ = run(capsys, "spectrum", "--J", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["gamma"] == 1.0
    assert sorted(doc["energies"]) == [-1.0, 0.0, 0.0, 1.0]


def test_spectrum_text(capsys):
    code, out, _ = run(capsys, "spectrum", "--J", "1", "--b", "3")
    assert code == 0
    assert "gamma = 3.16227766" in out
    assert "N1 =" in out and "N2 =" in out


def test_spectrum_zero_coupling(capsys):
    code, out, _ = run(capsys, "spectrum", "--J", "0", "--B", "1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["degenerate_branch"]
    assert sorted(doc["energies"]) == [-1.0, 0.0, 0.0, 1.0]


def test_spectrum_three_spins(capsys):
    code, out, _ = run(capsys, "spectrum", "--J", "1", "--N", "3", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("energy,v0")
    assert len(out.splitlines()) == 9


def test_qfi_limits(capsys):
    _, out, _ = run(capsys, "qfi", "--J", "-1", "--T", "0.01", "--format", "json")
    doc = json.loads(out)
    assert doc["qfi"] == pytest.approx(2.0, abs=1e-3)
    assert doc["useful"] is True
    assert doc["delta_phi_qcb"] == pytest.approx(0.5, abs=1e-3)
    _, out, _ = run(capsys, "qfi", "--J", "1", "--T", "0.01")
    assert "QFI    = 0" in out
    assert "useful = false" in out


def test_qfi_b_d_outputs_agree(capsys):
    _, a, _ = run(capsys, "qfi", "--J", "-1", "--T", "0.7", "--D", "1.0", "--format", "json")
    _, b, _ = run(capsys, "qfi", "--J", "-1", "--T", "0.7", "--b", "1.0", "--format", "json")
    a, b = json.loads(a), json.loads(b)
    for key in ("qfi", "c_max", "n_opt", "useful", "delta_phi_qcb"):
        assert a[key] == pytest.approx(b[key], abs=1e-10)


def test_qfi_zero_temperature(capsys):
    code, out, _ = run(capsys, "qfi", "--J", "-1", "--T", "0", "--zero-temperature", "--format", "csv")
    assert code == 0
    header, row = out.strip().split("\n")
    assert float(dict(zip(header.split(","), row.split(",")))["qfi"]) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("argv", [["qfi", "--T", "0"], ["qfi", "--T", "-1"], ["state", "--T", "0"]])
def test_bad_temperature_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "temperature" in err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["qfi", "--J", "abc"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    code, _, _ = run(capsys, "qfi", "--N", "1")
    assert code == 2


def test_flags_are_case_sensitive(capsys):
    _, out, _ = run(capsys, "qfi", "--B", "0.5", "--b", "1.5", "--format", "json")
    params = json.loads(out)["params"]
    assert params["B"] == 0.5 and params["b"] == 1.5


def test_state_dump(capsys):
    code, out, _ = run(capsys, "state", "--J", "0.4", "--D", "1.2", "--b", "-0.7", "--B", "0.3", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["max_abs_difference"] < 1e-10


def test_state_zero_field_corners(capsys):
    _, out, _ = run(capsys, "state", "--J", "1", "--T", "0.5", "--format", "json")
    doc = json.loads(out)
    corner = 1 / (2 + 2 * doc["gamma_c"])
    assert doc["closed_form"][0][0][0] == pytest.approx(corner, rel=1e-14)
    assert doc["closed_form"][3][3][0] == pytest.approx(corner, rel=1e-14)


def test_state_hot_limit(capsys):
    _, out, _ = run(capsys, "state", "--J", "2", "--B", "1", "--T", "1e6", "--format", "json")
    doc = json.loads(out)
    for i in range(4):
        for j in range(4):
            re, im = doc["closed_form"][i][j]
            assert abs(re - (0.25 if i == j else 0)) < 1e-5 and abs(im) < 1e-5


def test_state_text(capsys):
    code, out, _ = run(capsys, "state")
    assert code == 0
    assert "closed form:" in out and "max |closed - numeric|" in out


def test_sweep_custom_grid(capsys, tmp_path):
    out_file = tmp_path / "grid.csv"
    code, _, _ = run(
        capsys, "sweep", "--axis1", "T", "--min1", "0.5", "--max1", "1", "--count1", "2",
        "--axis2", "D", "--min2", "0", "--max2", "1", "--count2", "2", "--out", str(out_file),
    )
    assert code == 0
    lines = out_file.read_bytes().decode("utf-8").split("\n")
    assert lines[0] == "T,D,qfi,c_max,useful"
    assert len([l for l in lines if l]) == 5


def test_sweep_preset_json(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig2_Db", "--count1", "6", "--count2", "6", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["metadata"]["label"] == "fig2_Db/ferro"
    assert len(doc["rows"]) == 36
    assert any(r["qfi"] > 1 for r in doc["rows"])


def test_sweep_preset_sign_and_override(capsys):
    _, out, _ = run(
        capsys, "sweep", "--preset", "fig2_bB", "--sign", "antiferro", "--count1", "3", "--count2", "3",
        "--max2", "1.5", "--format", "json",
    )
    meta = json.loads(out)["metadata"]
    assert meta["fixed"]["J"] == 1.0 and meta["fixed"]["T"] == 0.7 and meta["fixed"]["D"] == 0.0
    assert meta["axis2"] == {"name": "B", "min": 0.0, "max": 1.5, "count": 3}


def test_sweep_is_reproducible(capsys, tmp_path):
    argv = ["sweep", "--preset", "fig1_Tb", "--count1", "5", "--count2", "4", "--workers", "1"]
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        assert main(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep"],
        ["sweep", "--axis1", "T", "--axis2", "T"],
        ["sweep", "--axis1", "B", "--axis2", "b", "--count1", "1"],
        ["sweep", "--axis1", "B", "--axis2", "b", "--T", "0"],
        ["sweep", "--preset", "fig2_Db", "--format", "text"],
        ["sweep", "--preset", "fig2_Db", "--workers", "0"],
    ],
)
def test_sweep_usage_errors(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_verify_quick_passes(capsys):
    code, out, _ = run(capsys, "verify", "--quick")
    assert code == 0
    assert "FAIL" not in out
    assert "checks passed" in out


def test_verify_detects_injected_fault(capsys):
    code, out, _ = run(capsys, "verify", "--quick", "--inject-fault")
    assert code == 1
    failing = [line.split()[1] for line in out.splitlines() if line.startswith("FAIL")]
    assert "oracle_agreement" in failing
    assert "temperature_limits" in failing


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dmqfi", "qfi", "--J", "-1", "--T", "0.01", "--format", "csv"],
        capture_output=True, text=True, check=True,
    )
    row = dict(zip(*[line.split(",") for line in proc.stdout.strip().split("\n")]))
    assert math.isclose(float(row["qfi"]), 2.0, abs_tol=1e-3)
