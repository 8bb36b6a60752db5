import json
import subprocess
import sys

import numpy as np
import pytest

from superqft import enriched as en
from superqft import model11 as m11
from superqft import numerics as nm
from superqft.cli import main
from superqft.superfield import GrassmannSection

GRID = m11.Grid11(0.0, 2.0, 1025)


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_check_passes_and_report_is_deterministic(tmp_path):
    r1, r2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["check", "berezinian", "--report", str(r1)]) == 0
    assert main(["check", "berezinian", "--report", str(r2)]) == 0
    assert r1.read_bytes() == r2.read_bytes()
    report = json.loads(r1.read_text())
    assert report["pass"] and report["suite"] == "berezinian"


def test_check_prints_one_line_per_check(capsys):
    assert main(["check", "berezinian"]) == 0
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 4 and all(line.startswith("PASS") for line in err)


def test_tightened_tolerance_fails_with_exit_1(tmp_path):
    out = tmp_path / "r.json"
    assert main(["check", "green11", "--tol", "green11.P_G_minus_id=1e-30", "--report", str(out)]) == 1
    checks = json.loads(out.read_text())["suites"]["green11"]["checks"]
    assert [c["name"] for c in checks if not c["passed"]] == ["green11.P_G_minus_id"]


def test_config_file_and_seed(tmp_path):
    cfg = write(tmp_path / "cfg.json", {"N11": 2049, "tols": {"green11.exact_sequence": 1e-5}})
    out = tmp_path / "r.json"
    assert main(["check", "green11", "--config", cfg, "--seed", "5", "--report", str(out)]) == 0
    assert json.loads(out.read_text())["seed"] == 5


@pytest.mark.parametrize("argv", [
    ["check", "berezinian", "--tol", "oops"],
    ["check", "berezinian", "--tol", "x=-1"],
])
def test_bad_tolerances_exit_2(argv):
    assert main(argv) == 2


def test_bad_config_exits_2(tmp_path):
    assert main(["check", "green11", "--config", write(tmp_path / "c.json", {"bogus": 1})]) == 2
    assert main(["check", "green11", "--config", write(tmp_path / "c.json", {"N11": 3})]) == 2
    assert main(["check", "green11", "--config", str(tmp_path / "missing.json")]) == 2


def test_unknown_suite_is_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["check", "nonsense"])
    assert exc.value.code == 2


def test_green_command_inverts_P(tmp_path):
    F = m11.Section11(GRID, nm.gaussian(GRID.t, 1.0, 0.06), nm.gaussian(GRID.t, 1.05, 0.05))
    src = write(tmp_path / "f.json", F.to_json())
    out = tmp_path / "g.json"
    assert main(["green", "1|1", "retarded", "--input", src, "--output", str(out)]) == 0
    GF = m11.Section11.from_json(json.loads(out.read_text()))
    assert (m11.apply_P11(GF) - F).max_abs() <= 1e-6 * F.max_abs()


def test_green_rejects_noncompact_input(tmp_path):
    src = write(tmp_path / "f.json", m11.Section11.even(GRID, np.ones(GRID.N)).to_json())
    assert main(["green", "1|1", "advanced", "--input", src]) == 2


def test_identity_transform_is_byte_identical(tmp_path):
    g = en.CHAIN11[1]
    F = m11.Section11(g, nm.gaussian(g.t, 1.0, 0.05), nm.gaussian(g.t, 0.95, 0.04))
    H = GrassmannSection(1, {0: F, 1: F * -0.5})
    sec = write(tmp_path / "h.json", H.to_json())
    mor = write(tmp_path / "id.json", en.identity_rel("1|1", 1, g).to_json())
    o1, o2 = tmp_path / "o1.json", tmp_path / "o2.json"
    assert main(["transform", "--section", sec, "--morphism", mor, "--output", str(o1)]) == 0
    assert main(["transform", "--section", str(o1), "--morphism", mor, "--output", str(o2)]) == 0
    assert o1.read_bytes() == o2.read_bytes()
    assert json.loads(o1.read_text()) == json.loads(json.dumps(H.to_json()))


def test_transform_rejects_model_mismatch(tmp_path):
    from superqft import model32 as m32
    sec = write(tmp_path / "h.json", GrassmannSection.pure(m11.Section11.zeros(GRID), 0).to_json())
    mor = write(tmp_path / "m.json", en.identity_rel("3|2", 0, m32.Grid32(8, 8, 8)).to_json())
    assert main(["transform", "--section", sec, "--morphism", mor]) == 2


def test_quantize_demo(tmp_path):
    out = tmp_path / "q.json"
    assert main(["quantize-demo", "--count", "2", "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["pairs"]) == 3 and len(data["susy_images"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "superqft.cli", "check", "berezinian"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
