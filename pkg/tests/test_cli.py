import csv
import json
import math
import subprocess
import sys

import pytest

from rfcw.cli import main, parse_field


def _csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_parse_field():
    assert sorted(parse_field("dichotomous:0.25").support) == [(-0.25, 0.5), (0.25, 0.5)]
    spec = parse_field("discrete:-1:0.2,0.5:0.8")
    assert spec.values == (-1.0, 0.5) and spec.probs == (0.2, 0.8)
    for bad in ("gaussian:1", "discrete:", "discrete:1:0.5,2"):
        with pytest.raises(ValueError):
            parse_field(bad)


def test_phase_diagram_csv(tmp_path):
    out = tmp_path / "line.csv"
    assert main(["phase-diagram", "--h-max", "0.49", "--steps", "50", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# rfcw phase-diagram")
    assert lines[1] == "h,beta_crit,order"
    rows = _csv_rows(out.read_text())
    assert len(rows) == 50
    assert float(rows[0]["beta_crit"]) == pytest.approx(1.0)
    assert rows[-1]["order"] == "first"


def test_marginal_single_spin(capsys):
    assert main(["marginal", "--field", "dichotomous:0.25", "--beta", "0.8", "--n", "1", "--k", "1",
                 "--seed", "1"]) == 0
    rows = {r["word"]: r for r in _csv_rows(capsys.readouterr().out)}
    a = float(rows["+"]["mu"])
    # the single field value is +-0.25; the closed form fixes P(+1) either way
    expected = {math.exp(s * 0.2) / (2 * math.cosh(0.2)) for s in (1, -1)}
    assert min(abs(a - e) for e in expected) <= 1e-12
    assert float(rows["+"]["mu"]) + float(rows["-"]["mu"]) == pytest.approx(1.0)


def test_chaos_scan_one_row(capsys):
    assert main(["chaos-scan", "--field", "dichotomous:0.25", "--beta", "0.8", "--n-grid", "200",
                 "--k", "2", "--replicas", "1"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert len(rows) == 1
    assert list(rows[0]) == ["n", "k", "seed", "j_index", "kl", "tv"]


def test_json_format(capsys):
    assert main(["landscape", "--field", "dichotomous:0", "--beta", "2", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "landscape"
    assert len(doc["records"]) == 2
    assert doc["config"]["beta"] == 2.0


def test_jindex_stats_and_clt(capsys):
    assert main(["jindex-stats", "--field", "dichotomous:0.25", "--beta", "2.5", "--n-grid", "500",
                 "--replicas", "4"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert len(rows) == 4 and "tv_alt" in rows[0]
    assert main(["clt", "--field", "dichotomous:0.25", "--beta", "2.5", "--n", "200", "--replicas", "100"]) == 0
    (row,) = _csv_rows(capsys.readouterr().out)
    assert float(row["target_variance"]) > 0


def test_sample_command(capsys):
    assert main(["sample", "--field", "dichotomous:0.25", "--beta", "0.8", "--n", "8", "--samples", "3"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert len(rows) == 3 and all(len(r["spins"]) == 8 for r in rows)


@pytest.mark.parametrize("argv", [
    ["no-such-command"],
    [],
    ["marginal", "--n", "1", "--field", "gaussian:1"],
    ["chaos-scan", "--n-grid", "100", "--replicas", "0"],
    ["jindex-stats", "--field", "dichotomous:0", "--beta", "2.5", "--n-grid", "100"],
    ["phase-diagram", "--h-max", "0.7"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rfcw", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "usage" in proc.stderr
