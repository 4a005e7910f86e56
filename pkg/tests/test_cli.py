import json
import math

import pytest

from harmchains.analysis import SweepTable
from harmchains.cli import main
from harmchains.config import parse_config
from harmchains.errors import ConfigError
from harmchains.model import BlockSpec, Geometry
from harmchains.oracle import block_indices, dense_entropy, dense_ground_state

BASE = """
[model]
lambda = {lam}
q = {q}

[geometry]
n_x = {n_x}
n_y = {n_y}
"""


def write_config(tmp_path, lam="4, 1", q="1", n_x=6, n_y=6, extra="", name="run.ini"):
    path = tmp_path / name
    path.write_text(BASE.format(lam=lam, q=q, n_x=n_x, n_y=n_y) + extra)
    return str(path)


def test_parse_config_full():
    cfg = parse_config(BASE.format(lam="4,1", q="1", n_x=8, n_y=16) +
                       "[block]\nl_x = 2\nl_y = 3\nplacement = offset=1\n[run]\nmode = permissive\n")
    assert cfg.couplings.lam.coeffs == (4.0, 1.0)
    assert cfg.geometry == Geometry(8, 16)
    assert cfg.block == BlockSpec(2, 3, "offset=1")
    assert cfg.mode == "permissive"


@pytest.mark.parametrize("text", [
    "[model]\nlambda = 4\n[geometry]\nn_x = 2\nn_y = 2\n",                 # missing q
    BASE.format(lam="4", q="1", n_x=2, n_y=2) + "[run]\nspeed = 3\n",      # unknown key
    BASE.format(lam="4", q="1", n_x=2, n_y=2) + "[extra]\na = 1\n",        # unknown section
    BASE.format(lam="4,x", q="1", n_x=2, n_y=2),
    BASE.format(lam="4", q="1", n_x="two", n_y=2),
    "not an ini file",
])
def test_parse_config_rejects(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate", "--config", write_config(tmp_path)]) == 0
    assert main(["validate", "--config", write_config(tmp_path, lam="3, 1")]) == 2
    assert "min(λ−q)=0" in capsys.readouterr().out
    missing = tmp_path / "missing.ini"
    missing.write_text("[model]\nlambda = 4\nq = 1\n[geometry]\nn_x = 3\n")
    assert main(["validate", "--config", str(missing)]) == 1
    assert main(["validate", "--config", str(tmp_path / "nope.ini")]) == 1
    assert main(["validate"]) == 1


def test_entropy_matches_oracle(tmp_path, capsys):
    cfg = write_config(tmp_path, extra="[block]\nl_x = 2\nl_y = 2\n")
    assert main(["entropy", "--config", cfg]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "l_x,l_y,S,S1,S2,wall_ms"
    s = float(out[1].split(",")[2])
    g = Geometry(6, 6)
    from harmchains.model import REFERENCE_MODEL
    expected = dense_entropy(dense_ground_state(REFERENCE_MODEL, g), block_indices(g, BlockSpec(2, 2)))
    assert abs(s - expected) < 1e-8

    assert main(["entropy", "--config", cfg, "--bits"]) == 0
    bits = float(capsys.readouterr().out.splitlines()[1].split(",")[2])
    assert bits == pytest.approx(s / math.log(2))


def test_entropy_full_block_and_errors(tmp_path, capsys):
    cfg = write_config(tmp_path, extra="[block]\nl_x = 6\nl_y = 6\n")
    assert main(["entropy", "--config", cfg]) == 0
    assert abs(float(capsys.readouterr().out.splitlines()[1].split(",")[2])) < 1e-9
    too_big = write_config(tmp_path, extra="[block]\nl_x = 7\nl_y = 2\n", name="big.ini")
    assert main(["entropy", "--config", too_big]) == 1
    assert main(["entropy", "--config", write_config(tmp_path, extra="[block]\nl_x = 2\nl_y = 2\n",
                                                     lam="3, 1", name="bad.ini")]) == 2
    assert main(["entropy", "--config", cfg, "--placement", "sideways"]) == 1


def test_sweep_then_fit(tmp_path, capsys):
    cfg = write_config(tmp_path, n_x=64, n_y=1024)
    csv_path = tmp_path / "sweep.csv"
    rc = main(["sweep", "--config", cfg, "--grid", "lx=2,4,8;ly=16,32,64", "--out", str(csv_path)])
    assert rc == 0
    table = SweepTable.from_csv(csv_path.read_text())
    assert len(table) == 9
    assert main(["fit", str(csv_path)]) == 0
    record = json.loads(capsys.readouterr().out)
    assert 0.3 < record["b"] < 0.7
    assert main(["sweep", "--config", cfg]) == 1   # no grid anywhere


def test_fit_synthetic_exact(tmp_path, capsys):
    lines = ["l_x,l_y,S,S1,S2,wall_ms"]
    for lx in (2, 4, 8):
        for ly in (16, 32, 64):
            s = 0.5 * lx * math.log(ly) + 2 * lx + 3 * ly + 1
            lines.append(f"{lx},{ly},{s:.17g},0,0,")
    path = tmp_path / "synthetic.csv"
    path.write_text("\n".join(lines) + "\n")
    assert main(["fit", str(path)]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["b"] == pytest.approx(0.5, abs=1e-10)
    assert record["bounds_r_squared"] == pytest.approx(1.0)
    path.write_text("x,y\n1,2\n")
    assert main(["fit", str(path)]) == 1


def test_oracle_check(tmp_path, capsys):
    assert main(["oracle-check", "--config", write_config(tmp_path)]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["pass"] and record["max_entropy_error"] < 1e-8
    assert main(["oracle-check", "--config", write_config(tmp_path, n_x=100, n_y=100, name="huge.ini")]) == 1


def test_oracle_check_reports_mismatch(tmp_path, capsys):
    cfg = write_config(tmp_path, n_x=3, n_y=3, extra="[run]\ntolerance = 0\n")
    assert main(["oracle-check", "--config", cfg, "--corner-only"]) == 4


def test_spectrum(tmp_path, capsys):
    assert main(["spectrum", "--config", write_config(tmp_path, n_x=8, n_y=4)]) == 0
    rows = capsys.readouterr().out.strip().splitlines()[1:]
    scaled = [float(r.split(",")[3]) for r in rows]
    assert [int(r.split(",")[0]) for r in rows] == [4, 16, 64, 256]
    assert max(scaled) - min(scaled) <= 1e-12


def test_sweep_byte_identical(tmp_path):
    cfg = write_config(tmp_path, n_x=32, n_y=256, extra="[run]\ngrid = lx=2,4;ly=4,8,16\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", cfg, "--out", str(a)]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
