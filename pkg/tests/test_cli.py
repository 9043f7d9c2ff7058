import json
import math

import pytest

from cs_spectra.cli import RunConfig, main, make_config, parse_ladder, parse_range
from cs_spectra.curves import trig_loop
from cs_spectra.errors import ValidationError
from cs_spectra.measure import parse_measure
from cs_spectra.prequantum import curve_to_json, lift_theta
from cs_spectra.trig import TrigPoly


def call(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def error_code(err):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    doc = json.loads(lines[0])
    assert set(doc) == {"code", "message", "context"}
    return doc["code"]


def write_curve(tmp_path, c, name="curve.json"):
    path = tmp_path / name
    path.write_text(curve_to_json(c))
    return str(path)


def test_lens_example(tmp_path, capsys):
    status, out, _ = call(capsys, "lens", "--p", "5", "--q", "1", "--moments", "0..10", "--out", str(tmp_path))
    assert status == 0
    m = parse_measure((tmp_path / "measure.json").read_text())
    assert len(m) == 3
    rows = (tmp_path / "moments.csv").read_text().strip().splitlines()
    assert len(rows) == 12  # header + 11 rows
    assert json.loads(out)["atoms"] == 3


def test_torus_bundle_example(tmp_path, capsys):
    status, _, _ = call(capsys, "torus-bundle", "--matrix", "4,1,3,1", "--moments", "0..6", "--out", str(tmp_path))
    assert status == 0
    m = parse_measure((tmp_path / "measure.json").read_text())
    atoms = sorted(m.atoms)
    assert atoms[0][0] == 0 and abs(atoms[0][1] - 1 / 3) < 1e-15
    assert abs(atoms[1][0] - 2 * math.pi / 3) < 1e-12 and abs(atoms[1][1] - 2 / 3) < 1e-15


def test_dehn_example(tmp_path, capsys):
    path = write_curve(tmp_path, trig_loop())
    status, out, _ = call(capsys, "dehn", "--curve", path, "--family", "1,0,0,1", "--ell", "1",
                          "--ladder", "64:4096:x2", "--out", str(tmp_path / "o"))
    assert status == 0
    summary = json.loads(out)
    assert summary["ladder"] == [64, 128, 256, 512, 1024, 2048, 4096]
    assert summary["slope"] <= -0.9
    assert (tmp_path / "o" / "reports.csv").read_text().startswith("n,ell,exact_re")


def test_svg_and_csv_formats(tmp_path, capsys):
    status, _, _ = call(capsys, "residue", "--p", "7", "--svg", "--format", "csv", "--out", str(tmp_path))
    assert status == 0
    assert (tmp_path / "histogram.svg").read_text().startswith("<svg")
    assert len(parse_measure((tmp_path / "measure.csv").read_text(), "csv")) == 4
    assert (tmp_path / "closed_form.csv").exists()


def test_poisson_and_brieskorn(tmp_path, capsys):
    status, out, _ = call(capsys, "poisson", "--example", "1", "--K", "50")
    assert status == 0 and json.loads(out)["lhs"] == 1.0
    status, out, _ = call(capsys, "brieskorn", "--primes", "2,3,5", "--out", str(tmp_path))
    assert status == 0
    m = parse_measure((tmp_path / "measure.json").read_text())
    assert len(m) == 2


@pytest.mark.parametrize("argv,code", [
    (["torus-bundle", "--matrix", "1,2,3"], "validation"),
    (["torus-bundle", "--matrix", "2,1,1,2"], "not-unimodular"),
    (["torus-bundle", "--matrix", "1,1,0,1"], "parabolic-monodromy"),
    (["torus-bundle", "--matrix", "a,b,c,d"], "validation"),
    (["torus-bundle"], "validation"),
    (["lens", "--p", "6", "--q", "3"], "not-coprime"),
    (["lens", "--p", "5"], "validation"),
    (["brieskorn", "--primes", "3,3,5"], "validation"),
    (["poisson", "--example", "9"], "validation"),
    (["dehn", "--curve", "/nonexistent/curve.json"], "validation"),
    (["residue", "--p", "7", "--moments", "5..1"], "validation"),
    (["residue", "--p", "7", "--threads", "0"], "validation"),
    (["bogus"], "validation"),
])
def test_validation_errors_exit_2(capsys, argv, code):
    status, out, err = call(capsys, *argv)
    assert status == 2 and out == ""
    assert error_code(err) == code


def test_bad_ladder(tmp_path, capsys):
    path = write_curve(tmp_path, trig_loop())
    for ladder in ("64:32:x2", "64:4096:x1", "64:4096:*2", "0,1,2", "a:b:x2"):
        status, _, err = call(capsys, "dehn", "--curve", path, "--ladder", ladder)
        assert status == 2, ladder


def test_tangential_curve_exit_3(tmp_path, capsys):
    # x = pi (1 - cos t) has a minimum on the lattice at t = 0; y = 0 makes g = x for every n
    c = lift_theta(TrigPoly(0.0, ((0.0, math.pi, 0.0), (1.0, -math.pi, 0.0))), TrigPoly.const(0.0),
                   (-1.0, 1.3))
    path = write_curve(tmp_path, c)
    status, _, err = call(capsys, "dehn", "--curve", path, "--ell", "0", "--ladder", "64,128")
    assert status == 3
    assert error_code(err) == "non-transverse"


def test_endpoint_hit_exit_3(tmp_path, capsys):
    c = lift_theta(TrigPoly(1.0), TrigPoly(0.1), (0.0, 1.0))
    path = write_curve(tmp_path, c)
    status, _, err = call(capsys, "dehn", "--curve", path, "--ell", "1", "--ladder", "64,128")
    assert status == 3
    assert error_code(err) == "endpoint-hit"


def test_unknown_config_field(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 5, "q": 1, "colour": "red"}))
    status, _, err = call(capsys, "lens", "--config", str(cfg))
    assert status == 2 and "colour" in json.loads(err)["message"]
    cfg.write_text(json.dumps({"subcommand": "residue", "p": 5}))
    status, _, _ = call(capsys, "lens", "--config", str(cfg))
    assert status == 2
    cfg.write_text("[1, 2]")
    assert call(capsys, "lens", "--config", str(cfg))[0] == 2
    cfg.write_text("{not json")
    assert call(capsys, "lens", "--config", str(cfg))[0] == 2


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 5, "q": 1, "moments": "0..3", "symmetrize": True}))
    c = make_config(["lens", "--config", str(cfg), "--q", "2"])
    assert (c.p, c.q, c.moments, c.symmetrize) == (5, 2, "0..3", True)


def test_threads_env(tmp_path, capsys, monkeypatch):
    path = write_curve(tmp_path, trig_loop())
    args = ["dehn", "--curve", path, "--ell", "1", "--ladder", "64,96,128,160"]
    monkeypatch.setenv("CS_SPECTRA_THREADS", "3")
    assert call(capsys, *args, "--out", str(tmp_path / "a"))[0] == 0
    monkeypatch.setenv("CS_SPECTRA_THREADS", "nope")
    assert call(capsys, *args)[0] == 2
    monkeypatch.delenv("CS_SPECTRA_THREADS")
    assert call(capsys, *args, "--out", str(tmp_path / "b"))[0] == 0
    assert (tmp_path / "a" / "reports.json").read_bytes() == (tmp_path / "b" / "reports.json").read_bytes()


def test_parse_helpers():
    assert parse_range("0..3") == [0, 1, 2, 3]
    assert parse_range("1,5") == [1, 5]
    assert parse_ladder("64:4096:x2") == [64, 128, 256, 512, 1024, 2048, 4096]
    assert parse_ladder("10:40:+10") == [10, 20, 30, 40]
    with pytest.raises(ValidationError):
        RunConfig("lens", p=5, q=1, format="xml").validate()
