from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import pytest

from jointreg.algebra import parse_poly
from jointreg.cli import main
from jointreg.heights import LogLinear, sample_points
from jointreg.harness import (
    NotAMorphism,
    band_of,
    discrepancy,
    kappa_estimate,
    northcott_check,
    relative_change,
    seeded_samples,
    verify_inequality,
)
from jointreg.maps import INF, AffineMap, MapFamily, RationalMapP, load_family, power_map

DATA = Path(__file__).resolve().parent.parent / "data"
POWERS = load_family(DATA / "powers.json")
HENON = load_family(DATA / "henon.json")


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def test_discrepancy_block():
    text = discrepancy("r = 8", "r = inf", "kept 8")
    assert text.splitlines() == ["DISCREPANCY", "  expected: r = 8", "  computed: r = inf", "  action:   kept 8"]


def test_band_of():
    ladder = (10, 100, 1000)
    assert band_of(10, ladder) == 0
    assert band_of(999, ladder) == 1
    assert band_of(5, ladder) is None and band_of(1001, ladder) is None


# -- the inequality -------------------------------------------------------------


def test_single_power_map_margin_is_exactly_zero():
    sq = MapFamily.from_affine([AffineMap.of([parse_poly("x^2", ["x", "y"]), parse_poly("y^2", ["x", "y"])])])
    pts, spec = seeded_samples(2, 0, 300, 10, 10**4)
    rep = verify_inequality(sq, INF, pts, sample_spec=spec)
    assert rep.form == "jointly" and rep.notices
    assert rep.min_margin.sign() == 0 and rep.violations_fitted == 0


def test_power_pair_margin_is_the_height():
    pts, spec = seeded_samples(2, 3, 200, 10, 10**4)
    rep = verify_inequality(POWERS, INF, pts, sample_spec=spec, keep_rows=True)
    assert rep.form == "main" and rep.coefficient == 1
    assert all(row.margin == LogLinear.log(row.magnitude) for row in rep.rows)
    assert rep.violations_strict == 0
    buf = io.StringIO()
    rep.write_csv(buf)
    assert buf.getvalue().splitlines()[0] == "point,M(P),M(f1P),M(f2P),sign,margin"


def test_verify_requires_regularity():
    pts, _ = seeded_samples(3, 0, 50, 10, 100)
    with pytest.raises(ValueError, match="jointly regular"):
        verify_inequality(HENON, 8, pts)
    rep = verify_inequality(HENON, 8, pts, override_regularity=True)
    assert rep.notices[0].startswith("WARNING")
    assert rep.violations_fitted == 0


def test_verify_deterministic_across_workers():
    pts, spec = seeded_samples(2, 7, 400, 10, 10**5)
    g = load_family(DATA / "monomial_pair_h.json")
    a = verify_inequality(g, 2, pts, sample_spec=spec)
    b = verify_inequality(g, 2, pts, sample_spec=spec, workers=2)
    assert a.format() == b.format()


def test_relative_change():
    assert relative_change(LogLinear.log(2), LogLinear.log(2)) == 0
    assert relative_change(LogLinear(), LogLinear()) == 0
    assert abs(relative_change(LogLinear.log(4), LogLinear.log(2)) - 0.5) < 1e-12


# -- Northcott and kappa --------------------------------------------------------


def test_northcott_power_map_is_exact():
    pts = sample_points(2, 10, 10**4, 300, seed=1)
    rep = northcott_check(power_map(2, 3), pts)
    assert rep.c1 == LogLinear() and rep.c2 == LogLinear()
    assert rep.degree == 3


def test_northcott_linear_map_has_finite_constants():
    f = AffineMap.of([parse_poly("x + y", ["x", "y"]), parse_poly("y", ["x", "y"])])
    pts = sample_points(2, 10, 10**4, 500, seed=2)
    rep = northcott_check(f, pts)
    assert 0 <= float(rep.c1) <= 1 and 0 <= float(rep.c2) <= 1


def test_northcott_rejects_non_morphism():
    g1 = RationalMapP([parse_poly(t, ["X", "Y", "Z"]) for t in ("X^2", "Y*Z", "Z^2")])
    with pytest.raises(NotAMorphism):
        northcott_check(g1, [(1, 1)])


def test_kappa_power_maps_is_two():
    trace = kappa_estimate(POWERS, ladder=(10, 100, 1000), per_band=200)
    assert [b.exact for b in trace] == [2, 2]
    assert [b.render() for b in trace] == ["2", "2"]


def test_kappa_deterministic():
    a = kappa_estimate(HENON, ladder=(10, 100, 1000), per_band=200, seed=4)
    b = kappa_estimate(HENON, ladder=(10, 100, 1000), per_band=200, seed=4, workers=2)
    assert a == b
    with pytest.raises(ValueError):
        kappa_estimate(HENON, ladder=(1, 10))


# -- CLI ------------------------------------------------------------------------


def test_cli_height():
    code, out = run("height", "(1/2, 3)")
    assert code == 0 and "M = 6" in out


def test_cli_dratio_example():
    code, out = run("dratio", "--map", "[X^2 : Y*Z : Z^2]")
    assert code == 0
    assert "r = 2" in out and "(1; 1, 2)" in out and "(2; 1, 2)" in out


def test_cli_dratio_unavailable_is_domain_error(capsys):
    code, _ = run("dratio", "--map", "[X*Y : Y^2 : X*Z]")
    assert code == 1 and "not contained in H" in capsys.readouterr().err


def test_cli_resolve_and_script_roundtrip(tmp_path, capsys):
    script = tmp_path / "s.json"
    code, out = run("resolve", "--map", "[X^2:Y*Z:Z^2]", "--script-out", script)
    assert code == 0 and "D-ratio: 2" in out
    data = json.loads(script.read_text())
    data.append({"chart": "U1/1/1", "point": [0, 1]})
    script.write_text(json.dumps(data))
    code, out = run("resolve", "--map", "[X^2:Y*Z:Z^2]", "--script", script)
    assert code == 0 and "(1; 1, 2, 2)" in out and "D-ratio: 2" in out
    script.write_text(json.dumps(data[:1]))
    code, _ = run("resolve", "--map", "[X^2:Y*Z:Z^2]", "--script", script)
    assert code == 1 and "residual base point" in capsys.readouterr().err


def test_cli_delta_henon():
    code, out = run("delta", "--family", DATA / "henon.json")
    assert code == 0
    assert "delta = 2/3" in out and "DISCREPANCY" in out


def test_cli_check_regular():
    code, out = run("check-regular", "--family", DATA / "monomial_pair_h.json")
    assert code == 0 and "Empty" in out
    code, out = run("check-regular", "--family", DATA / "henon.json", "--expect-regular")
    assert code == 0 and "DISCREPANCY" in out and "[0:1:0:0]" in out


def test_cli_compose_and_eval():
    code, out = run("compose", "--map", "[Y*Z:X*Z:X*Y]", "--map", "[Y*Z:X*Z:X*Y]")
    assert code == 0 and "[X : Y : Z]" in out
    code, out = run("eval", "--family", DATA / "henon.json", "--point", "(1,2,3)")
    assert code == 0 and "(3, 10, 3)" in out


def test_cli_find_preperiodic(tmp_path):
    path = tmp_path / "pts.csv"
    code, _ = run("find-preperiodic", "--family", DATA / "squares.json", "--r", "1", "--margin", "7/10", "--out", path)
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    finite = {r["point"] for r in rows if r["verdict"] == "Finite"}
    assert finite == {"(-1)", "(0)", "(1)"}
    assert {r["bound_used"] for r in rows} == {"3"}


def test_cli_orbit_and_telescope():
    code, out = run("orbit", "--family", DATA / "squares.json", "--point", "(-1)")
    assert code == 0 and "Finite" in out and "orbit size 2" in out
    code, out = run("telescope", "--family", DATA / "henon.json", "--point", "(1,2,3)", "--depth", "1", "--r", "8")
    assert code == 0 and "exact agreement: True" in out


def test_cli_verify_seeded(tmp_path):
    args = ["verify", "--family", DATA / "monomial_pair_h.json", "--r", "2", "--samples", "300", "--seed", "5"]
    c1, o1 = run(*args)
    c2, o2 = run(*args, "--workers", "2")
    assert c1 == c2 == 0 and o1 == o2
    assert "violations of the fitted inequality: 0" in o1


def test_cli_verify_refuses_irregular_family():
    code, out = run("verify", "--family", DATA / "henon.json", "--r", "8", "--samples", "20")
    assert code == 1


def test_cli_kappa_and_northcott():
    code, out = run("kappa", "--family", DATA / "powers.json", "--samples", "50", "--ladder", "10,100,1000")
    assert code == 0 and out.count(" 2\n") == 2
    code, out = run("northcott", "--map", "[X^2:Y^2:Z^2]", "--samples", "50")
    assert code == 0 and "C1 = 0" in out
    code, out = run("northcott", "--map", "[X^2:Y*Z:Z^2]", "--samples", "50")
    assert code == 1


def test_cli_usage_errors():
    assert run("bogus")[0] == 2
    assert run("dratio")[0] == 2
    assert run("delta", "--family", DATA / "squares.json", "--r", "x")[0] == 2
    assert run("height", "(1/0)")[0] in (1, 2)
