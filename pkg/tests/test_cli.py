import csv
import io
import json
import math
import subprocess
import sys

import pytest

from groupalg.algebra import AlgebraElement, dumps_element, loads_element
from groupalg.cli import config_argv, main
from groupalg.config import ConfigError, ExperimentConfig
from groupalg.groups import parse_group


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    def write(name, group, terms):
        spec = parse_group(group)
        a = AlgebraElement(spec, {spec.parse(g): c for g, c in terms})
        p = tmp_path / name
        p.write_text(dumps_element(a))
        return str(p)

    return write


def test_ball_z(capsys):
    code, out, _ = run(capsys, "ball", "z", "10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["sigma"]) for r in rows[1:]] == [2] * 10


def test_ball_f2_beta(capsys):
    code, out, _ = run(capsys, "ball", "f2", "6")
    assert out.strip().splitlines()[-1].split(",")[:3] == ["6", "972", "1457"]


def test_ball_heis_slope(capsys):
    code, out, _ = run(capsys, "ball", "heis", "12")
    rows = list(csv.DictReader(io.StringIO(out)))
    beta = [int(r["beta"]) for r in rows]
    slope = (math.log(beta[12]) - math.log(beta[9])) / (math.log(12) - math.log(9))
    assert 3.5 < slope < 4.5


def test_ball_cache_and_cap(capsys, tmp_path):
    cache = tmp_path / "cache"
    code, first, _ = run(capsys, "--cache-dir", str(cache), "ball", "f2", "5")
    assert code == 0 and any(cache.iterdir())
    code, second, _ = run(capsys, "--cache-dir", str(cache), "ball", "f2", "5")
    assert first == second
    code, _, err = run(capsys, "--ball-cap", "100", "ball", "f2", "6")
    assert code == 3 and "error" in err


def test_growth_commands(capsys):
    code, d = run_json(capsys, "growth", "poly(1,1)", "subexp(0.5)")
    assert code == 0 and d["verdict"] == "precedes" and d["witness"] is not None
    code, d = run_json(capsys, "growth", "factorial", "--check-submult", "30")
    assert code == 1 and d["submultiplicative"]["counterexample"] == [1, 1]
    code, d = run_json(capsys, "growth", "poly(1,1)", "poly(0,3,0,1)")
    assert d["verdict"] == "equivalent"
    code, d = run_json(capsys, "--caps", "2,2", "growth", "subexp(1)", "poly(1,1)")
    assert d["witness"] is None and d["caps"] == [2, 2]


def test_bad_inputs(capsys):
    assert run(capsys, "growth", "poly(1,2)")[0] == 2
    assert run(capsys, "ball", "q7", "3")[0] == 2
    assert run(capsys, "nosuch")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "--caps", "3", "growth", "factorial")[0] == 2


def test_norm_unit(capsys, files):
    p = files("unit.txt", "f2", [("1", 1)])
    for sigma in ("poly(1,1)", "factorial", "subexp(0.5)"):
        code, d = run_json(capsys, "norm", "f2", p, "--sigma", sigma, "--R", "3")
        assert code == 0 and d["values"][0]["norm"] == 1.0
    code, d = run_json(capsys, "norm", "f2", p, "--p", "2")
    assert "schauder" not in d


def test_norm_value(capsys, files):
    p = files("a.txt", "z", [("0", 1), ("3", 2)])
    code, d = run_json(capsys, "norm", "z", p, "--sigma", "poly(1,1)", "--R", "2")
    assert d["values"][0]["norm"] == pytest.approx(33.0)
    assert d["schauder"]["holds"]


def test_conv_and_product_file(capsys, files, tmp_path):
    a = files("a.txt", "f2", [("a", 1), ("b", 1)])
    b = files("b.txt", "f2", [("A", 1)])
    prod = tmp_path / "ab.txt"
    code, d = run_json(capsys, "conv", "f2", a, b, "--check-submult", "--R", "3", "--product", str(prod))
    assert code == 0 and d["check"]["holds"]
    spec = parse_group("f2")
    ab = loads_element(spec, prod.read_text())
    assert ab == AlgebraElement(spec, {(): 1, spec.parse("bA"): 1})
    code, d = run_json(capsys, "conv", "z", files("c.txt", "z", [("1", 1), ("2", -1)]), files("d.txt", "z", [("3", 1)]), "--sigma", "factorial", "--eps", "0.5")
    assert code == 0 and d["check"]["holds"]
    # factorial is not submultiplicative: precondition error
    assert run(capsys, "conv", "z", files("e.txt", "z", [("2", 1)]), files("f.txt", "z", [("3", 1)]), "--sigma", "factorial", "--check-submult")[0] == 2


def test_hopf(capsys, files):
    a = files("a.txt", "f2", [("ab", 1), ("B", 2)])
    b = files("b.txt", "f2", [("a", 1), ("1", -1)])
    code, d = run_json(capsys, "hopf", "f2", a, "--check-coproduct", "--bimodule", b, "--R", "2")
    assert code == 0 and all(c["holds"] for c in d["checks"]) and len(d["checks"]) == 2
    assert d["counit"] == [3.0, 0.0] and d["trace"] == [0.0, 0.0]
    spec = parse_group("f2")
    assert loads_element(spec, "\n".join(d["antipode"])) == AlgebraElement(spec, {spec.parse("BA"): 1, spec.parse("b"): 2})


def test_nuclearity(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, d = run_json(capsys, "nuclearity", "f2", "poly(1,1)", "--csv", str(out))
    assert code == 0 and d["verdict"] == "divergent-evidence" and d["symbolic_verdict"] == "not-nuclear"
    assert out.read_text().startswith("n,S(rho=0.5)")
    code, d = run_json(capsys, "nuclearity", "f2", "subexp(1)")
    assert d["verdict"] == "summable-evidence" and d["symbolic_verdict"] == "nuclear"
    code, d = run_json(capsys, "nuclearity", "z2", "poly(1,1)", "40", "--rho-grid", "4")
    assert d["grid"] == [4.0] and d["verdict"] == "summable-evidence"


def test_complete_growth(capsys):
    code, d = run_json(capsys, "complete-growth", "f2", "subexp(1)", "1.0", "2.0", "30")
    q = 3 / math.e**2
    assert abs(d["T_N"] - (1 + 4 / 3 * q / (1 - q))) < 1e-6
    assert d["minimal_R"] == 1.5
    assert run(capsys, "complete-growth", "f2", "subexp(1)", "2.0", "2.0", "30")[0] == 2


def test_bw(capsys, files):
    unit = files("u.txt", "z", [("0", 1)])
    code, d = run_json(capsys, "bw", "z", "1.0", "1", unit)
    assert code == 0 and all(v == 1.0 for v in d["values"]) and max(d["tail_bounds"]) == 0
    eg = files("g.txt", "z", [("3", 1)])
    code, d = run_json(capsys, "bw", "z", "1.0", "0", eg, "--k", "3")
    assert d["values"] == [6.0]
    a = files("a.txt", "f2", [("1", 1), ("ab", 0.5)])
    code, d = run_json(capsys, "bw", "f2", "0.5", "2", a)
    assert code == 0 and max(d["tail_bounds"]) < 1e-6
    assert run(capsys, "bw", "z", "1.0", "1", unit, "--ell", "2")[0] == 2


def test_bw_tail_cap(capsys, files):
    unit = files("u.txt", "heis", [("(0,0,0)", 1)])
    code, out, err = run(capsys, "bw", "heis", "0.5", "2", unit, "--radius", "4", "--k-radius", "0")
    assert code == 3 and "tail bound" in err
    # the report is still emitted
    assert json.loads(out)["tail_bounds"][0] > 1e-6


def test_bw_fit(capsys, files):
    unit = files("u.txt", "z", [("0", 1)])
    code, d = run_json(capsys, "bw", "z", "1.0", "2", unit, "--fit", "--radius", "30")
    assert code == 0 and d["pointwise"]["holds"]
    assert d["fitted_constants"]["upper"]["stable"] and d["fitted_constants"]["decay"]["stable"]


def test_output_file_round_trip(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "-o", str(out), "growth", "poly(1,1)", "subexp(0.5)")
    assert stdout == "" and json.loads(out.read_text())["verdict"] == "precedes"


def test_config_files(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "complete-growth", "group": "f2", "sigma": "subexp(1)", "z": 1.0, "R": 2.0, "radius": 30}))
    code, d = run_json(capsys, "--config", str(cfg))
    assert code == 0 and d["minimal_R"] == 1.5
    cfg.write_text(json.dumps({"command": "ball", "group": "z", "radius": 3, "colour": "red"}))
    assert run(capsys, "--config", str(cfg))[0] == 2
    cfg.write_text("[1, 2]")
    assert run(capsys, "--config", str(cfg))[0] == 2
    with pytest.raises(ConfigError):
        ExperimentConfig(command="growth", sigma=["poly(1"])
    with pytest.raises(ConfigError):
        ExperimentConfig(command="ball", group="z", radius=-1)


def test_config_argv():
    c = ExperimentConfig.from_dict({"command": "nuclearity", "group": "z2", "sigma": "poly(1,1)", "rho_grid": [1, 2], "seed": 7})
    assert config_argv(c) == ["--seed", "7", "nuclearity", "z2", "poly(1,1)", "60", "--rho-grid", "1,2"]


def test_verify_all_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["-o", str(a), "verify-all", "--quick"]) == 0
    assert main(["-o", str(b), "verify-all", "--quick"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["ok"] is True


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "groupalg", "ball", "z", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[0].startswith("n,")
