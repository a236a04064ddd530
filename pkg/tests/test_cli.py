import json
import subprocess
import sys

import jsonschema
import pytest

from eqdisc.cli import CHART_SCHEMA, main
from eqdisc.series import SERIES_SCHEMA, TruncatedSeries
from eqdisc.toric import FAN_SCHEMA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_validate_p2(capsys, fans_dir):
    data = run_json(capsys, "validate", "--fan", fans_dir / "p2.json")
    assert data["summary"] == "complete, smooth, Fano"
    code, out, _ = run(capsys, "validate", "--fan", fans_dir / "p2.json", "--format", "pretty")
    assert code == 0 and out.splitlines()[0] == "complete, smooth, Fano"


def test_validate_failure(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "rays": [[2, 0], [0, 1], [-1, -1]], "cones": [[0, 1]], "areas": [1, 1, 1]}))
    code, out, _ = run(capsys, "validate", "--fan", bad)
    assert code == 1
    data = json.loads(out)
    assert data["index"] == 0 and "non-primitive ray 0" in data["problems"][0]


@pytest.mark.parametrize(
    "payload,pointer",
    [
        ({"dim": 2, "cones": [], "areas": []}, "/"),
        ({"dim": 2, "rays": [[1, "x"]], "cones": [], "areas": [1]}, "/rays/0/1"),
        ({"dim": 2, "rays": [[1, 0]], "cones": [], "areas": ["1.5"]}, "/areas/0"),
        ({"dim": 0, "rays": [], "cones": [], "areas": []}, "/dim"),
    ],
)
def test_schema_errors_have_pointers(capsys, tmp_path, payload, pointer):
    f = tmp_path / "fan.json"
    f.write_text(json.dumps(payload))
    code, _, err = run(capsys, "validate", "--fan", f)
    assert code == 2
    assert f"schema error at {pointer}:" in err


def test_io_errors(capsys, tmp_path):
    code, _, err = run(capsys, "validate", "--fan", tmp_path / "missing.json")
    assert code == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    code, _, err = run(capsys, "validate", "--fan", broken)
    assert code == 2 and "invalid JSON" in err


def test_glue_sphere(capsys):
    data = run_json(capsys, "glue-sphere", "--cutoff", 4)
    jsonschema.validate(data["series"], SERIES_SCHEMA)
    s = TruncatedSeries.from_json(data["series"])
    assert s.pretty() == "-w - 1/2*w^2 - 1/3*w^3 - 1/4*w^4"
    code, out, _ = run(capsys, "--format", "pretty", "glue-sphere", "--cutoff", 4)
    assert "-w - 1/2*w^2 - 1/3*w^3 - 1/4*w^4" in out


def test_glue_sphere_coords(capsys, tmp_path):
    from eqdisc.series import SeriesContext

    ctx = SeriesContext.uniform(["s"], 4)
    s = ctx.var("s")
    chart = {"chart": "L0", "coords": {"u": (1 + s).to_json(), "v": s.to_json()}}
    f = tmp_path / "chart.json"
    f.write_text(json.dumps(chart))
    data = run_json(capsys, "glue-sphere", "--cutoff", 4, "--direction", "L0L1", "--coords", f)
    jsonschema.validate(data, CHART_SCHEMA)
    back = run_json(capsys, "glue-sphere", "--cutoff", 4, "--direction", "L1L0", "--coords", _write(tmp_path, data))
    assert TruncatedSeries.from_json(back["coords"]["u"]) == 1 + s
    assert TruncatedSeries.from_json(back["coords"]["v"]) == s
    code, _, err = run(capsys, "glue-sphere", "--cutoff", 4, "--direction", "L2L0", "--coords", f)
    assert code == 2


def _write(tmp_path, data):
    f = tmp_path / "next.json"
    f.write_text(json.dumps(data))
    return f


def test_glue_generic_coords(capsys):
    data = run_json(capsys, "glue-sphere", "--cutoff", 2, "--direction", "L1L0")
    u = TruncatedSeries.from_json(data["coords"]["u"])
    assert u.pretty() == "1 + y1 + 1/2*y1^2"


def test_mirror_map_f2(capsys, fans_dir):
    data = run_json(capsys, "mirror-map", "--fan", fans_dir / "f2.json", "--cutoff", 3)
    ray = data["rays"][1]
    assert set(ray) == {"ray", "g", "corrected"}
    assert TruncatedSeries.from_json(ray["corrected"]).pretty() == "1 + q2"
    for r in data["rays"]:
        jsonschema.validate(r["g"], SERIES_SCHEMA)
        jsonschema.validate(r["corrected"], SERIES_SCHEMA)


def test_g_function(capsys, fans_dir):
    data = run_json(capsys, "g-function", "--fan", fans_dir / "f2.json", "--ray", 1, "--cutoff", 5)
    assert data["ray"] == 1
    g = TruncatedSeries.from_json(data["g"])
    assert g.pretty() == "q2 + 3/2*q2^2 + 10/3*q2^3 + 35/4*q2^4 + 126/5*q2^5"
    code, _, _ = run(capsys, "g-function", "--fan", fans_dir / "f2.json", "--ray", 9)
    assert code == 1


def test_potential_eval_and_crit(capsys, fans_dir):
    data = run_json(capsys, "potential", "--fan", fans_dir / "p1.json", "--eval", "0.25,3.141592653589793j,0", "--crit", "0.25")
    assert data["pretty"] == "T^1/2*exp(x1) + T^1/2*exp(-x1) + lambda1*x1"
    assert data["eval"]["value"][0] == pytest.approx(-1.0)
    assert len(data["crit"]["points"]) == 2
    data = run_json(capsys, "potential", "--fan", fans_dir / "p2.json", "--subtorus", "1,0;0,1", "--eval", "0.5;0,0;1,1")
    assert data["eval"]["value"][0] == pytest.approx(3 * 0.5 ** (1 / 3))


def test_potential_bad_inputs(capsys, fans_dir):
    code, _, _ = run(capsys, "potential", "--fan", fans_dir / "p1.json", "--eval", "2,0,0")
    assert code == 1
    code, _, _ = run(capsys, "potential", "--fan", fans_dir / "p2.json", "--subtorus", "1,1;2,2")
    assert code == 1
    code, _, _ = run(capsys, "potential", "--fan", fans_dir / "p1.json", "--eval", "0.5,0,0,0")
    assert code == 2


def test_crit_seed_is_reproducible(capsys, fans_dir):
    args = ("crit", "--fan", fans_dir / "f2.json", "--t", 0.3, "--seeds", 32, "--seed", 5)
    a = run(capsys, *args)
    b = run(capsys, *args)
    assert a == b and a[0] == 0
    assert json.loads(a[1])["status"] == "ok"


def test_crit_no_convergence(capsys, fans_dir):
    data = run_json(capsys, "crit", "--fan", fans_dir / "p1.json", "--t", 0.3, "--seeds", 0)
    assert data["status"] == "no-convergence" and data["points"] == []


def test_morse_check(capsys):
    data = run_json(capsys, "morse-check", "--l", 2, "--n", 2)
    assert data["delta_squared_zero"] and data["matches_expected"]
    assert data["ranks"] == {"0": 1, "5": 2, "10": 1}
    assert data["delta_X_i"][0]["delta"] == {"1_L (x) lambda1": 1}
    data = run_json(capsys, "morse-check", "--l", 1, "--n", 1, "--fiber", "s2")
    assert data["ranks"] == {"0": 1, "2": 1, "3": 1, "5": 1}


def test_flow(capsys):
    data = run_json(capsys, "flow", "--theta", 0, "--phase", 0.0)
    assert data["connects"] is False
    data = run_json(capsys, "flow", "--phase", 1.5707963267948966, "--tolerance", 1e-6)
    assert data["theta_plus"] + data["phase"] == pytest.approx(3.141592653589793, abs=1e-6)


def test_byte_identical_output(capsys, fans_dir):
    for argv in (
        ("mirror-map", "--fan", fans_dir / "f2.json", "--cutoff", 4),
        ("flow", "--phase", 0.7),
        ("potential", "--fan", fans_dir / "p2.json", "--crit", "0.2", "--seed", 1),
    ):
        assert run(capsys, *argv) == run(capsys, *argv)


def test_fan_files_match_schema(fans_dir):
    for f in fans_dir.glob("*.json"):
        jsonschema.validate(json.loads(f.read_text()), FAN_SCHEMA)


def test_console_script_module(fans_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "eqdisc.cli", "validate", "--fan", str(fans_dir / "f2.json"), "--format", "pretty"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("complete, smooth, semi-Fano")


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["morse-check"])
    assert exc.value.code == 2
