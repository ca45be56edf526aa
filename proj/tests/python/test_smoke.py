import json
import math
from pathlib import Path

import numpy as np
import pytest

import spraykit as sk

ROOT = Path(__file__).resolve().parents[2]


def test_minkowski_metric_and_flat_geodesics():
    m = sk.minkowski(4)
    x = np.array([0.3, 1.0, -2.0, 0.5])
    assert np.allclose(m.metric(x), np.diag([-1.0, 1.0, 1.0, 1.0]))
    assert np.abs(m.christoffel(x)).max() < 1e-8
    w = sk.geodesic_field(m)
    assert np.abs(w(x, np.array([1.2, 0.3, 0.1, 0.0]))).max() < 1e-8


def test_schwarzschild_christoffel_closed_form():
    mass, r = 1.0, 8.0
    m = sk.schwarzschild(mass)
    gamma = m.christoffel(np.array([0.0, r, 1.2, 0.4]))
    assert gamma.shape == (4, 4, 4)
    assert gamma[1, 0, 0] == pytest.approx(mass * (r - 2 * mass) / r**3, rel=1e-6)
    assert gamma[0, 0, 1] == pytest.approx(mass / (r * (r - 2 * mass)), rel=1e-6)
    assert gamma[2, 1, 2] == pytest.approx(1.0 / r, rel=1e-6)


def test_lorentz_motion_stays_on_shell():
    m = sk.minkowski_electric(0.3, 1.0)
    w = sk.lorentz_field(m)
    h = sk.indicator(m, "hyperboloid")
    x0 = np.zeros(4)
    v0 = h.complete(m, x0, np.array([0.2, 0.1, 0.0]))
    assert h(x0, v0) == pytest.approx(1.0, abs=1e-12)
    p = sk.integrate(w, x0, v0, 0.0, 2.0, 400)
    assert not p["truncated"]
    assert p["x"].shape == (401, 4)
    shell = [h(x, v) for x, v in zip(p["x"], p["v"])]
    assert max(abs(s - 1.0) for s in shell) < 1e-8
    # A charge starting at rest gains speed along the field.
    assert np.linalg.norm(p["v"][-1][1:]) > np.linalg.norm(v0[1:])


def test_transform_onto_labtime_is_compatible():
    m = sk.minkowski_electric(0.3, 1.0)
    w = sk.lorentz_field(m)
    lab = sk.indicator(m, "labtime")
    rng = np.random.default_rng(4)
    xs = rng.uniform(-1, 1, size=(8, 4))
    vs = np.column_stack([rng.uniform(1.5, 2.0, 8), rng.uniform(-0.5, 0.5, size=(8, 3))])
    assert sk.compatibility_defect(w, lab, xs, vs) > 1e-3
    assert sk.compatibility_defect(sk.transform_to_domain(w, lab), lab, xs, vs) < 1e-10
    psi = sk.bivector_from_field(w)
    back = sk.field_from_bivector(psi, lab)
    assert sk.bivectors_equal(psi, sk.bivector_from_field(back), xs, vs)


def test_current_of_gaussian_at_rest():
    m = sk.minkowski(2)
    h = sk.indicator(m, "hyperboloid")
    s = 0.1
    f = lambda x, v: math.exp(-0.5 * (v[1] / s) ** 2)
    J, T, warn = sk.current_from_E(m, f, h, np.array([-1.0]), np.array([1.0]), np.zeros(2), nodes=48)
    assert not warn
    assert J[0] == pytest.approx(s * math.sqrt(2 * math.pi), rel=1e-6)
    assert abs(J[1]) < 1e-12
    assert np.allclose(T, T.T, atol=0)
    assert T[0, 0] > J[0]


def test_unknown_model_is_config_error():
    with pytest.raises(sk.ConfigError):
        sk.model("kerr_newman")
    with pytest.raises(sk.ConfigError, match="kerr_newman"):
        sk.run_config(ROOT / "tests" / "data" / "unknown_model.json")


def test_run_bundled_scenario(tmp_path):
    names = sk.scenario_names()
    assert "nonmetric-slip" in names
    s = sk.run_scenario("nonmetric-slip", seed=11, out=tmp_path)
    assert s["pass"] is True
    assert s["seed"] == 11
    on_disk = json.loads((tmp_path / "nonmetric-slip" / "summary.json").read_text())
    assert on_disk["checks"] == s["checks"]


def test_bundled_scenarios_match_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((ROOT / "scenarios" / "schema.json").read_text())
    for name in sk.scenario_names():
        jsonschema.validate(json.loads(sk.scenario_text(name)), schema)
