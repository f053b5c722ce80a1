import math

import pytest

import hms_mirror as hm


def test_theta_matches_direct_sum():
    # theta_{2 tau}(0) at tau = i is sum exp(-2 pi n^2)
    direct = sum(math.exp(-2 * math.pi * n * n) for n in range(-20, 21))
    assert abs(hm.theta(1j, 0, level=2) - direct) < 1e-12


def test_theta_quasi_periodicity():
    tau, z = 0.3 + 1.2j, 0.17 - 0.08j
    import cmath
    lhs = hm.theta(tau, z + tau)
    rhs = cmath.exp(-1j * math.pi * tau - 2j * math.pi * z) * hm.theta(tau, z)
    assert abs(lhs - rhs) < 1e-10


def test_verify_suites_pass():
    reports = hm.verify("simple-example")
    assert reports and all(r["pass"] for r in reports)
    assert {r["name"] for r in reports} >= {"simple-m2-basic", "simple-through-mirror"}
    assert "functoriality" in hm.suite_names()


def test_verify_is_deterministic():
    assert hm.verify("serre", seed=3) == hm.verify("serre", seed=3)


def test_mirror_of_bundle():
    bundle = {"kind": "bundle", "degree": 2, "twist_a": [1, 3], "twist_b": 0.25, "nil": [[[0.0, 0.0]]],
              "level": 1, "shift": 0}
    brane = hm.mirror(bundle)
    assert brane["kind"] == "brane"
    assert brane["slope"] == [2, 1]


def test_hom_dimension_is_degree_difference():
    def bundle(n):
        return {"kind": "bundle", "degree": n, "twist_a": [0, 1], "twist_b": 0.0, "nil": [[[0.0, 0.0]]],
                "level": 1, "shift": 0}
    out = hm.hom(bundle(0), bundle(3))
    assert out["dimension"] == 3
    assert len(out["basis"]) == 3


def test_errors_carry_a_code():
    with pytest.raises(hm.HMSError) as info:
        hm.verify("no-such-suite")
    assert info.value.args[0] == "INVALID_ARGUMENT"


def test_outputs_match_the_schema():
    jsonschema = pytest.importorskip("jsonschema")
    import json
    import pathlib
    schema = json.loads((pathlib.Path(__file__).resolve().parents[2] / "docs" / "schema.json").read_text())

    def bundle(n):
        return {"kind": "bundle", "degree": n}
    hom = hm.hom(bundle(0), bundle(2))
    section = hm.hom(bundle(0), bundle(1))["basis"][0]
    for doc in [hom, section, hm.mirror(section), hm.mirror(bundle(2)), hm.verify("torsion"),
                hm.compose("b", section, hm.hom(bundle(1), bundle(2))["basis"][0])]:
        jsonschema.validate(doc, schema)
