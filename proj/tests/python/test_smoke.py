import glob
import json
import math
import os

import pytest

import fgamma

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))


def test_generator_basics():
    kl = fgamma.Generator("kl")
    assert kl.spec == "kl"
    assert kl.z0 == 1.0
    assert kl.f_star(kl.z0) == pytest.approx(kl.z0)
    assert kl.validate_ok()
    assert fgamma.Generator("js").fstar_finite_sup == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        fgamma.Generator("hellinger")


def test_kl_lambda_is_log_mean_exp():
    xs = [0.1, 0.4, 0.9, 0.3]
    value, _ = fgamma.lambda_empirical(xs, fgamma.Generator("kl"))
    assert value == pytest.approx(math.log(sum(math.exp(x) for x in xs) / len(xs)), abs=1e-12)


def test_delta_and_k():
    kl = fgamma.Generator("kl")
    assert fgamma.delta_f(kl, 1, 0.0, 1.0) == pytest.approx(1.0, abs=1e-9)
    assert fgamma.k_quantity(kl, 0.0, 10**8, 0.0, 1.0) < 1e-3


def test_bound_example():
    rep = fgamma.bound("gan", 100, 100, 0.2, delta=1.0)
    assert rep["tail"] == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert rep["setting"] == "forward-gan"
    with pytest.raises(ValueError):
        fgamma.bound("gan", 10, 10, 0.1, gen="js")


def test_two_atom_dictionary_estimate():
    members = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
    spec = {"kind": "dictionary", "support": [0, 1], "members": members, "range": [0, 1]}
    res = fgamma.estimate("kl", spec, [0, 0, 0, 1], [0, 1])
    assert res["exact"]
    assert res["value"] > 0
    assert res["value"] <= fgamma.f_divergence_discrete(fgamma.Generator("kl"), [0.75, 0.25], [0.5, 0.5]) + 1e-9


def test_rademacher_mlp():
    spec = {"kind": "mlp", "widths": [1, 3, 1], "rho": 1.0, "range": [0, 1]}
    est = fgamma.rademacher(spec, [[x / 10] for x in range(10)], draws=8, seed=1)
    assert est["mode"] == "ascent-lower-bound"
    assert est["draws"] == 8


def test_verify_quick_suite():
    rep = fgamma.verify("bounds", "quick")
    assert rep["failed"] == 0
    assert rep["passed"] > 0


def test_cli_in_process():
    code, out, err = fgamma.run_cli(["bound", "--setting", "gan", "--n", "100", "--m", "100", "--epsilon", "0.2"])
    assert code == 0
    assert "tail" in json.loads(out)
    code, _, err = fgamma.run_cli(["estimate", "--gen", "js", "--alpha", "0", "--beta", "1"])
    assert code == 1
    assert "log 2" in err


def test_shipped_configs_match_schema():
    jsonschema = pytest.importorskip("jsonschema")
    with open(os.path.join(ROOT, "docs", "config.schema.json")) as fh:
        schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(schema)
    configs = sorted(glob.glob(os.path.join(ROOT, "configs", "*.json")))
    assert configs
    for path in configs:
        with open(path) as fh:
            jsonschema.validate(json.load(fh), schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"n": 10, "colour": "red"}, schema)
