import pytest
from hypothesis import given, settings, strategies as st

from dyntdd.errors import ConfigError
from dyntdd.scenario import Scenario, from_dict, load, loads


def test_defaults_roundtrip_through_yaml():
    sc = Scenario()
    assert loads(sc.to_yaml()) == sc


def test_shipped_default_file_equals_defaults(pkg_root):
    assert load(pkg_root / "scenarios" / "default.yaml") == Scenario()


def test_unknown_key_named():
    with pytest.raises(ConfigError, match="traffic.lambda_xx"):
        loads("traffic:\n  lambda_xx: 3\n")


def test_unknown_section_named():
    with pytest.raises(ConfigError, match="radiox"):
        loads("radiox: {}\n")


def test_type_errors_named():
    with pytest.raises(ConfigError, match="deployment.n_cells"):
        loads("deployment:\n  n_cells: seven\n")
    with pytest.raises(ConfigError, match="engine.horizon_tti"):
        loads("engine:\n  horizon_tti: 1.5\n")
    with pytest.raises(ConfigError, match="radio.pathloss"):
        loads("radio:\n  pathloss: {bs_xx: [1, 2]}\n")


def test_malformed_yaml():
    with pytest.raises(ConfigError, match="malformed"):
        loads("a: [1, 2\n")


def test_validation():
    with pytest.raises(ConfigError):
        Scenario().replace(coordination={"scc_omega": 13})
    with pytest.raises(ConfigError):
        Scenario().replace(engine={"scheme": "TDMA"})
    with pytest.raises(ConfigError):
        Scenario().replace(engine={"static_pattern": "DU"})
    with pytest.raises(ConfigError):
        Scenario().replace(radio={"irc_covariance": "instantaneous"})


def test_missing_file():
    with pytest.raises(ConfigError):
        load("/nonexistent/scenario.yaml")


@settings(max_examples=25)
@given(st.integers(1, 7), st.integers(0, 6), st.floats(0, 1000), st.integers(1, 5000),
       st.sampled_from(["HFCS", "NC", "SCC", "CFC", "STATIC"]))
def test_roundtrip_random(n_cells, k, lam, horizon, scheme):
    sc = Scenario().replace(deployment={"n_cells": n_cells, "k_dl": k},
                            traffic={"lambda_ul": lam},
                            engine={"horizon_tti": horizon, "scheme": scheme})
    assert loads(sc.to_yaml()) == sc
    assert from_dict(sc.to_dict()) == sc
