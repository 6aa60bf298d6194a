import pytest

from twobath.config import DEFAULTS, build_model, dump_config, parse_config, read_config
from twobath.errors import InvalidParameter, UnstableSystem
from twobath.model import Regime


def test_parse_with_comments():
    text = """
    # entropy run
    m = 1
    omega0 = 1.3   # bare frequency
    kappa = -1.6
    regime = weak
    """
    values = parse_config(text)
    assert values == {"m": 1.0, "omega0": 1.3, "kappa": -1.6, "regime": "weak"}


@pytest.mark.parametrize("text", ["m 2", "mass = 2", "m = two", "T1 ="])
def test_parse_errors(text):
    with pytest.raises(InvalidParameter):
        parse_config(text)


def test_defaults_are_reference_set():
    params, init = build_model({}, warn=False)
    assert (params.m, params.omega0, params.kappa) == (2.0, 1.0, -1.0)
    assert (params.T1, params.T2) == (1.0, 0.25)
    assert params.regime is Regime.HIGH_TEMPERATURE
    assert (init.s, init.d) == (DEFAULTS["s"], DEFAULTS["d"])


def test_round_trip(tmp_path):
    params, init = build_model({"kappa": 0.5, "T2": 3.0, "regime": "weak", "s": 2.0})
    path = tmp_path / "run.cfg"
    path.write_text(dump_config(params, init))
    again = build_model(read_config(path))
    assert again == (params, init)


def test_invalid_values_propagate(tmp_path):
    with pytest.raises(UnstableSystem):
        build_model({"kappa": 5.0})
    with pytest.raises(InvalidParameter):
        build_model({"nope": 1.0})
    with pytest.raises(InvalidParameter):
        read_config(tmp_path / "missing.cfg")
