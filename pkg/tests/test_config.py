"""設定とモデルの検証"""

import pytest
from pydantic import ValidationError

from bergman_lab.config import Settings, load_config_file, parse_float_list
from bergman_lab.errors import ConfigError
from bergman_lab.models import EmbeddingQuery, RunConfig, SchurWeightSpec


def _run(**overrides) -> RunConfig:
    fields = {"command": "matrix", "symbol": "abs2", "radii": [0.5], "r_schedule": [0.9]}
    fields.update(overrides)
    return RunConfig(**fields)


class TestSettings:
    def test_defaults(self):
        s = Settings(_env_file=None)
        assert s.radii_list() == [0.0, 0.3, 0.6, 0.8, 0.9, 0.95, 0.99]
        assert s.r_schedule_list() == [0.9, 0.99, 0.999]

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("BERGMAN_LAB_QUAD_RADIAL", "48")
        monkeypatch.setenv("BERGMAN_LAB_THREADS", "2")
        s = Settings(_env_file=None)
        assert s.quad_radial == 48
        assert s.threads == 2

    def test_parse_float_list(self):
        assert parse_float_list("0.5, 0.9,") == [0.5, 0.9]
        with pytest.raises(ConfigError):
            parse_float_list("0.5,x")


class TestConfigFile:
    def test_keys_are_normalized(self, tmp_path):
        path = tmp_path / "lab.conf"
        path.write_text("N=16\nr-schedule=0.9,0.99\nSYMBOL=abs2\n")
        values = load_config_file(path)
        assert values == {"n": "16", "r_schedule": "0.9,0.99", "symbol": "abs2"}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / "missing.conf")


class TestRunConfig:
    def test_radii_sorted(self):
        assert _run(radii=[0.9, 0.0, 0.5]).radii == [0.0, 0.5, 0.9]

    @pytest.mark.parametrize("overrides", [
        {"radii": [0.999]},
        {"r_schedule": [1.0]},
        {"epsilon": 0.5},
        {"n": 0},
        {"symbol": None},
        {"command": "luecking", "atoms": "0,0,1"},
        {"command": "luecking", "symbol": None, "atoms": "0,0,1", "q": 3.0},
        {"command": "bound-check", "q": 2.5},
        {"command": "nope"},
    ])
    def test_invalid(self, overrides):
        with pytest.raises(ValidationError):
            _run(**overrides)

    def test_verify_needs_no_symbol(self):
        assert _run(command="verify", symbol=None).suite == "all"


class TestQueryModels:
    def test_embedding_exponent(self):
        assert EmbeddingQuery(p=2.0, q=1.0).s == pytest.approx(2.0)
        assert EmbeddingQuery(p=3.0, q=1.0).s == pytest.approx(1.5)

    def test_embedding_requires_q_below_p(self):
        with pytest.raises(ValidationError):
            EmbeddingQuery(p=1.0, q=2.0)

    def test_schur_weight(self):
        assert SchurWeightSpec(epsilon=0.2).measure_exponent() == pytest.approx(-0.4)
        with pytest.raises(ValidationError):
            SchurWeightSpec(epsilon=0.5)
