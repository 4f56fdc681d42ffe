"""恒等式スイート（既定の数値設定で全チェックが通ること）"""

import pytest

from bergman_lab.config import Settings
from bergman_lab.constants import VALID_SUITES
from bergman_lab.errors import ConfigError
from bergman_lab.services.suites import run_suites


@pytest.fixture(scope="module")
def suite_cfg() -> Settings:
    return Settings(_env_file=None, threads=1)


class TestSuites:
    @pytest.mark.parametrize("name", VALID_SUITES)
    def test_suite_passes(self, suite_cfg, name):
        report = run_suites(name, cfg=suite_cfg)
        failing = [(r["name"], r["residual"], r["tolerance"]) for r in report.values if not r["passed"]]
        assert report.summary["passed"], failing
        assert report.summary["checks"] > 0
        assert set(report.summary["suites"]) == {name}

    def test_same_seed_same_records(self, suite_cfg):
        first = run_suites("geometry", seed=7, cfg=suite_cfg)
        second = run_suites("geometry", seed=7, cfg=suite_cfg)
        assert first.values == second.values

    def test_unknown_suite(self, suite_cfg):
        with pytest.raises(ConfigError):
            run_suites("nope", cfg=suite_cfg)
