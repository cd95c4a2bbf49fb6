"""
Tests for environment overrides of the configuration
"""

import pytest

from ecslab.config import SWEEP_CONFIG, get_env_config


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv('ECSLAB_WORKERS', '4')
    assert get_env_config()['WORKERS'] == 4


@pytest.mark.parametrize("raw", ["four", "0", "-2", "1.5"])
def test_bad_workers_value_falls_back(monkeypatch, raw):
    monkeypatch.setenv('ECSLAB_WORKERS', raw)
    assert get_env_config()['WORKERS'] == SWEEP_CONFIG['workers']


def test_defaults_without_environment(monkeypatch):
    for name in ('ECSLAB_WORKERS', 'ECSLAB_LOG_LEVEL', 'ECSLAB_LOG_FILE'):
        monkeypatch.delenv(name, raising=False)
    env = get_env_config()
    assert env['WORKERS'] == SWEEP_CONFIG['workers']
    assert env['LOG_LEVEL'] == 'INFO'
    assert env['LOG_FILE'] == ''
