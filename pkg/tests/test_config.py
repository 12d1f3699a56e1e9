import pytest

from config import Config, RunConfig
from utils.exceptions import ConfigError
from utils.validators import (validate_coords_payload, validate_lazard, validate_matrix_payload,
                              validate_prime, validate_run_config)


def test_defaults_come_from_config():
    config = RunConfig()
    assert (config.n, config.p, config.K, config.M) == (Config.N, Config.P, Config.K, Config.M)
    assert config.seed == Config.SEED


def test_flags_override_the_file(tmp_path):
    path = tmp_path / 'run.env'
    path.write_text('IWAHORI_N=3\nP=7\nK=4\nORDER=lex\n')
    config = RunConfig.from_sources(str(path), {'K': 5, 'M': None})
    assert (config.n, config.p, config.K, config.order) == (3, 7, 5, 'lex')
    assert config.M == Config.M


def test_unknown_file_keys_are_reported(tmp_path):
    path = tmp_path / 'run.env'
    path.write_text('COLOR=blue\nN=two\n')
    with pytest.raises(ConfigError) as info:
        RunConfig.from_sources(str(path))
    assert len(info.value.problems) == 2


def test_missing_file():
    with pytest.raises(ConfigError):
        RunConfig.from_sources('/nonexistent/run.env')


def test_every_failed_check_is_listed():
    with pytest.raises(ConfigError) as info:
        RunConfig.from_sources(overrides={'n': 3, 'p': 4, 'K': 0, 'order': 'zigzag'})
    assert len(info.value.problems) == 3


def test_lazard_condition_in_config():
    problems = validate_run_config(RunConfig(n=3, p=3))
    assert problems == ['p=3 must exceed n+1=4']


def test_validators():
    assert validate_prime(7)
    assert not validate_prime(9)
    assert not validate_prime('7')
    assert validate_lazard(3, 5)
    assert not validate_lazard(3, 4)


def test_payload_validators():
    assert validate_matrix_payload({'entries': [['1', '0'], ['5', '1']]})
    assert not validate_matrix_payload({'entries': [['1', '0'], ['5']]})
    assert not validate_matrix_payload({'entries': [['1', 'x'], ['0', '1']]})
    assert validate_coords_payload({'coords': ['0', '1', '2']})
    assert not validate_coords_payload({'coords': ['0'], 'order': 'zigzag'})
    assert not validate_coords_payload({})
