import os
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Optional

from dotenv import dotenv_values, load_dotenv

from utils.exceptions import ConfigError
from utils.validators import validate_run_config

load_dotenv()


class Config:
    # Group and truncation
    N = int(os.environ.get('IWAHORI_N') or 2)
    P = int(os.environ.get('IWAHORI_P') or 5)
    K = int(os.environ.get('IWAHORI_K') or 6)
    M = int(os.environ.get('IWAHORI_M') or 12)
    ORDER = os.environ.get('IWAHORI_ORDER') or 'height'
    KIND = os.environ.get('IWAHORI_KIND') or 'SL'

    # Finite-quotient oracle
    ORACLE_MAX_ORDER = int(os.environ.get('IWAHORI_ORACLE_MAX_ORDER') or 10 ** 6)
    ORACLE_KC = int(os.environ.get('IWAHORI_ORACLE_KC') or 1)

    # Compiled rule tables are stored here as <key>.joblib
    RULE_CACHE = os.environ.get('IWAHORI_RULE_CACHE') or 'rule_cache'

    # Runtime
    N_JOBS = int(os.environ.get('IWAHORI_N_JOBS') or 1)
    SEED = int(os.environ.get('IWAHORI_SEED') or 20240101)
    LOG_LEVEL = os.environ.get('IWAHORI_LOG_LEVEL') or 'WARNING'


# config-file keys accepted with or without the IWAHORI_ prefix
_FILE_KEYS = {
    'N': 'n', 'P': 'p', 'K': 'K', 'M': 'M', 'ORDER': 'order', 'KIND': 'kind',
    'ORACLE_MAX_ORDER': 'oracle_max_order', 'ORACLE_KC': 'oracle_kc',
    'RULE_CACHE': 'rule_cache', 'N_JOBS': 'n_jobs', 'SEED': 'seed', 'LOG_LEVEL': 'log_level',
}


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one command-line invocation"""
    n: int = Config.N
    p: int = Config.P
    K: int = Config.K
    M: int = Config.M
    order: str = Config.ORDER
    kind: str = Config.KIND
    oracle_max_order: int = Config.ORACLE_MAX_ORDER
    oracle_kc: int = Config.ORACLE_KC
    rule_cache: str = Config.RULE_CACHE
    n_jobs: int = Config.N_JOBS
    seed: int = Config.SEED
    log_level: str = Config.LOG_LEVEL

    @classmethod
    def from_sources(cls, config_file: Optional[str] = None,
                     overrides: Optional[Dict[str, Any]] = None) -> 'RunConfig':
        """Defaults from Config, then the key-value file, then explicit flags"""
        config = cls()
        if config_file:
            config = replace(config, **_read_file(config_file))
        if overrides:
            config = replace(config, **{k: v for k, v in overrides.items() if v is not None})
        config.validate()
        return config

    def validate(self):
        problems = validate_run_config(self)
        if problems:
            raise ConfigError(problems)

    def to_json(self) -> Dict[str, Any]:
        return {'n': self.n, 'p': self.p, 'K': self.K, 'M': self.M, 'order': self.order, 'kind': self.kind}


def _read_file(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise ConfigError([f"config file {path} does not exist"])
    types = {f.name: f.type for f in fields(RunConfig)}
    values: Dict[str, Any] = {}
    problems = []
    for raw_key, raw_value in dotenv_values(path).items():
        key = raw_key.upper()
        if key.startswith('IWAHORI_'):
            key = key[len('IWAHORI_'):]
        if key not in _FILE_KEYS:
            problems.append(f"unknown config key {raw_key}")
            continue
        name = _FILE_KEYS[key]
        try:
            values[name] = int(raw_value) if types[name] in (int, 'int') else str(raw_value).strip()
        except (TypeError, ValueError):
            problems.append(f"{raw_key} must be an integer, got {raw_value!r}")
    if problems:
        raise ConfigError(problems)
    return values
