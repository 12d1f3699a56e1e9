from typing import Any, Dict, List

from sympy import isprime

ORDERS = ('height', 'lex')
KINDS = ('SL', 'GL')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def validate_prime(p: Any) -> bool:
    """p is a prime integer"""
    try:
        return isinstance(p, int) and isprime(p)
    except (ValueError, TypeError):
        return False


def validate_lazard(n: int, p: int) -> bool:
    """p > n+1, the saturation condition the presentation needs"""
    try:
        return int(p) > int(n) + 1
    except (ValueError, TypeError):
        return False


def validate_group_size(n: Any) -> bool:
    return isinstance(n, int) and n >= 2


def validate_precision(K: Any, M: Any) -> bool:
    return isinstance(K, int) and isinstance(M, int) and K >= 1 and M >= 0


def validate_order(order: str) -> bool:
    return order in ORDERS


def validate_kind(kind: str) -> bool:
    return kind in KINDS


def validate_log_level(level: str) -> bool:
    return isinstance(level, str) and level.upper() in LOG_LEVELS


def validate_run_config(config) -> List[str]:
    """Every failed check, empty when the configuration is usable"""
    problems = []
    if not validate_group_size(config.n):
        problems.append(f"n must be an integer >= 2, got {config.n!r}")
    if not validate_prime(config.p):
        problems.append(f"p must be prime, got {config.p!r}")
    elif validate_group_size(config.n) and not validate_lazard(config.n, config.p):
        problems.append(f"p={config.p} must exceed n+1={config.n + 1}")
    if not validate_precision(config.K, config.M):
        problems.append(f"need K >= 1 and M >= 0, got K={config.K!r}, M={config.M!r}")
    if not validate_order(config.order):
        problems.append(f"order must be one of {', '.join(ORDERS)}, got {config.order!r}")
    if not validate_kind(config.kind):
        problems.append(f"kind must be one of {', '.join(KINDS)}, got {config.kind!r}")
    if not isinstance(config.oracle_kc, int) or config.oracle_kc < 1:
        problems.append(f"oracle Kc must be >= 1, got {config.oracle_kc!r}")
    if not isinstance(config.oracle_max_order, int) or config.oracle_max_order < 1:
        problems.append(f"oracle size bound must be positive, got {config.oracle_max_order!r}")
    if not validate_log_level(config.log_level):
        problems.append(f"unknown log level {config.log_level!r}")
    return problems


def validate_matrix_payload(payload: Dict[str, Any]) -> bool:
    """Matrix JSON has a square list of decimal-string entries"""
    try:
        entries = payload['entries']
        n = len(entries)
        if n < 2 or any(len(row) != n for row in entries):
            return False
        for row in entries:
            for x in row:
                int(x)
        return True
    except (KeyError, ValueError, TypeError):
        return False


def validate_coords_payload(payload: Dict[str, Any]) -> bool:
    try:
        coords = payload['coords']
        if payload.get('order', 'height') not in ORDERS:
            return False
        for x in coords:
            int(x)
        return isinstance(coords, list)
    except (KeyError, ValueError, TypeError):
        return False
