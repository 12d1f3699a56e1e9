import logging
import os
from typing import Optional

import joblib

from config import Config
from engine.rules import RULE_FORMAT_VERSION, RuleTable, compile_rules

logger = logging.getLogger(__name__)


class RuleStore:
    """Compiled rule tables on disk, one joblib file per (n, p, K, M, order, kind)

    Files carry the rule format version in their name and payload; a table
    written by another compiler version is treated as absent.
    """

    def __init__(self, directory: str = None, enabled: bool = True):
        self.directory = directory or Config.RULE_CACHE
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def path_for(self, n: int, p: int, K: int, M: int, order: str, kind: str) -> str:
        return os.path.join(self.directory, f'rules_v{RULE_FORMAT_VERSION}_n{n}_p{p}_K{K}_M{M}_{order}_{kind}.joblib')

    # ==================== LOOKUP ====================

    def load(self, n: int, p: int, K: int, M: int, order: str = 'height', kind: str = 'SL') -> Optional[RuleTable]:
        """Stored table, or None when absent or unreadable"""
        path = self.path_for(n, p, K, M, order, kind)
        if not self.enabled or not os.path.exists(path):
            return None
        try:
            payload = joblib.load(path)
            if not isinstance(payload, dict) or not isinstance(payload.get('table'), RuleTable):
                logger.warning(f"Ignoring {path}: not a rule table")
                return None
            if payload.get('format_version') != RULE_FORMAT_VERSION:
                logger.warning(f"Ignoring {path}: format {payload.get('format_version')}, expected {RULE_FORMAT_VERSION}")
                return None
            return payload['table']
        except Exception as e:
            logger.error(f"Rule cache read error: {str(e)}")
            return None

    def save(self, table: RuleTable) -> Optional[str]:
        if not self.enabled:
            return None
        params = table.params
        path = self.path_for(params.n, params.p, params.K, params.M, params.order, params.kind)
        try:
            os.makedirs(self.directory, exist_ok=True)
            joblib.dump({'format_version': RULE_FORMAT_VERSION, 'table': table}, path)
            return path
        except Exception as e:
            logger.error(f"Rule cache write error: {str(e)}")
            return None

    def get_or_compile(self, n: int, p: int, K: int, M: int, order: str = 'height', kind: str = 'SL') -> RuleTable:
        table = self.load(n, p, K, M, order, kind)
        if table is not None:
            self.hits += 1
            logger.info(f"Rule cache hit for n={n}, p={p}, K={K}, M={M}, {order}, {kind}")
            return table
        self.misses += 1
        logger.info(f"Rule cache miss for n={n}, p={p}, K={K}, M={M}, {order}, {kind}")
        table = compile_rules(n, p, K, M, kind, order)
        self.save(table)
        return table

    def clear(self) -> int:
        """Remove every stored table; returns how many were deleted"""
        if not os.path.isdir(self.directory):
            return 0
        removed = 0
        for name in os.listdir(self.directory):
            if name.startswith('rules_') and name.endswith('.joblib'):
                os.remove(os.path.join(self.directory, name))
                removed += 1
        return removed
