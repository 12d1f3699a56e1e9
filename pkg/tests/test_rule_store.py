import os

import joblib

from database.rule_store import RuleStore
from engine.rules import RULE_FORMAT_VERSION, compile_rules


def test_path_names_every_parameter(tmp_path):
    store = RuleStore(str(tmp_path))
    path = store.path_for(3, 5, 4, 12, 'lex', 'GL')
    assert os.path.basename(path) == f'rules_v{RULE_FORMAT_VERSION}_n3_p5_K4_M12_lex_GL.joblib'


def test_miss_then_hit(tmp_path):
    store = RuleStore(str(tmp_path))
    first = store.get_or_compile(2, 5, 3, 8)
    second = store.get_or_compile(2, 5, 3, 8)
    assert (store.misses, store.hits) == (1, 1)
    assert first == second
    assert os.path.exists(store.path_for(2, 5, 3, 8, 'height', 'SL'))


def test_stored_table_matches_fresh_compile(tmp_path):
    RuleStore(str(tmp_path)).get_or_compile(2, 5, 3, 8)
    cached = RuleStore(str(tmp_path)).load(2, 5, 3, 8)
    assert cached == compile_rules(2, 5, 3, 8)


def test_disabled_store_never_touches_disk(tmp_path):
    store = RuleStore(str(tmp_path), enabled=False)
    store.get_or_compile(2, 5, 3, 8)
    store.get_or_compile(2, 5, 3, 8)
    assert store.misses == 2
    assert os.listdir(tmp_path) == []


def test_foreign_payload_is_ignored(tmp_path):
    store = RuleStore(str(tmp_path))
    joblib.dump({'not': 'a table'}, store.path_for(2, 5, 3, 8, 'height', 'SL'))
    assert store.load(2, 5, 3, 8) is None
    store.get_or_compile(2, 5, 3, 8)
    assert store.misses == 1


def test_clear(tmp_path):
    store = RuleStore(str(tmp_path))
    store.get_or_compile(2, 5, 3, 8)
    store.get_or_compile(2, 5, 3, 10)
    assert store.clear() == 2
    assert store.clear() == 0


def test_table_from_another_format_version_is_recompiled(tmp_path):
    store = RuleStore(str(tmp_path))
    path = store.path_for(2, 5, 3, 8, 'height', 'SL')
    joblib.dump({'format_version': RULE_FORMAT_VERSION - 1, 'table': compile_rules(2, 5, 3, 8)}, path)
    assert store.load(2, 5, 3, 8) is None
    store.get_or_compile(2, 5, 3, 8)
    assert store.misses == 1
    assert joblib.load(path)['format_version'] == RULE_FORMAT_VERSION
    assert store.load(2, 5, 3, 8) == compile_rules(2, 5, 3, 8)


def test_bare_table_without_version_is_ignored(tmp_path):
    store = RuleStore(str(tmp_path))
    joblib.dump(compile_rules(2, 5, 3, 8), store.path_for(2, 5, 3, 8, 'height', 'SL'))
    assert store.load(2, 5, 3, 8) is None
