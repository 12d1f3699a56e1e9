import json

import pytest
from click.testing import CliRunner

from app import cli


def run(*args):
    return CliRunner().invoke(cli, ['--no-cache', *args])


def write_json(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


# ==================== MATRIX GROUP ====================

def test_basis_n2():
    result = run('--n', '2', '--p', '5', 'basis')
    assert result.exit_code == 0
    rows = json.loads(result.output)['generators']
    assert len(rows) == 3
    assert rows[-1]['tag'] == 'V(1,2)'


def test_basis_n3():
    rows = json.loads(run('--n', '3', '--p', '5', 'basis').output)['generators']
    assert len(rows) == 8
    assert (rows[0]['tag'], rows[0]['weight'], rows[0]['valuation']) == ('U(3,1)', 1, '1')


def test_basis_lex_order_reorders():
    height = json.loads(run('--n', '3', '--p', '5', 'basis').output)['generators']
    lex = json.loads(run('--n', '3', '--p', '5', '--order', 'lex', 'basis').output)['generators']
    assert sorted(r['tag'] for r in height) == sorted(r['tag'] for r in lex)
    assert [r['tag'] for r in height] != [r['tag'] for r in lex]


def test_basis_table_format():
    result = run('--n', '2', '--p', '5', '--format', 'table', 'basis')
    assert result.exit_code == 0
    assert 'W(1,2)' in result.output
    assert 'weight' in result.output


def test_invalid_config_exits_2():
    result = run('--n', '3', '--p', '4', 'basis')
    assert result.exit_code == 2
    assert 'must be prime' in result.output


def test_decompose_identity(tmp_path):
    path = write_json(tmp_path, 'g.json', {'n': 2, 'p': 5, 'K': 6, 'entries': [['1', '0'], ['0', '1']]})
    result = run('--n', '2', '--p', '5', '--K', '6', 'decompose', path)
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload['coords'] == ['0', '0', '0']
    assert payload['roundtrip_precision'] == 5


def test_decompose_generator(tmp_path):
    path = write_json(tmp_path, 'g.json', {'entries': [['1', '0'], ['5', '1']]})
    payload = json.loads(run('--n', '2', '--p', '5', 'decompose', path).output)
    assert payload['coords'] == ['1', '0', '0']


def test_decompose_rejects_non_members(tmp_path):
    path = write_json(tmp_path, 'g.json', {'entries': [['1', '0'], ['1', '1']]})
    result = run('--n', '2', '--p', '5', 'decompose', path)
    assert result.exit_code == 2
    assert 'leaves pro-p Iwahori' in result.output


def test_compose_then_decompose(tmp_path):
    coords = write_json(tmp_path, 'c.json', {'order': 'height', 'coords': ['3', '7', '11']})
    composed = run('--n', '2', '--p', '5', '--K', '4', 'compose', coords)
    assert composed.exit_code == 0
    matrix = write_json(tmp_path, 'g.json', json.loads(composed.output))
    back = json.loads(run('--n', '2', '--p', '5', '--K', '4', 'decompose', matrix).output)
    assert back['coords'] == ['3', '7', '11']


def test_valuation_of_torus_generator(tmp_path):
    path = write_json(tmp_path, 'h.json', {'K': 2, 'entries': [['6', '0'], ['0', '21']]})
    payload = json.loads(run('--n', '2', '--p', '5', 'valuation', path).output)
    assert payload['omega'] == '2'
    assert payload['min_formula'] == '2'


def test_valuation_of_corner_generator(tmp_path):
    path = write_json(tmp_path, 'x.json', {'entries': [['1', '0', '0'], ['0', '1', '0'], ['5', '0', '1']]})
    payload = json.loads(run('--n', '3', '--p', '5', 'valuation', path).output)
    assert payload['omega'] == '1'
    assert len(payload['stages']) == 9


def test_valuation_of_identity_is_capped(tmp_path):
    path = write_json(tmp_path, 'i.json', {'K': 3, 'entries': [['1', '0'], ['0', '1']]})
    payload = json.loads(run('--n', '2', '--p', '5', 'valuation', path).output)
    assert payload['omega'] == '>=6'


def test_missing_file_exits_2():
    result = run('--n', '2', '--p', '5', 'decompose', '/nonexistent/g.json')
    assert result.exit_code == 2


# ==================== ENGINE ====================

SERIES_N3 = {'n': 3, 'p': 5, 'K': 3, 'M': 12, 'order': 'height', 'kind': 'SL'}


def test_normalize_swap(tmp_path):
    path = write_json(tmp_path, 's.json', {**SERIES_N3, 'terms': [{'word': ['V(1,2)', 'U(3,2)'], 'coeff': '1'}]})
    payload = json.loads(run('normalize', path).output)
    assert payload['terms'] == [{'word': [3, 8], 'coeff': '1'}]


def test_normalize_strategies_agree(tmp_path):
    terms = [{'word': [8, 6, 1], 'coeff': '2'}, {'word': [7, 2], 'coeff': '1'}]
    path = write_json(tmp_path, 's.json', {**SERIES_N3, 'terms': terms})
    left = run('normalize', path).output
    right = run('normalize', path, '--strategy', 'rightmost').output
    assert left == right


def test_multiply(tmp_path):
    params = {'n': 2, 'p': 5, 'K': 3, 'M': 10}
    a = write_json(tmp_path, 'a.json', {**params, 'terms': [{'word': [3], 'coeff': '1'}]})
    b = write_json(tmp_path, 'b.json', {**params, 'terms': [{'word': [1], 'coeff': '1'}]})
    payload = json.loads(run('multiply', a, b).output)
    terms = {tuple(t['word']): t['coeff'] for t in payload['terms']}
    assert terms[(2,)] == '1'


def test_multiply_rejects_mixed_parameters(tmp_path):
    a = write_json(tmp_path, 'a.json', {'n': 2, 'p': 5, 'K': 3, 'M': 10, 'terms': []})
    b = write_json(tmp_path, 'b.json', {'n': 2, 'p': 5, 'K': 3, 'M': 12, 'terms': []})
    assert run('multiply', a, b).exit_code == 2


def test_rules_export():
    payload = json.loads(run('--n', '2', '--p', '5', '--K', '3', '--M', '6', 'rules').output)
    assert len(payload['rules']) == 3
    assert {r['relation'] for r in payload['rules']} == {'WU-conj', 'VW-conj', 'VU-opposite'}


def test_graded_dims():
    payload = json.loads(run('--n', '2', 'graded-dims', '--up-to', '4').output)
    assert payload['dims'] == [1, 2, 4, 6, 9]


# ==================== VERIFICATION ====================

def test_verify_graded():
    result = run('--n', '2', 'verify', 'graded')
    assert result.exit_code == 0
    assert json.loads(result.output)['params']['dims'][:5] == [1, 2, 4, 6, 9]


def test_verify_relations():
    result = run('--n', '3', '--p', '5', '--K', '8', 'verify', 'relations')
    assert result.exit_code == 0
    assert json.loads(result.output)['pass'] is True


def test_verify_roundtrip_and_valuation():
    for suite in ('roundtrip', 'valuation-min'):
        result = run('--n', '2', '--p', '5', '--K', '6', '--samples', '30', 'verify', suite)
        assert result.exit_code == 0, result.output


def test_verify_unknown_suite():
    assert run('verify', 'everything').exit_code == 2


def test_output_is_deterministic():
    args = ('--n', '2', '--p', '5', '--K', '3', '--M', '8', '--samples', '5', 'verify', 'confluence')
    first, second = run(*args), run(*args)
    assert first.exit_code == 0
    assert first.output == second.output


@pytest.mark.slow
def test_verify_valuation_min_acceptance():
    for n in ('2', '3'):
        result = run('--n', n, '--p', '5', '--K', '6', '--samples', '1000', 'verify', 'valuation-min')
        assert result.exit_code == 0, result.output
