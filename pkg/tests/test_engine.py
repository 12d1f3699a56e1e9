import pytest

from arithmetic.padic import Valuation
from engine.normalizer import LEFTMOST, RIGHTMOST, Normalizer, checked_table, multiply, normalize, svar
from engine.rules import RewriteRule, RuleTable, compile_rules
from engine.series import AlgebraParams, Series, random_series
from utils.exceptions import LazardConditionError, MeasureViolation, ParameterMismatch, PayloadError


# ==================== SERIES ====================

def test_coefficients_keep_only_surviving_digits():
    params = AlgebraParams(2, 5, 3, 10)
    # degree 9 keeps one digit, degree 11 lies beyond the cap
    s = Series(params, {(1,) * 9: 7, (1,) * 11: 1, (1,): 130})
    assert s.terms == {(1,) * 9: 2, (1,): 5}


def test_svar_examples():
    params = AlgebraParams(3, 5, 3, 12)
    assert Series.from_word(params, (1,)).svar() == 1
    assert Series.from_word(params, (), 5).svar() == 3
    assert Series.zero(params).svar() == Valuation.cap(13)
    assert svar(Series.variable(params, 'V(1,3)')) == 2


def test_unweighted_valuation_is_below_svar(rng):
    params = AlgebraParams(3, 5, 3, 12)
    for _ in range(20):
        s = random_series(params, rng)
        if s:
            assert s.v_a() <= s.svar()


def test_series_json_round_trip():
    params = AlgebraParams(3, 5, 3, 12, 'lex')
    s = Series(params, {(1, 4): 3, (8,): 124, (): 1})
    assert Series.from_json(s.to_json()) == s
    assert s.to_json()['terms'][0] == {'word': [], 'coeff': '1'}


def test_series_json_accepts_tags():
    payload = {'n': 2, 'p': 5, 'K': 3, 'M': 10, 'terms': [{'word': ['V(1,2)', 'U(2,1)'], 'coeff': '1'}]}
    s = Series.from_json(payload)
    assert s.terms == {(3, 1): 1}


@pytest.mark.parametrize('payload', [
    {'n': 2, 'p': 5, 'K': 3},
    {'n': 2, 'p': 5, 'K': 3, 'M': 10, 'terms': [{'word': [4], 'coeff': '1'}]},
    {'n': 2, 'p': 5, 'K': 3, 'M': 10, 'order': 'sideways', 'terms': []},
])
def test_malformed_series_json(payload):
    with pytest.raises(PayloadError):
        Series.from_json(payload)


def test_mixed_parameters_are_rejected():
    a = Series.one(AlgebraParams(2, 5, 3, 10))
    b = Series.one(AlgebraParams(2, 5, 3, 12))
    with pytest.raises(ParameterMismatch):
        a + b


# ==================== RULES ====================

def test_lazard_condition():
    with pytest.raises(LazardConditionError, match='Lazard condition violated'):
        compile_rules(2, 3, 2, 4)
    with pytest.raises(LazardConditionError):
        compile_rules(4, 5, 2, 4)


def test_one_rule_per_inversion(rules_n2, rules_n3):
    assert len(rules_n2) == 3
    assert len(rules_n3) == 28


def test_torus_swap_rule_when_pairing_vanishes():
    table = compile_rules(4, 7, 2, 8)
    w12 = table.params.var('W(1,2)').index
    u43 = table.params.var('U(4,3)').index
    assert table[(w12, u43)].rhs.terms == {(u43, w12): 1}


def test_opposite_root_rule_n2(rules_n2):
    rule = rules_n2[(3, 1)]
    assert rule.tag == 'VU-opposite'
    assert () not in rule.rhs.terms
    assert rule.rhs.terms[(2,)] == 1
    assert rule.rhs.terms[(1, 3)] % 5 != 0
    assert rule.leading_part().terms.keys() == {(2,), (1, 3)}


def test_upper_commutator_rule_n3(rules_n3):
    params = rules_n3.params
    v12, v23, v13 = (params.var(t).index for t in ('V(1,2)', 'V(2,3)', 'V(1,3)'))
    rule = rules_n3[(v12, v23)]
    assert rule.tag == 'VV-comm+'
    assert rule.leading_part().terms == {(v13,): 1, (v23, v12): 1}
    assert rule.rhs.terms == {(v13,): 1, (v23, v12): 1, (v13, v23): 1, (v13, v12): 1, (v13, v23, v12): 1}


def test_every_compiled_rule_respects_the_measure(rules_n3):
    for rule in rules_n3.rules.values():
        rule.check_measure()


def test_measure_check_rejects_a_non_decreasing_rule(rules_n2):
    params = rules_n2.params
    bad = RewriteRule((3, 1), Series.from_word(params, (3, 1)), 'bogus')
    with pytest.raises(MeasureViolation):
        bad.check_measure()


def test_rule_export(rules_n2):
    payload = rules_n2.to_json()
    assert [entry['lhs'] for entry in payload['rules']] == [[2, 1], [3, 1], [3, 2]]
    assert payload['n'] == 2


# ==================== NORMALIZER ====================

def test_normal_word_is_unchanged(normalizer_n3):
    s = Series.from_word(normalizer_n3.params, (1, 4, 8), 3)
    assert normalizer_n3.normalize(s) == s


def test_commuting_swap(normalizer_n3):
    params = normalizer_n3.params
    s = Series.from_tags(params, ['V(1,2)', 'U(3,2)'])
    expected = Series.from_tags(params, ['U(3,2)', 'V(1,2)'])
    assert normalizer_n3.normalize(s) == expected


def test_opposite_root_product_n2(normalizer_n2):
    result = normalizer_n2.normalize(Series.from_tags(normalizer_n2.params, ['V(1,2)', 'U(2,1)']))
    assert result.is_normal()
    assert result.terms[(2,)] == 1
    assert result.terms[(1, 3)] % 5 != 0
    assert result.svar() == 2


def test_unit_law(normalizer_n3, rng):
    params = normalizer_n3.params
    s = normalizer_n3.normalize(random_series(params, rng))
    one = Series.one(params)
    assert normalizer_n3.multiply(one, s) == s
    assert normalizer_n3.multiply(s, one) == s


def test_single_variable_square(rules_n2):
    params = rules_n2.params
    x = Series.one(params) + Series.variable(params, 'U(2,1)')
    expected = Series(params, {(): 1, (1,): 2, (1, 1): 1})
    assert multiply(x, x, rules_n2) == expected


def test_distributivity(normalizer_n2, rng):
    params = normalizer_n2.params
    for _ in range(5):
        a, b, c = (random_series(params, rng, 2, 2) for _ in range(3))
        left = normalizer_n2.multiply(a, b + c)
        right = normalizer_n2.multiply(a, b) + normalizer_n2.multiply(a, c)
        assert left == right


@pytest.mark.parametrize('fixture', ['normalizer_n2', 'normalizer_n3'])
def test_associativity(fixture, request, rng):
    normalizer = request.getfixturevalue(fixture)
    params = normalizer.params
    for _ in range(5):
        a, b, c = (random_series(params, rng, 2, 2) for _ in range(3))
        assert normalizer.multiply(normalizer.multiply(a, b), c) == normalizer.multiply(a, normalizer.multiply(b, c))


@pytest.mark.parametrize('fixture', ['rules_n2', 'rules_n3'])
def test_rewriting_order_does_not_matter(fixture, request, rng):
    rules = request.getfixturevalue(fixture)
    for _ in range(10):
        s = random_series(rules.params, rng, 3, 4)
        assert normalize(s, rules, LEFTMOST) == normalize(s, rules, RIGHTMOST)


def test_normal_forms_are_normal(normalizer_n3, rng):
    for _ in range(10):
        assert normalizer_n3.normalize(random_series(normalizer_n3.params, rng, 3, 4)).is_normal()


def test_normalizer_rejects_foreign_series(normalizer_n2):
    with pytest.raises(ParameterMismatch):
        normalizer_n2.normalize(Series.one(AlgebraParams(2, 5, 2, 10)))


def test_unknown_strategy(rules_n2):
    with pytest.raises(ValueError):
        Normalizer(rules_n2, 'middle-out')


def test_checked_table_rejects_a_rule_that_keeps_svar(rules_n2):
    params = rules_n2.params
    bad = RuleTable(params, {(3, 1): RewriteRule((3, 1), Series.from_word(params, (3, 1)), 'bogus')})
    with pytest.raises(MeasureViolation):
        checked_table(bad)
    with pytest.raises(MeasureViolation):
        Normalizer(bad)


def test_checked_table_rejects_a_rule_that_lowers_svar(rules_n2):
    params = rules_n2.params
    bad = RuleTable(params, {(3, 1): RewriteRule((3, 1), Series.one(params), 'bogus')})
    with pytest.raises(MeasureViolation, match='lowers svar'):
        checked_table(bad)


def test_products_are_reused_across_calls(normalizer_n3, rng):
    s = random_series(normalizer_n3.params, rng, 3, 4)
    first = normalizer_n3.normalize(s)
    steps = normalizer_n3.steps
    assert normalizer_n3.cache_size > 0
    # a second pass is served from the cache
    assert normalizer_n3.normalize(s) == first
    assert normalizer_n3.steps == steps
    normalizer_n3.clear_cache()
    assert normalizer_n3.cache_size == 0
    assert normalizer_n3.normalize(s) == first
    assert normalizer_n3.steps > steps


def test_long_word_beyond_the_cap_vanishes(normalizer_n3):
    params = normalizer_n3.params
    v12 = params.var('V(1,2)').index
    u31 = params.var('U(3,1)').index
    # degree 13 against M = 12
    s = Series.from_word(params, (v12,) * 12 + (u31,))
    assert normalizer_n3.normalize(s) == Series.zero(params)


@pytest.mark.parametrize('fixture', ['normalizer_n2', 'normalizer_n3'])
def test_svar_is_submultiplicative(fixture, request, rng):
    normalizer = request.getfixturevalue(fixture)
    params = normalizer.params
    for _ in range(20):
        a, b = random_series(params, rng, 2, 3), random_series(params, rng, 2, 3)
        if not a or not b:
            continue
        sa, sb = a.svar(), b.svar()
        assert normalizer.multiply(a, b).svar() >= Valuation(sa.value + sb.value)


@pytest.mark.parametrize('n,M', [(2, 8), (3, 6)])
def test_central_variable_commutes_with_everything(n, M, rng):
    rules = compile_rules(n, 5, 2, M, 'GL')
    assert {rule.tag for rule in rules.rules.values()} >= {'Z-central'}
    normalizer = Normalizer(rules)
    params = rules.params
    z = Series.variable(params, 'Z')
    for var in params.variables:
        x = Series.variable(params, var.index)
        assert normalizer.multiply(z, x) == normalizer.multiply(x, z)
    for _ in range(5):
        s = random_series(params, rng, 2, 3)
        assert normalizer.multiply(z, s) == normalizer.multiply(s, z)


@pytest.mark.slow
@pytest.mark.parametrize('n', [2, 3])
def test_ring_laws_acceptance(n, rng):
    normalizer = Normalizer(compile_rules(n, 5, 3, 12))
    params = normalizer.params
    for _ in range(200):
        a, b, c = (random_series(params, rng, 2, 2) for _ in range(3))
        assert normalizer.multiply(normalizer.multiply(a, b), c) == normalizer.multiply(a, normalizer.multiply(b, c))
    right = Normalizer(normalizer.rules, RIGHTMOST)
    for _ in range(200):
        s = random_series(params, rng, 3, 4)
        assert normalizer.normalize(s) == right.normalize(s)
