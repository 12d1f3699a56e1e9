import numpy as np
import pytest

from arithmetic.matgroup import (BasisCoordinates, GroupElement, central_z, closed_form, compose_from_coords,
                                 decompose, entry_valuations, gen_h, gen_x, generator, h_via_weyl, omega,
                                 omega_via_min, random_coords, random_element, staged_minimum)
from arithmetic.padic import PadicParams
from arithmetic.roots import GL, LEX_ORDER, SL, Root, enumerate_vars, parse_tag
from utils.exceptions import GroupMembershipError, ParameterMismatch


def as_lists(g):
    return [[int(x) for x in row] for row in g.entries]


# ==================== GENERATORS ====================

def test_root_generators():
    params = PadicParams(5, 3)
    assert as_lists(gen_x(Root(1, 2), 1, 2, params)) == [[1, 1], [0, 1]]
    assert as_lists(gen_x(Root(2, 1), 5, 2, params)) == [[1, 0], [5, 1]]
    assert as_lists(gen_x(Root(1, 2), 0, 2, params)) == [[1, 0], [0, 1]]


def test_lower_generator_needs_p():
    with pytest.raises(GroupMembershipError):
        gen_x(Root(2, 1), 1, 2, PadicParams(5, 3))


def test_torus_generator():
    params = PadicParams(5, 2)
    assert as_lists(gen_h(Root(1, 2), 6, 2, params)) == [[6, 0], [0, 21]]
    assert as_lists(gen_h(Root(1, 2), 1, 2, params)) == [[1, 0], [0, 1]]


def test_torus_generator_matches_weyl_product():
    params = PadicParams(7, 4)
    for n in (2, 3, 4):
        for k in range(1, n):
            delta = Root(k, k + 1)
            expected = gen_h(delta, 8, n, params).entries
            assert np.array_equal(h_via_weyl(delta, 8, n, params) % params.modulus, expected)


def test_central_generator():
    params = PadicParams(5, 2)
    assert as_lists(central_z(0, 2, params)) == [[1, 0], [0, 1]]
    assert as_lists(central_z(1, 2, params)) == [[6, 0], [0, 6]]
    with pytest.raises(ParameterMismatch):
        central_z(1, 2, params, kind=SL)


def test_central_generator_commutes(p5k6):
    z = central_z(1, 3, p5k6)
    for var in enumerate_vars(3, kind=GL):
        g = generator(var, 3, p5k6, GL)
        assert z @ g == g @ z


def test_membership_is_checked():
    params = PadicParams(5, 3)
    with pytest.raises(GroupMembershipError, match='leaves pro-p Iwahori'):
        GroupElement([[1, 0], [1, 1]], params)
    with pytest.raises(GroupMembershipError):
        GroupElement([[6, 0], [0, 6]], params)
    GroupElement([[6, 0], [0, 6]], params, GL)


# ==================== VALUATION ====================

@pytest.mark.parametrize('n', [2, 3, 4])
def test_valuation_of_lower_generators(n, p5k6):
    for i in range(2, n + 1):
        for j in range(1, i):
            assert omega(gen_x(Root(i, j), 5, n, p5k6)) == n + j - i


def test_valuation_of_corner_generator_is_one(p5k6):
    for n in (2, 3, 4):
        assert omega(gen_x(Root(n, 1), 5, n, p5k6)) == 1


def test_valuation_of_torus_generator(p5k6):
    assert omega(gen_h(Root(1, 2), 6, 3, p5k6)) == 3


def test_valuation_of_identity_is_capped(p5k6):
    v = omega(GroupElement.identity(3, p5k6))
    assert v.capped


def test_generator_valuations_equal_weights(p5k6):
    for var in enumerate_vars(3, kind=GL):
        assert omega(generator(var, 3, p5k6, GL)) == var.weight


def test_entry_valuation_table(p5k6):
    g = gen_x(Root(3, 1), 25, 3, p5k6)
    table = entry_valuations(g)
    assert table[2][0] == (1 - 3) + 3 * 2
    assert table[0][0].capped


def test_staged_minimum_ends_at_omega(p5k6, rng):
    for _ in range(10):
        g = random_element(3, p5k6, rng)
        stages = staged_minimum(g)
        assert len(stages) == 9
        assert stages[-1]['running_min'] == omega(g).to_json()


# ==================== COORDINATES ====================

def test_identity_decomposes_to_zero(p5k6):
    coords = decompose(GroupElement.identity(3, p5k6))
    assert all(c.is_zero() for c in coords.coords)


def test_generator_decomposes_to_unit_coordinate(p5k6):
    coords = decompose(gen_x(Root(2, 1), 5, 2, p5k6))
    assert [c.residue for c in coords.coords] == [1, 0, 0]


def test_single_generator_composes_to_itself(p5k6):
    for var in enumerate_vars(3):
        values = [0] * 8
        values[var.index - 1] = 1
        c = BasisCoordinates.from_ints(values, 3, p5k6)
        assert compose_from_coords(c) == generator(var, 3, p5k6)


def test_zero_coordinates_compose_to_identity(p5k6):
    assert compose_from_coords(BasisCoordinates.zero(3, p5k6)) == GroupElement.identity(3, p5k6)


@pytest.mark.parametrize('n', [2, 3, 4])
@pytest.mark.parametrize('order', ['height', LEX_ORDER])
def test_round_trip(n, order, p5k6, rng):
    for _ in range(25):
        coords = random_coords(n, p5k6, rng, order)
        g = compose_from_coords(coords)
        back = decompose(g, order)
        assert back == coords
        assert compose_from_coords(back).congruent(g, p5k6.K - 1)


def test_round_trip_gl(p5k6, rng):
    for _ in range(25):
        coords = random_coords(3, p5k6, rng, kind=GL)
        g = compose_from_coords(coords)
        assert decompose(g) == coords


@pytest.mark.parametrize('n', [2, 3, 4])
def test_closed_form_agrees_with_product(n, p5k6, rng):
    for _ in range(20):
        coords = random_coords(n, p5k6, rng)
        assert closed_form(coords) == compose_from_coords(coords)


def test_decompose_rejects_non_members(p5k6):
    g = GroupElement([[1, 0], [1, 1]], p5k6, check=False)
    with pytest.raises(GroupMembershipError):
        decompose(g)


# ==================== MIN FORMULA ====================

def test_min_formula_of_zero_is_capped(p5k6):
    assert omega_via_min(BasisCoordinates.zero(2, p5k6)).capped


@pytest.mark.parametrize('n', [2, 3, 4])
def test_min_formula_single_corner_coordinate(n, p5k6):
    corner = parse_tag(f'U({n},1)', n)
    for z, v in ((1, 0), (5, 1), (75, 2)):
        values = [0] * len(enumerate_vars(n))
        values[corner.index - 1] = z
        c = BasisCoordinates.from_ints(values, n, p5k6)
        assert omega_via_min(c) == 1 + n * v
        assert omega(compose_from_coords(c)) == 1 + n * v


@pytest.mark.parametrize('n', [2, 3])
def test_min_formula_matches_direct_valuation(n, p5k6, rng):
    for _ in range(50):
        g = random_element(n, p5k6, rng)
        direct = omega(g)
        assert omega_via_min(decompose(g)) == direct
        assert omega_via_min(decompose(g, LEX_ORDER)) == direct
