"""
Defining relations among the generators, one instance per wrong-ordered pair.

Each instance states g_a * g_b = prod_k g_{var_k}^{e_k} with p-adic exponents
held at the compiler precision. The rule compiler expands the right-hand side
into a series; the group side is checked here as an exact matrix identity.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from arithmetic.matgroup import GroupElement, gen_x, generator, generator_power, gen_h
from arithmetic.padic import PadicInt, PadicParams, pow_one_plus_p
from arithmetic.roots import (HEIGHT_ORDER, SL, PairCase, Root, VarId, VarKind, classify_pair,
                              commutator_data, enumerate_vars, inversion_pairs, pairing, simple_roots,
                              upper_roots, lower_roots, variable_lookup)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RelationInstance:
    case: PairCase
    factors: Tuple[Tuple[VarId, PadicInt], ...]

    @property
    def tag(self) -> str:
        return self.case.tag

    @property
    def lhs(self) -> Tuple[VarId, VarId]:
        return self.case.a, self.case.b

    def describe(self) -> str:
        rhs = ' '.join(f"(1+{var.tag})^{e.signed()}" for var, e in self.factors)
        return f"[{self.tag}] (1+{self.case.a.tag})(1+{self.case.b.tag}) = {rhs}"


def _scale(var: VarId, p: int) -> int:
    """Argument t of the generator x_root(t) attached to a root variable"""
    return p if var.kind is VarKind.U else 1


def instance_for(case: PairCase, n: int, params: PadicParams, order: str = HEIGHT_ORDER,
                 kind: str = SL) -> RelationInstance:
    """Right-hand factor list for the product g_a g_b"""
    a, b = case.a, case.b
    one = params.work(1)
    if case.is_swap:
        return RelationInstance(case, ((b, one), (a, one)))
    if case.tag == 'WU-conj':
        q = pow_one_plus_p(params.work(case.exponent))
        return RelationInstance(case, ((b, q), (a, one)))
    if case.tag == 'VW-conj':
        r = pow_one_plus_p(params.work(case.exponent))
        return RelationInstance(case, ((b, one), (a, r)))
    lookup = variable_lookup(n, order, kind)
    if case.tag == 'VU-opposite':
        r = pow_one_plus_p(params.work(-1))
        chain = tuple((lookup[('W', delta)], one) for delta in case.chain)
        return RelationInstance(case, ((b, r),) + chain + ((a, r),))
    gamma = case.gamma
    coefficient = case.sign * _scale(a, params.p) * _scale(b, params.p)
    if gamma.is_negative:
        c_var = lookup[('U', gamma)]
        exponent = coefficient // params.p
    else:
        c_var = lookup[('V', gamma)]
        exponent = coefficient
    return RelationInstance(case, ((c_var, params.work(exponent)), (b, one), (a, one)))


def all_instances(n: int, params: PadicParams, order: str = HEIGHT_ORDER, kind: str = SL) -> List[RelationInstance]:
    return [instance_for(classify_pair(a, b), n, params, order, kind)
            for a, b in inversion_pairs(n, order, kind)]


# ==================== GROUP SIDE ====================

def group_sides(instance: RelationInstance, n: int, params: PadicParams,
                kind: str = SL) -> Tuple[GroupElement, GroupElement]:
    a, b = instance.lhs
    lhs = generator(a, n, params, kind) @ generator(b, n, params, kind)
    rhs = GroupElement.identity(n, params, kind)
    for var, exponent in instance.factors:
        rhs = rhs @ generator_power(var, exponent, n, params, kind)
    return lhs, rhs


def holds(instance: RelationInstance, n: int, params: PadicParams, kind: str = SL) -> bool:
    lhs, rhs = group_sides(instance, n, params, kind)
    return lhs.congruent(rhs)


def check_all(n: int, params: PadicParams, order: str = HEIGHT_ORDER, kind: str = SL) -> Dict:
    """Every relation instance as an exact matrix identity mod p^K"""
    failures = []
    counts: Dict[str, int] = {}
    for instance in all_instances(n, params, order, kind):
        counts[instance.tag] = counts.get(instance.tag, 0) + 1
        if not holds(instance, n, params, kind):
            failures.append(instance.describe())
    if failures:
        logger.error(f"Relation check error: {len(failures)} failing instances for n={n}, p={params.p}")
    return {'pass': not failures, 'counts': counts, 'failures': failures}


def torus_conjugation_holds(root: Root, delta: Root, n: int, params: PadicParams, t: int = 1) -> bool:
    """h_delta(1+p) x_root(t) h_delta(1+p)^-1 = x_root((1+p)^<root,delta> t)"""
    if root.is_negative and t % params.p != 0:
        t *= params.p
    h = gen_h(delta, 1 + params.p, n, params)
    lhs = h @ gen_x(root, t, n, params) @ h.inverse()
    scale = pow_one_plus_p(pairing(root, delta), params)
    rhs = gen_x(root, scale.residue * t, n, params)
    return lhs.congruent(rhs)


def rank_one_identity_holds(alpha: Root, n: int, params: PadicParams) -> bool:
    """x_a(1) x_-a(p) = x_-a(p/(1+p)) h(1+p) x_a(1/(1+p)) with h the product over the simple chain"""
    p = params.p
    r = pow_one_plus_p(-1, params)
    lhs = gen_x(alpha, 1, n, params) @ gen_x(-alpha, p, n, params)
    rhs = gen_x(-alpha, p * r.residue, n, params)
    for k in range(alpha.i, alpha.j):
        rhs = rhs @ gen_h(Root(k, k + 1), 1 + p, n, params)
    rhs = rhs @ gen_x(alpha, r.residue, n, params)
    return lhs.congruent(rhs)


def conjugation_sweep(n: int, params: PadicParams) -> bool:
    roots = lower_roots(n) + upper_roots(n)
    return all(torus_conjugation_holds(root, delta, n, params) for root in roots for delta in simple_roots(n))


# ==================== STATED FORM ====================

def _stated_factors(first: VarId, second: VarId, params: PadicParams,
                    lookup) -> Optional[Tuple[Tuple[VarId, PadicInt], ...]]:
    """Right-hand side of g_first * g_second in the orientation the relation is usually written, or None"""
    one = params.work(1)
    kinds = (first.kind, second.kind)
    if kinds in ((VarKind.W, VarKind.U), (VarKind.W, VarKind.V)):
        q = pow_one_plus_p(params.work(pairing(second.root, first.root)))
        return (second, q), (first, one)
    if kinds == (VarKind.V, VarKind.U) and first.root == -second.root:
        r = pow_one_plus_p(params.work(-1))
        chain = tuple((lookup[('W', Root(k, k + 1))], one) for k in range(first.root.i, first.root.j))
        return ((second, r),) + chain + ((first, r),)
    if kinds not in ((VarKind.V, VarKind.U), (VarKind.U, VarKind.U), (VarKind.W, VarKind.W), (VarKind.V, VarKind.V)):
        return None
    data = None if kinds == (VarKind.W, VarKind.W) else commutator_data(first.root, second.root)
    if data is None:
        return (second, one), (first, one)
    # V*V is only written with the first root ending where the second starts
    if kinds == (VarKind.V, VarKind.V) and first.root.j != second.root.i:
        return None
    gamma, sign = data
    c_var = lookup[('U', gamma)] if gamma.is_negative else lookup[('V', gamma)]
    exponent = sign * _scale(first, params.p) * _scale(second, params.p) // _scale(c_var, params.p)
    return (c_var, params.work(exponent)), (second, one), (first, one)


def steinberg_identities(n: int, params: PadicParams, order: str = HEIGHT_ORDER) -> List[RelationInstance]:
    """Every defining relation as usually written, before it is turned so the lhs is an inversion

    Each identity carries the tag of the relation that governs the inverted pair.
    """
    variables = enumerate_vars(n, order, SL)
    lookup = variable_lookup(n, order, SL)
    identities = []
    for first in variables:
        for second in variables:
            if first.index == second.index:
                continue
            factors = _stated_factors(first, second, params, lookup)
            if factors is None:
                continue
            high, low = (first, second) if first.index > second.index else (second, first)
            case = PairCase(classify_pair(high, low).tag, first, second)
            identities.append(RelationInstance(case, factors))
    return identities


def check_steinberg(n: int, params: PadicParams, order: str = HEIGHT_ORDER) -> Dict:
    failures = []
    counts: Dict[str, int] = {}
    for identity in steinberg_identities(n, params, order):
        counts[identity.tag] = counts.get(identity.tag, 0) + 1
        if not holds(identity, n, params):
            failures.append(identity.describe())
    if failures:
        logger.error(f"Stated relation check error: {len(failures)} failing identities for n={n}, p={params.p}")
    return {'pass': not failures, 'counts': counts, 'failures': failures}
