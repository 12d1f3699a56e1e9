"""
Rewrite rules compiled from the defining relations.

For a wrong-ordered pair (a, b) the relation (1+X_a)(1+X_b) = prod (1+X_v)^{e_v}
is expanded with generalized binomials and solved for X_a*X_b.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from arithmetic.padic import PadicInt, binom
from arithmetic.relations import RelationInstance, holds, instance_for
from arithmetic.roots import VarId, classify_pair, inversion_pairs
from engine.series import AlgebraParams, Series, Word, canonicalize, inversions
from utils.exceptions import LazardConditionError, MeasureViolation, SelfCheckError

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]

# bump whenever the compiler changes what a stored RuleTable contains
RULE_FORMAT_VERSION = 2


@dataclass(frozen=True)
class RewriteRule:
    lhs: Pair
    rhs: Series
    tag: str

    @property
    def lhs_degree(self) -> int:
        return self.rhs.params.degree(self.lhs)

    def leading_part(self) -> Series:
        """Terms of rhs with the same svar as the lhs word"""
        target = self.lhs_degree
        return Series(self.rhs.params, {w: c for w, c in self.rhs.terms.items()
                                        if self.rhs.term_svar(w) == target}, reduced=True)

    def check_measure(self):
        """Each rhs term raises svar, or keeps it while being one letter or the swapped pair"""
        target = self.lhs_degree
        a, b = self.lhs
        for word in self.rhs.terms:
            s = self.rhs.term_svar(word)
            if s > target:
                continue
            if s == target and (len(word) < 2 or (word == (b, a) and inversions(word) < 1)):
                continue
            raise MeasureViolation(self.describe(), f"term {word} has svar {s} <= {target}")

    def describe(self) -> str:
        params = self.rhs.params
        return f"[{self.tag}] {params.var(self.lhs[0]).tag}*{params.var(self.lhs[1]).tag}"

    def to_json(self) -> Dict:
        payload = self.rhs.to_json()
        payload['lhs'] = list(self.lhs)
        payload['relation'] = self.tag
        return payload


@dataclass(frozen=True)
class RuleTable:
    params: AlgebraParams
    rules: Dict[Pair, RewriteRule] = field(default_factory=dict)

    def __getitem__(self, pair: Pair) -> RewriteRule:
        return self.rules[pair]

    def __len__(self):
        return len(self.rules)

    def __eq__(self, other):
        if not isinstance(other, RuleTable):
            return NotImplemented
        return self.params == other.params and \
            {k: (r.rhs.terms, r.tag) for k, r in self.rules.items()} == \
            {k: (r.rhs.terms, r.tag) for k, r in other.rules.items()}

    def rhs_terms(self) -> Dict[Pair, List[Tuple[Word, int, int, bool]]]:
        """Per pair: (word, coeff, svar gain, is_degree_preserving) for the normalizer hot loop"""
        table = {}
        for pair, rule in self.rules.items():
            target = rule.lhs_degree
            entries = []
            for word, coeff in sorted(rule.rhs.terms.items()):
                gain = rule.rhs.term_svar(word) - target
                entries.append((word, coeff, gain, gain == 0))
            table[pair] = entries
        return table

    def to_json(self) -> Dict:
        payload = self.params.to_json()
        payload['rules'] = [self.rules[pair].to_json() for pair in sorted(self.rules)]
        return payload


# ==================== COMPILER ====================

def power_series(params: AlgebraParams, var: VarId, exponent: PadicInt) -> Series:
    """(1 + X_var)^exponent truncated at the cap"""
    terms: Dict[Word, int] = {}
    m = 0
    while m * var.weight <= params.M:
        terms[(var.index,) * m] = binom(exponent, m).residue
        m += 1
    return Series(params, terms)


def expand_instance(params: AlgebraParams, instance: RelationInstance) -> Series:
    product = Series.one(params)
    for var, exponent in instance.factors:
        product = product.concat(power_series(params, var, exponent))
    return product


def compile_rule(params: AlgebraParams, instance: RelationInstance) -> RewriteRule:
    a, b = instance.lhs
    rhs = expand_instance(params, instance)
    subtract = {(): 1, (a.index,): 1, (b.index,): 1}
    terms = dict(rhs.terms)
    for word, coeff in subtract.items():
        terms[word] = terms.get(word, 0) - coeff
    rule = RewriteRule((a.index, b.index), Series(params, canonicalize(params, terms), reduced=True), instance.tag)
    rule.check_measure()
    return rule


def compile_rules(n: int, p: int, K: int, M: int, kind: str = 'SL', order: str = 'height',
                  self_check: bool = True) -> RuleTable:
    """One rewrite rule per wrong-ordered variable pair"""
    if p <= n + 1:
        logger.error(f"Rule compilation error: p={p} <= n+1={n + 1}")
        raise LazardConditionError("Lazard condition violated")
    params = AlgebraParams(n, p, K, M, order, kind)
    padic = params.padic
    rules: Dict[Pair, RewriteRule] = {}
    for a, b in inversion_pairs(n, order, kind):
        instance = instance_for(classify_pair(a, b), n, padic, order, kind)
        if self_check and not holds(instance, n, padic, kind):
            logger.error(f"Rule self-check error: {instance.describe()}")
            raise SelfCheckError(f"relation fails as a matrix identity: {instance.describe()}")
        rules[(a.index, b.index)] = compile_rule(params, instance)
    logger.info(f"Compiled {len(rules)} rules for n={n}, p={p}, K={K}, M={M}, {kind}, {order} order")
    return RuleTable(params, rules)
