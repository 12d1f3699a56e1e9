"""
Named verification suites. Every suite returns a report
{check, params, pass, witnesses} and never raises on a failed check; input and
configuration errors still propagate to the caller.
"""

import logging
import random
from itertools import combinations_with_replacement
from typing import Callable, Dict, List, Optional

from arithmetic.matgroup import (closed_form, compose_from_coords, decompose, omega,
                                 omega_via_min, random_coords)
from arithmetic.padic import PadicParams
from arithmetic.roots import ORDERS, enumerate_vars, inversion_pairs
from config import RunConfig
from database.rule_store import RuleStore
from engine.graded import graded_basis, graded_dims
from engine.normalizer import LEFTMOST, RIGHTMOST, Normalizer
from engine.rules import compile_rules
from engine.series import Series, random_series
from services.oracle_service import (OracleService, hom_check, independence_check,
                                     relation_matrix_check, report)
from utils.exceptions import MeasureViolation, SelfCheckError

logger = logging.getLogger(__name__)

SUITES = ('relations', 'rules', 'roundtrip', 'valuation-min', 'associativity',
          'confluence', 'graded', 'oracle-hom', 'independence')

DEFAULT_SAMPLES = {
    'roundtrip': 200,
    'valuation-min': 200,
    'associativity': 50,
    'confluence': 50,
    'oracle-hom': 10,
}

# brute-force graded counts get expensive quickly
BRUTE_FORCE_DEGREE = 10
BASIS_DEGREE = 12
GRADED_DEGREE = 30
INDEPENDENCE_DEPTH = 2
INDEPENDENCE_DEGREE = 4
MAX_WITNESSES = 5


class VerificationService:
    def __init__(self, config: RunConfig, store: Optional[RuleStore] = None,
                 oracle: Optional[OracleService] = None, samples: Optional[int] = None):
        self.config = config
        self.store = store or RuleStore(config.rule_cache)
        self.oracle = oracle or OracleService(config.oracle_max_order)
        self.samples = samples
        self._suites: Dict[str, Callable[[], Dict]] = {
            'relations': self.relations,
            'rules': self.rules,
            'roundtrip': self.roundtrip,
            'valuation-min': self.valuation_min,
            'associativity': self.associativity,
            'confluence': self.confluence,
            'graded': self.graded,
            'oracle-hom': self.oracle_hom,
            'independence': self.independence,
        }

    def run(self, suite: str) -> Dict:
        if suite not in self._suites:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        logger.info(f"Suite {suite} started")
        result = self._suites[suite]()
        logger.info(f"Suite {suite} finished: {'pass' if result['pass'] else 'FAIL'}")
        return result

    def run_all(self) -> List[Dict]:
        return [self.run(suite) for suite in SUITES]

    # ==================== HELPERS ====================

    def _count(self, suite: str) -> int:
        return self.samples if self.samples is not None else DEFAULT_SAMPLES[suite]

    def _rng(self) -> random.Random:
        return random.Random(self.config.seed)

    def _padic(self) -> PadicParams:
        return PadicParams(self.config.p, self.config.K)

    def _normalizer(self, K: int = None, M: int = None, strategy: str = LEFTMOST) -> Normalizer:
        c = self.config
        rules = self.store.get_or_compile(c.n, c.p, c.K if K is None else K, c.M if M is None else M, c.order, c.kind)
        return Normalizer(rules, strategy, c.n_jobs)

    def _params(self, **extra) -> Dict:
        payload = self.config.to_json()
        payload.update(extra)
        return payload

    # ==================== MATRIX GROUP ====================

    def relations(self) -> Dict:
        c = self.config
        return relation_matrix_check(c.n, c.p, c.K, c.kind, c.order)

    def rules(self) -> Dict:
        """Compile from scratch with the self-check and the measure check enabled"""
        c = self.config
        try:
            table = compile_rules(c.n, c.p, c.K, c.M, c.kind, c.order, self_check=True)
        except (SelfCheckError, MeasureViolation) as e:
            logger.error(f"Rule compilation error: {str(e)}")
            return report('rules', self._params(), False, [str(e)])
        tags: Dict[str, int] = {}
        for rule in table.rules.values():
            tags[rule.tag] = tags.get(rule.tag, 0) + 1
        expected = len(inversion_pairs(c.n, c.order, c.kind))
        return report('rules', self._params(rules=len(table), relations=tags),
                      len(table) == expected, [])

    def roundtrip(self) -> Dict:
        """decompose(compose(c)) = c on coordinates, compose(decompose(g)) = g mod p^(K-1)"""
        c = self.config
        params = self._padic()
        rng = self._rng()
        witnesses = []
        count = self._count('roundtrip')
        for k in range(count):
            coords = random_coords(c.n, params, rng, c.order, c.kind)
            g = compose_from_coords(coords)
            back = decompose(g, c.order)
            if back != coords:
                witnesses.append({'sample': k, 'coords': coords.to_json(), 'decomposed': back.to_json()})
            elif not compose_from_coords(back).congruent(g, c.K - 1):
                witnesses.append({'sample': k, 'matrix': g.to_json()})
            elif not closed_form(back).congruent(g):
                witnesses.append({'sample': k, 'closed_form': closed_form(back).to_json()})
            if len(witnesses) >= MAX_WITNESSES:
                break
        return report('roundtrip', self._params(samples=count, torus_precision=c.K - 1),
                      not witnesses, witnesses)

    def valuation_min(self) -> Dict:
        """Direct valuation against the min formula, under both lower orderings"""
        c = self.config
        params = self._padic()
        rng = self._rng()
        witnesses = []
        count = self._count('valuation-min')
        for k in range(count):
            g = compose_from_coords(random_coords(c.n, params, rng, c.order, c.kind))
            direct = omega(g)
            for order in ORDERS:
                via_min = omega_via_min(decompose(g, order))
                if via_min != direct:
                    witnesses.append({'sample': k, 'order': order, 'direct': direct.to_json(),
                                      'min_formula': via_min.to_json(), 'matrix': g.to_json()})
            if len(witnesses) >= MAX_WITNESSES:
                break
        return report('valuation-min', self._params(samples=count, orders=list(ORDERS)),
                      not witnesses, witnesses)

    # ==================== ENGINE ====================

    def associativity(self) -> Dict:
        normalizer = self._normalizer()
        params = normalizer.params
        rng = self._rng()
        witnesses = []
        count = self._count('associativity')
        for k in range(count):
            a, b, x = (random_series(params, rng, terms=2, max_length=2) for _ in range(3))
            left = normalizer.multiply(normalizer.multiply(a, b), x)
            right = normalizer.multiply(a, normalizer.multiply(b, x))
            if left != right:
                witnesses.append({'sample': k, 'a': a.describe(), 'b': b.describe(), 'c': x.describe(),
                                  'difference': (left - right).describe()})
                if len(witnesses) >= MAX_WITNESSES:
                    break
        return report('associativity', self._params(samples=count, steps=normalizer.steps),
                      not witnesses, witnesses)

    def confluence(self) -> Dict:
        """leftmost and rightmost rewriting give the same normal form"""
        left = self._normalizer(strategy=LEFTMOST)
        right = Normalizer(left.rules, RIGHTMOST, self.config.n_jobs)
        rng = self._rng()
        witnesses = []
        count = self._count('confluence')
        for k in range(count):
            s = random_series(left.params, rng, terms=3, max_length=4)
            a, b = left.normalize(s), right.normalize(s)
            if a != b:
                witnesses.append({'sample': k, 'series': s.describe(), 'difference': (a - b).describe()})
                if len(witnesses) >= MAX_WITNESSES:
                    break
        return report('confluence', self._params(samples=count), not witnesses, witnesses)

    def graded(self) -> Dict:
        """Generating-function dimensions against the monomial basis and brute force"""
        c = self.config
        up_to = GRADED_DEGREE
        dims = graded_dims(c.n, up_to, c.kind)
        witnesses = []
        if dims[1] != c.n:
            witnesses.append({'degree': 1, 'dim': dims[1], 'expected': c.n})
        for m in range(BASIS_DEGREE + 1):
            count = len(graded_basis(c.n, m, c.order, c.kind))
            if count != dims[m]:
                witnesses.append({'degree': m, 'dim': dims[m], 'basis': count})
        weights = [v.weight for v in enumerate_vars(c.n, c.order, c.kind)]
        brute = [0] * (BRUTE_FORCE_DEGREE + 1)
        for length in range(BRUTE_FORCE_DEGREE + 1):
            for combo in combinations_with_replacement(range(len(weights)), length):
                degree = sum(weights[i] for i in combo)
                if degree <= BRUTE_FORCE_DEGREE:
                    brute[degree] += 1
        for m, count in enumerate(brute):
            if count != dims[m]:
                witnesses.append({'degree': m, 'dim': dims[m], 'brute_force': count})
        return report('graded', {'n': c.n, 'kind': c.kind, 'up_to': up_to, 'dims': list(dims)},
                      not witnesses, witnesses)

    # ==================== ORACLE ====================

    def oracle_hom(self) -> Dict:
        """Products against group-algebra convolution in the depth-1 quotient"""
        c = self.config
        Kc = c.oracle_kc
        q = self.oracle.quotient(c.n, c.p, 1, c.order, c.kind)
        t = self.oracle.profile(q, Kc).t
        M = max(c.M, self.oracle.tight_truncation(c.n, Kc, t))
        normalizer = self._normalizer(K=Kc, M=M)
        params = normalizer.params
        witnesses = []
        checked = 0
        for a_var, b_var in inversion_pairs(c.n, c.order, c.kind):
            result = hom_check(Series.variable(params, a_var.index), Series.variable(params, b_var.index),
                               q, normalizer, Kc, t)
            checked += 1
            if not result['pass']:
                witnesses.append({'pair': [a_var.tag, b_var.tag], 'witnesses': result['witnesses']})
        rng = self._rng()
        count = self._count('oracle-hom')
        for k in range(count):
            a = random_series(params, rng, terms=2, max_length=2)
            b = random_series(params, rng, terms=2, max_length=2)
            result = hom_check(a, b, q, normalizer, Kc, t)
            checked += 1
            if not result['pass']:
                witnesses.append({'sample': k, 'a': a.describe(), 'b': b.describe()})
        return report('oracle-hom', {**params.to_json(), 'm': 1, 'Kc': Kc, 't': t, 'checked': checked},
                      not witnesses, witnesses[:MAX_WITNESSES])

    def independence(self) -> Dict:
        c = self.config
        q = self.oracle.quotient(c.n, c.p, INDEPENDENCE_DEPTH, c.order, c.kind)
        return independence_check(q, INDEPENDENCE_DEGREE, c.oracle_kc, c.order)


def run_suite(suite: str, config: RunConfig, samples: Optional[int] = None,
              store: Optional[RuleStore] = None) -> Dict:
    return VerificationService(config, store=store, samples=samples).run(suite)
