"""
Ground truth from finite quotients.

The images of the generators mod p^m generate a finite p-group Q. Its group
algebra over Z/p^Kc receives the algebra through variable -> [g] - [1]; once
the truncation is deep enough that every discarded term maps to zero, the
engine's products can be compared with convolution in Q exactly.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from arithmetic.matgroup import GroupElement, decompose, generator
from arithmetic.padic import PadicParams
from arithmetic.relations import check_all, check_steinberg, conjugation_sweep, rank_one_identity_holds
from arithmetic.roots import HEIGHT_ORDER, SL, GL, Root, enumerate_vars
from config import Config
from engine.graded import basis_up_to, graded_dims
from engine.normalizer import Normalizer
from engine.series import AlgebraParams, Series, Word
from utils import linalg
from utils.exceptions import OracleConfigError, ParameterMismatch

logger = logging.getLogger(__name__)

Key = Tuple[int, ...]


def _mul_flat(a: Key, b: Key, n: int, modulus: int) -> Key:
    return tuple(
        sum(a[i * n + k] * b[k * n + j] for k in range(n)) % modulus
        for i in range(n) for j in range(n)
    )


def expected_order(n: int, p: int, m: int, kind: str = SL) -> int:
    exponent = (n * n - 1) * (m - 1) + n * (n - 1) // 2
    if kind == GL:
        exponent += m - 1
    return p ** exponent


# ==================== FINITE QUOTIENT ====================

@dataclass
class FiniteQuotient:
    """A finite group with canonically indexed elements and a Cayley table"""
    n: int
    p: int
    m: int
    elements: List[Key]
    table: np.ndarray
    identity: int
    generators: Dict[int, int] = field(default_factory=dict)
    kind: str = SL
    ordering: str = HEIGHT_ORDER

    def __len__(self):
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverses(self) -> np.ndarray:
        return np.argmax(self.table == self.identity, axis=1)

    def conjugates(self, g: int) -> List[int]:
        inv = self.inverses()
        return sorted({int(self.table[self.table[h, g], inv[h]]) for h in range(self.order)})

    def generator_classes(self) -> List[int]:
        """Union of the conjugacy classes of the nontrivial generator images"""
        classes = set()
        for g in sorted(set(self.generators.values())):
            if g != self.identity:
                classes.update(self.conjugates(g))
        return sorted(classes)

    def is_closed(self) -> bool:
        return bool(np.all((self.table >= 0) & (self.table < self.order)))

    @classmethod
    def from_generators(cls, generators: Dict[int, Key], identity: Key, mul: Callable[[Key, Key], Key],
                        sort_key: Callable[[Key], Tuple] = None, max_order: int = None,
                        n: int = 0, p: int = 0, m: int = 0, kind: str = SL,
                        order: str = HEIGHT_ORDER) -> 'FiniteQuotient':
        """Closure of the generators under multiplication, breadth first"""
        seen = {identity}
        frontier = [identity]
        gens = sorted(set(generators.values()))
        while frontier:
            next_frontier = []
            for x in frontier:
                for g in gens:
                    y = mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        next_frontier.append(y)
                        if max_order is not None and len(seen) > max_order:
                            raise OracleConfigError(f"quotient exceeds the size bound {max_order}")
            frontier = next_frontier
        elements = sorted(seen, key=sort_key) if sort_key else sorted(seen)
        index = {x: k for k, x in enumerate(elements)}
        size = len(elements)
        table = np.empty((size, size), dtype=np.int64)
        for a, x in enumerate(elements):
            for b, y in enumerate(elements):
                table[a, b] = index[mul(x, y)]
        return cls(n, p, m, elements, table, index[identity],
                   {var: index[key] for var, key in generators.items()}, kind, order)


def build_quotient(n: int, p: int, m: int, order: str = HEIGHT_ORDER, kind: str = SL,
                   max_order: int = None) -> FiniteQuotient:
    """Image of the pro-p Iwahori in GL_n(Z/p^m), generated by the ordered basis"""
    max_order = Config.ORACLE_MAX_ORDER if max_order is None else max_order
    if m < 1:
        raise OracleConfigError(f"quotient depth must be >= 1, got {m}")
    predicted = expected_order(n, p, m, kind)
    if predicted > max_order:
        logger.error(f"Quotient error: predicted order {predicted} exceeds {max_order}")
        raise OracleConfigError(f"quotient of order {predicted} exceeds the size bound {max_order}")
    params = PadicParams(p, m)
    modulus = params.modulus
    generators = {}
    for var in enumerate_vars(n, order, kind):
        g = generator(var, n, params, kind)
        generators[var.index] = tuple(int(x) for x in g.entries.flat)
    identity = tuple(int(i == j) for i in range(n) for j in range(n))

    def sort_key(key: Key) -> Tuple:
        element = GroupElement([key[r * n:(r + 1) * n] for r in range(n)], params, kind, check=False)
        return tuple(c.residue for c in decompose(element, order).coords)

    quotient = FiniteQuotient.from_generators(
        generators, identity, lambda a, b: _mul_flat(a, b, n, modulus),
        sort_key=sort_key, max_order=max_order, n=n, p=p, m=m, kind=kind, order=order)
    logger.info(f"Built quotient n={n}, p={p}, m={m}, {kind}: order {quotient.order}")
    return quotient


# ==================== GROUP ALGEBRA ====================

class GAElement:
    """Element of Z/p^Kc[Q] as a dense coefficient vector"""

    __slots__ = ('quotient', 'Kc', 'vector')

    def __init__(self, quotient: FiniteQuotient, Kc: int, vector: Optional[np.ndarray] = None):
        self.quotient = quotient
        self.Kc = Kc
        if vector is None:
            vector = np.zeros(quotient.order, dtype=np.int64)
        self.vector = np.asarray(vector, dtype=np.int64) % self.modulus

    @property
    def modulus(self) -> int:
        return self.quotient.p ** self.Kc

    @classmethod
    def basis(cls, quotient: FiniteQuotient, Kc: int, g: int) -> 'GAElement':
        element = cls(quotient, Kc)
        element.vector[g] = 1
        return element

    def support(self) -> Dict[int, int]:
        return {int(g): int(c) for g, c in enumerate(self.vector) if c}

    def __add__(self, other: 'GAElement') -> 'GAElement':
        return GAElement(self.quotient, self.Kc, self.vector + other.vector)

    def __sub__(self, other: 'GAElement') -> 'GAElement':
        return GAElement(self.quotient, self.Kc, self.vector - other.vector)

    def scale(self, c: int) -> 'GAElement':
        return GAElement(self.quotient, self.Kc, self.vector * (c % self.modulus))

    def right_times_group(self, h: int) -> np.ndarray:
        """Coefficient vector of self * [h]"""
        out = np.zeros_like(self.vector)
        out[self.quotient.table[:, h]] = self.vector
        return out

    def times_augmentation(self, h: int) -> 'GAElement':
        """self * ([h] - [1])"""
        return GAElement(self.quotient, self.Kc, self.right_times_group(h) - self.vector)

    def __mul__(self, other: 'GAElement') -> 'GAElement':
        out = np.zeros_like(self.vector)
        for h, c in other.support().items():
            out = (out + self.right_times_group(h) * c) % self.modulus
        return GAElement(self.quotient, self.Kc, out)

    def is_zero(self) -> bool:
        return not self.vector.any()

    def __eq__(self, other):
        if not isinstance(other, GAElement):
            return NotImplemented
        return self.quotient is other.quotient and np.array_equal(self.vector, other.vector)


def embed_word(word: Word, q: FiniteQuotient, Kc: int) -> GAElement:
    element = GAElement.basis(q, Kc, q.identity)
    for letter in word:
        g = q.generators[letter]
        if g == q.identity:
            return GAElement(q, Kc)
        element = element.times_augmentation(g)
    return element


def embed(x, q: FiniteQuotient, Kc: int = 1) -> GAElement:
    """Variable -> [g] - [1], extended multiplicatively and linearly"""
    if not isinstance(x, Series):
        return embed_word(tuple(x), q, Kc)
    if (x.params.n, x.params.p, x.params.kind, x.params.order) != (q.n, q.p, q.kind, q.ordering):
        raise ParameterMismatch("series and quotient come from different groups")
    total = np.zeros(q.order, dtype=np.int64)
    modulus = q.p ** Kc
    for word, coeff in x.sorted_terms():
        if coeff % modulus == 0:
            continue
        image = embed_word(word, q, Kc)
        total = (total + image.vector * (coeff % modulus)) % modulus
    return GAElement(q, Kc, total)


# ==================== CHECKS ====================

@dataclass
class AugIdealProfile:
    t: int
    ranks: List[int]


def aug_nilpotency(q: FiniteQuotient, Kc: int = 1) -> AugIdealProfile:
    """Smallest t with I^t = 0 in Z/p^Kc[Q], from explicit spans"""
    modulus = q.p ** Kc
    # I is spanned by g - 1 over the non-identity elements
    rows = []
    for g in range(q.order):
        if g != q.identity:
            row = np.zeros(q.order, dtype=np.int64)
            row[g] = 1
            row[q.identity] = modulus - 1
            rows.append(row)
    classes = q.generator_classes()
    # echelon form keeps one row per independent vector mod p^Kc
    current = linalg.echelon_mod(np.array(rows).reshape(len(rows), q.order), q.p, Kc)
    ranks = []
    power = 1
    while current.shape[0] > 0:
        ranks.append(int(current.shape[0]))
        # I^(k+1) = I^k * I, and I is generated as an ideal by (c - 1) for generators c
        products = []
        for v in current:
            for c in classes:
                shifted = np.zeros_like(v)
                shifted[q.table[:, c]] = v
                # v * (c - 1)
                products.append((shifted - v) % modulus)
        if not products:
            current = np.zeros((0, q.order), dtype=np.int64)
        else:
            current = linalg.echelon_mod(np.array(products), q.p, Kc)
        power += 1
    logger.info(f"Augmentation ideal of order-{q.order} quotient: nilpotency index {power}")
    return AugIdealProfile(power, ranks)


def report(check: str, params: Dict, passed: bool, witnesses: List) -> Dict:
    return {'check': check, 'params': params, 'pass': bool(passed), 'witnesses': witnesses}


def hom_check(a: Series, b: Series, q: FiniteQuotient, normalizer: Normalizer, Kc: int, t: int) -> Dict:
    """embed(a*b) against embed(a)*embed(b) in the quotient algebra"""
    params = normalizer.params
    if params.M < params.n * (Kc - 1) + params.n * t or params.K < Kc:
        logger.error(f"Homomorphism check error: M={params.M} below n(Kc-1)+n*t={params.n * (Kc - 1 + t)}")
        raise OracleConfigError("truncation not oracle-tight")
    product = normalizer.multiply(a, b)
    lhs = embed(product, q, Kc)
    rhs = embed(a, q, Kc) * embed(b, q, Kc)
    diff = lhs - rhs
    witnesses = [] if diff.is_zero() else [{'element': g, 'difference': c} for g, c in diff.support().items()]
    return report('oracle-hom', {**params.to_json(), 'm': q.m, 'Kc': Kc, 't': t,
                                 'a': a.describe(), 'b': b.describe()}, diff.is_zero(), witnesses)


def independence_check(q: FiniteQuotient, m0: int, Kc: int = 1, order: str = HEIGHT_ORDER) -> Dict:
    """Images of all normal words of scaled degree <= m0 must be independent over F_p"""
    words = basis_up_to(q.n, m0, order, q.kind)
    rows = np.array([embed_word(w, q, 1).vector for w in words]).reshape(len(words), q.order)
    rank = linalg.rank_mod_p(rows, q.p)
    witnesses = []
    if rank < len(words):
        augmented = np.concatenate([rows % q.p, np.eye(len(words), dtype=np.int64)], axis=1)
        reduced = linalg.echelon_mod(augmented, q.p, 1)
        for row in reduced:
            if not row[:q.order].any():
                kernel = {str(list(words[k])): int(c) for k, c in enumerate(row[q.order:]) if c}
                witnesses.append({'kernel': kernel, 'note': 'quotient too shallow or dependent images'})
                break
    dims = graded_dims(q.n, m0, q.kind)
    return report('independence', {'n': q.n, 'p': q.p, 'm': q.m, 'm0': m0, 'Kc': Kc,
                                   'words': len(words), 'rank': rank, 'graded_dims': list(dims)},
                  rank == len(words), witnesses)


def relation_matrix_check(n: int, p: int, K: int, kind: str = SL, order: str = HEIGHT_ORDER) -> Dict:
    """Every relation instance, the relations as written, the torus conjugations and the
    rank-one identities as matrices"""
    params = PadicParams(p, K)
    result = check_all(n, params, order, kind)
    stated = check_steinberg(n, params, order)
    witnesses = list(result['failures']) + list(stated['failures'])
    conjugation_ok = conjugation_sweep(n, params)
    if not conjugation_ok:
        witnesses.append('torus conjugation')
    rank_one_ok = True
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            if not rank_one_identity_holds(Root(i, j), n, params):
                rank_one_ok = False
                witnesses.append(f"rank-one identity at ({i},{j})")
    return report('relations', {'n': n, 'p': p, 'K': K, 'kind': kind, 'order': order,
                                'counts': result['counts'], 'stated_counts': stated['counts']},
                  result['pass'] and stated['pass'] and conjugation_ok and rank_one_ok, witnesses)


class OracleService:
    """Caches quotients and nilpotency profiles for repeated checks"""

    def __init__(self, max_order: int = None):
        self.max_order = Config.ORACLE_MAX_ORDER if max_order is None else max_order
        self._quotients: Dict[Tuple, FiniteQuotient] = {}
        self._profiles: Dict[Tuple, AugIdealProfile] = {}

    def quotient(self, n: int, p: int, m: int, order: str = HEIGHT_ORDER, kind: str = SL) -> FiniteQuotient:
        key = (n, p, m, order, kind)
        if key not in self._quotients:
            self._quotients[key] = build_quotient(n, p, m, order, kind, self.max_order)
        return self._quotients[key]

    def profile(self, q: FiniteQuotient, Kc: int = 1) -> AugIdealProfile:
        key = (q.n, q.p, q.m, q.kind, Kc)
        if key not in self._profiles:
            self._profiles[key] = aug_nilpotency(q, Kc)
        return self._profiles[key]

    def tight_truncation(self, n: int, Kc: int, t: int) -> int:
        """Smallest M for which hom_check is exact"""
        return n * (Kc - 1) + n * t
