"""
Truncated noncommutative power series in the ordered variables.

A Series stands for a coset modulo p^K and the filtration step Fil^{M+1}, where
a term c*w lies in Fil^s when n*val_p(c) + deg(w) >= s. Each stored coefficient
is reduced to exactly the digits that survive the cap, so two series are equal
as cosets iff their term maps are equal.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple, Union

from arithmetic.padic import PadicInt, PadicParams, Valuation, valuation
from arithmetic.roots import HEIGHT_ORDER, KINDS, ORDERS, SL, VarId, enumerate_vars, parse_tag
from utils.exceptions import ParameterMismatch, PayloadError

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]


@dataclass(frozen=True)
class AlgebraParams:
    n: int
    p: int
    K: int
    M: int
    order: str = HEIGHT_ORDER
    kind: str = SL

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"unknown ordering {self.order!r}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @cached_property
    def padic(self) -> PadicParams:
        return PadicParams.for_truncation(self.p, self.K, self.M)

    @cached_property
    def variables(self) -> Tuple[VarId, ...]:
        return enumerate_vars(self.n, self.order, self.kind)

    @cached_property
    def weights(self) -> Tuple[int, ...]:
        """weights[i] is the weight of variable i; index 0 is unused"""
        return (0,) + tuple(v.weight for v in self.variables)

    @property
    def d(self) -> int:
        return len(self.variables)

    @property
    def modulus(self) -> int:
        return self.p ** self.K

    def var(self, key: Union[int, str]) -> VarId:
        if isinstance(key, int):
            return self.variables[key - 1]
        return parse_tag(key, self.n, self.order, self.kind)

    def degree(self, word: Word) -> int:
        weights = self.weights
        return sum(weights[i] for i in word)

    def digits(self, word: Word) -> int:
        """Number of p-adic digits of a coefficient of word that survive the cap, 0 if none"""
        deg = self.degree(word)
        if deg > self.M:
            return 0
        return min(self.K, (self.M - deg) // self.n + 1)

    def canonical(self, word: Word, coeff: int) -> int:
        e = self.digits(word)
        return coeff % self.p ** e if e else 0

    def to_json(self) -> Dict:
        return {'n': self.n, 'p': self.p, 'K': self.K, 'M': self.M, 'order': self.order, 'kind': self.kind}


def inversions(word: Word) -> int:
    return sum(1 for x in range(len(word)) for y in range(x + 1, len(word)) if word[x] > word[y])


def is_normal_word(word: Word) -> bool:
    return all(word[k] <= word[k + 1] for k in range(len(word) - 1))


def word_key(word: Word, params: AlgebraParams) -> Tuple:
    return (params.degree(word), word)


class Series:
    """Finite map Word -> coefficient, canonically reduced"""

    __slots__ = ('params', 'terms')

    def __init__(self, params: AlgebraParams, terms: Optional[Dict[Word, int]] = None, reduced: bool = False):
        self.params = params
        if terms is None:
            terms = {}
        if not reduced:
            terms = canonicalize(params, terms)
        self.terms: Dict[Word, int] = terms

    # ==================== CONSTRUCTORS ====================

    @classmethod
    def zero(cls, params: AlgebraParams) -> 'Series':
        return cls(params, {}, reduced=True)

    @classmethod
    def one(cls, params: AlgebraParams) -> 'Series':
        return cls(params, {(): 1})

    @classmethod
    def from_word(cls, params: AlgebraParams, word: Iterable[int], coeff: int = 1) -> 'Series':
        return cls(params, {tuple(word): int(coeff)})

    @classmethod
    def variable(cls, params: AlgebraParams, key: Union[int, str], coeff: int = 1) -> 'Series':
        return cls.from_word(params, (params.var(key).index,), coeff)

    @classmethod
    def from_tags(cls, params: AlgebraParams, tags: List[str], coeff: int = 1) -> 'Series':
        return cls.from_word(params, [params.var(tag).index for tag in tags], coeff)

    # ==================== ARITHMETIC ====================

    def _check(self, other: 'Series'):
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.params != self.params:
            raise ParameterMismatch(f"series parameters differ: {self.params} vs {other.params}")

    def __add__(self, other: 'Series') -> 'Series':
        self._check(other)
        terms = dict(self.terms)
        for word, coeff in other.terms.items():
            terms[word] = terms.get(word, 0) + coeff
        return Series(self.params, terms)

    def __neg__(self) -> 'Series':
        return Series(self.params, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: 'Series') -> 'Series':
        return self + (-other)

    def scale(self, scalar: Union[int, PadicInt]) -> 'Series':
        scalar = int(scalar)
        return Series(self.params, {w: c * scalar for w, c in self.terms.items()})

    def concat(self, other: 'Series') -> 'Series':
        """Product in the free algebra, without rewriting"""
        self._check(other)
        terms: Dict[Word, int] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                word = w1 + w2
                terms[word] = terms.get(word, 0) + c1 * c2
        return Series(self.params, terms)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.params == other.params and self.terms == other.terms

    def __hash__(self):
        return hash((self.params, tuple(sorted(self.terms.items()))))

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    # ==================== FILTRATION ====================

    def is_normal(self) -> bool:
        return all(is_normal_word(w) for w in self.terms)

    def term_svar(self, word: Word) -> int:
        coeff = self.terms[word]
        return self.params.n * valuation(coeff, self.params.p, self.params.K) + self.params.degree(word)

    def svar(self) -> Valuation:
        """min over terms of n*val(coeff) + deg(word); capped at M+1 for zero"""
        if not self.terms:
            return Valuation.cap(self.params.M + 1)
        return Valuation(min(self.term_svar(w) for w in self.terms))

    def v_a(self) -> Valuation:
        """min over terms of val(coeff) + word length"""
        if not self.terms:
            return Valuation.cap(self.params.M + 1)
        p, K = self.params.p, self.params.K
        return Valuation(min(valuation(c, p, K) + len(w) for w, c in self.terms.items()))

    def sorted_terms(self) -> List[Tuple[Word, int]]:
        return sorted(self.terms.items(), key=lambda item: word_key(item[0], self.params))

    # ==================== SERIALIZATION ====================

    def to_json(self) -> Dict:
        payload = self.params.to_json()
        payload['terms'] = [{'word': list(w), 'coeff': str(c)} for w, c in self.sorted_terms()]
        return payload

    @classmethod
    def from_json(cls, payload: Dict, params: Optional[AlgebraParams] = None) -> 'Series':
        try:
            own = AlgebraParams(int(payload['n']), int(payload['p']), int(payload['K']), int(payload['M']),
                                payload.get('order', HEIGHT_ORDER), payload.get('kind', SL))
            if params is not None and own != params:
                raise ParameterMismatch(f"series file built for {own}, expected {params}")
            terms: Dict[Word, int] = {}
            for term in payload['terms']:
                word = tuple(_letter(own, x) for x in term['word'])
                terms[word] = terms.get(word, 0) + int(term['coeff'])
        except (KeyError, TypeError, ValueError) as e:
            logger.error(f"Series payload error: {str(e)}")
            raise PayloadError(f"malformed series: {str(e)}")
        return cls(own, terms)

    def describe(self) -> str:
        if not self.terms:
            return '0'
        parts = []
        for word, coeff in self.sorted_terms():
            letters = '*'.join(self.params.var(i).tag for i in word) or '1'
            parts.append(f"{coeff}*{letters}")
        return ' + '.join(parts)

    def __repr__(self):
        return f"Series({self.describe()})"


def _letter(params: AlgebraParams, x) -> int:
    if isinstance(x, str) and not x.isdigit():
        return params.var(x).index
    index = int(x)
    if not 1 <= index <= params.d:
        raise ValueError(f"variable index {index} out of range 1..{params.d}")
    return index


def canonicalize(params: AlgebraParams, terms: Dict[Word, int]) -> Dict[Word, int]:
    """Reduce every coefficient to its surviving digits and drop zeros"""
    result = {}
    for word, coeff in terms.items():
        reduced = params.canonical(word, coeff)
        if reduced:
            result[word] = reduced
    return result


def random_series(params: AlgebraParams, rng, terms: int = 3, max_length: int = 3) -> Series:
    """A few random words with random coefficients, usually not in normal form"""
    raw: Dict[Word, int] = {}
    for _ in range(terms):
        length = rng.randint(0, max_length)
        word = tuple(rng.randint(1, params.d) for _ in range(length))
        raw[word] = raw.get(word, 0) + rng.randrange(1, params.modulus)
    return Series(params, raw)
