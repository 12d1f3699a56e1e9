"""
Normal ordering by letter insertion.

A word is brought to normal form one letter at a time. The `leftmost`
strategy pushes letters, right to left, into the front of an already normal
suffix, so the only inversion is always the leftmost pair. The `rightmost`
strategy appends letters, left to right, to an already normal prefix, so the
only inversion is the rightmost pair. Every (letter, normal word) product and
every word normal form is cached on the Normalizer and reused across terms and
across calls.
"""

import logging
import sys
from typing import Dict, List, Tuple

from joblib import Parallel, delayed

from arithmetic.padic import Valuation
from engine.rules import RuleTable
from engine.series import Series, Word, canonicalize
from utils.exceptions import MeasureViolation, ParameterMismatch

logger = logging.getLogger(__name__)

LEFTMOST = 'leftmost'
RIGHTMOST = 'rightmost'
STRATEGIES = (LEFTMOST, RIGHTMOST)

PARALLEL_THRESHOLD = 2000

# nested insertions go as deep as the longest rewriting chain below the cap
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

Terms = Dict[Word, int]


def checked_table(rules: RuleTable) -> Dict:
    """Rule terms per pair, each one checked against the termination measure

    A rewrite step changes the measure only through the rule term it applies:
    the term raises svar, or keeps it and is a single letter, or keeps it and
    is the swapped pair (exactly one inversion fewer in any context).
    """
    table = rules.rhs_terms()
    for pair, entries in table.items():
        swapped = (pair[1], pair[0])
        for rule_word, _, gain, preserving in entries:
            if gain < 0:
                raise MeasureViolation(pair, f"{pair} -> {rule_word} lowers svar by {-gain}")
            if preserving and len(rule_word) > 1 and rule_word != swapped:
                raise MeasureViolation(pair, f"{pair} -> {rule_word} keeps svar without shortening or sorting")
    return table


def _accumulate(target: Terms, source: Terms, scale: int):
    for word, coeff in source.items():
        target[word] = target.get(word, 0) + scale * coeff


class Normalizer:
    def __init__(self, rules: RuleTable, strategy: str = LEFTMOST, n_jobs: int = 1):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.rules = rules
        self.params = rules.params
        self.strategy = strategy
        self.n_jobs = n_jobs
        self.table = checked_table(rules)
        self.steps = 0
        self._weights = self.params.weights
        self._inserted: Dict[Tuple, Terms] = {}
        self._words: Dict[Word, Terms] = {}
        self._active = set()

    def _check(self, s: Series):
        if s.params != self.params:
            raise ParameterMismatch(f"series built for {s.params}, rules for {self.params}")

    @property
    def cache_size(self) -> int:
        return len(self._inserted) + len(self._words)

    def clear_cache(self):
        self._inserted.clear()
        self._words.clear()

    def _degree(self, word: Word) -> int:
        weights = self._weights
        return sum(weights[i] for i in word)

    # ==================== LEFTMOST ====================

    def _insert(self, x: int, v: Word) -> Terms:
        """Normal form of x*v for a normal word v"""
        key = (x, v)
        cached = self._inserted.get(key)
        if cached is not None:
            return cached
        if self._weights[x] + self._degree(v) > self.params.M:
            result: Terms = {}
        elif not v or x <= v[0]:
            result = {(x,) + v: 1}
        else:
            result = self._rewrite(key, (x, v[0]), lambda rule_word: self._prepend(rule_word, v[1:]))
        self._inserted[key] = result
        return result

    def _prepend(self, word: Word, v: Word) -> Terms:
        """Normal form of word*v for a normal word v"""
        current: Terms = {v: 1}
        for letter in reversed(word):
            following: Terms = {}
            for w, c in current.items():
                _accumulate(following, self._insert(letter, w), c)
            current = canonicalize(self.params, following)
        return current

    # ==================== RIGHTMOST ====================

    def _append(self, v: Word, x: int) -> Terms:
        """Normal form of v*x for a normal word v"""
        key = (v, x)
        cached = self._inserted.get(key)
        if cached is not None:
            return cached
        if self._weights[x] + self._degree(v) > self.params.M:
            result: Terms = {}
        elif not v or v[-1] <= x:
            result = {v + (x,): 1}
        else:
            result = self._rewrite(key, (v[-1], x), lambda rule_word: self._extend(v[:-1], rule_word))
        self._inserted[key] = result
        return result

    def _extend(self, v: Word, word: Word) -> Terms:
        """Normal form of v*word for a normal word v"""
        current: Terms = {v: 1}
        for letter in word:
            following: Terms = {}
            for w, c in current.items():
                _accumulate(following, self._append(w, letter), c)
            current = canonicalize(self.params, following)
        return current

    # ==================== REWRITING ====================

    def _rewrite(self, key: Tuple, pair: Tuple[int, int], expand) -> Terms:
        """Apply the rule for the inverted pair and normalize every resulting term"""
        if key in self._active:
            raise MeasureViolation(pair, f"rewriting {key} leads back to itself")
        self._active.add(key)
        try:
            acc: Terms = {}
            for rule_word, rule_coeff, _, _ in self.table[pair]:
                self.steps += 1
                _accumulate(acc, expand(rule_word), rule_coeff)
            return canonicalize(self.params, acc)
        finally:
            self._active.discard(key)

    def word_normal_form(self, word: Word) -> Terms:
        cached = self._words.get(word)
        if cached is not None:
            return cached
        if self.strategy == LEFTMOST:
            result = self._prepend(word, ())
        else:
            result = self._extend((), word)
        self._words[word] = result
        return result

    def _normalize_terms(self, items: List[Tuple[Word, int]]) -> Terms:
        acc: Terms = {}
        for word, coeff in items:
            _accumulate(acc, self.word_normal_form(word), coeff)
        return acc

    def normalize(self, s: Series) -> Series:
        """Normal-form series equal to s modulo the relations and the cap"""
        self._check(s)
        items = sorted(s.terms.items())
        if self.n_jobs != 1 and len(items) >= PARALLEL_THRESHOLD:
            # each worker builds its own cache
            chunks = max(self.n_jobs, 2) if self.n_jobs > 0 else 8
            size = -(-len(items) // chunks)
            parts = Parallel(n_jobs=self.n_jobs)(
                delayed(_normalize_chunk)(self.rules, self.strategy, items[k:k + size])
                for k in range(0, len(items), size)
            )
            acc: Terms = {}
            for terms, steps in parts:
                self.steps += steps
                _accumulate(acc, terms, 1)
        else:
            acc = self._normalize_terms(items)
        logger.debug(f"Normalized {len(items)} terms, {self.cache_size} cached products, {self.steps} steps")
        return Series(self.params, acc)

    def multiply(self, a: Series, b: Series) -> Series:
        """Product in the presented algebra"""
        self._check(a)
        self._check(b)
        return self.normalize(a.concat(b))


def _normalize_chunk(rules: RuleTable, strategy: str, items: List[Tuple[Word, int]]) -> Tuple[Terms, int]:
    worker = Normalizer(rules, strategy)
    return worker._normalize_terms(items), worker.steps


def normalize(s: Series, rules: RuleTable, strategy: str = LEFTMOST, n_jobs: int = 1) -> Series:
    return Normalizer(rules, strategy, n_jobs).normalize(s)


def multiply(a: Series, b: Series, rules: RuleTable, n_jobs: int = 1) -> Series:
    return Normalizer(rules, n_jobs=n_jobs).multiply(a, b)


def svar(s: Series) -> Valuation:
    """Scaled valuation of a series; a single term is a one-term series"""
    return s.svar()
