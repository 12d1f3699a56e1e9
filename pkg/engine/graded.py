"""Graded dimensions of the associated graded algebra and its monomial bases."""

import logging
from functools import lru_cache
from typing import Iterator, List, Tuple

from arithmetic.roots import HEIGHT_ORDER, SL, enumerate_vars

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def graded_dims(n: int, up_to: int, kind: str = SL) -> Tuple[int, ...]:
    """Coefficients of prod over variables of 1/(1 - t^weight), up to t^up_to"""
    if up_to < 0:
        raise ValueError(f"degree must be nonnegative, got {up_to}")
    dims = [1] + [0] * up_to
    for var in enumerate_vars(n, HEIGHT_ORDER, kind):
        w = var.weight
        for k in range(w, up_to + 1):
            dims[k] += dims[k - w]
    return tuple(dims)


def graded_dim(n: int, m: int, kind: str = SL) -> int:
    return graded_dims(n, m, kind)[m]


def iter_graded_basis(n: int, m: int, order: str = HEIGHT_ORDER, kind: str = SL) -> Iterator[Tuple[int, ...]]:
    """Normal words of scaled degree m in lexicographic order"""
    weights = [v.weight for v in enumerate_vars(n, order, kind)]
    d = len(weights)
    word: List[int] = []

    def extend(start: int, remaining: int):
        if remaining == 0:
            yield tuple(word)
            return
        for index in range(start, d + 1):
            w = weights[index - 1]
            if w <= remaining:
                word.append(index)
                yield from extend(index, remaining - w)
                word.pop()

    yield from extend(1, m)


def graded_basis(n: int, m: int, order: str = HEIGHT_ORDER, kind: str = SL) -> List[Tuple[int, ...]]:
    return list(iter_graded_basis(n, m, order, kind))


def basis_up_to(n: int, m0: int, order: str = HEIGHT_ORDER, kind: str = SL) -> List[Tuple[int, ...]]:
    """All normal words of scaled degree <= m0, by degree then lexicographically"""
    words = []
    for m in range(m0 + 1):
        words.extend(iter_graded_basis(n, m, order, kind))
    return words
