"""
Type A_{n-1} root bookkeeping: roots, the ordered variables of the algebra and
the classification of wrong-ordered variable pairs.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

HEIGHT_ORDER = 'height'
LEX_ORDER = 'lex'
ORDERS = (HEIGHT_ORDER, LEX_ORDER)

SL = 'SL'
GL = 'GL'
KINDS = (SL, GL)


@dataclass(frozen=True, order=True)
class Root:
    """The root e_i - e_j, written (i, j) with 1-based indices"""
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError(f"({self.i},{self.j}) is not a root")

    @property
    def is_positive(self) -> bool:
        return self.i < self.j

    @property
    def is_negative(self) -> bool:
        return self.i > self.j

    @property
    def is_simple(self) -> bool:
        return self.j == self.i + 1

    @property
    def height(self) -> int:
        return self.j - self.i

    def __neg__(self) -> 'Root':
        return Root(self.j, self.i)

    def __str__(self):
        return f"({self.i},{self.j})"


def commutator_data(a: Root, b: Root) -> Optional[Tuple[Root, int]]:
    """(gamma, sign) with [x_a(s), x_b(t)] = x_gamma(sign*s*t), or None when they commute"""
    if a.j == b.i and a.i != b.j:
        return Root(a.i, b.j), 1
    if b.j == a.i and b.i != a.j:
        return Root(b.i, a.j), -1
    return None


def pairing(root: Root, delta: Root) -> int:
    """<root, delta> for a simple root delta = (k, k+1)"""
    if not delta.is_simple:
        raise ValueError(f"{delta} is not a simple root")
    k = delta.i
    i, j = root.i, root.j
    return int(i == k) - int(i == k + 1) - int(j == k) + int(j == k + 1)


class VarKind(str, Enum):
    U = 'U'
    W = 'W'
    V = 'V'
    Z = 'Z'


@dataclass(frozen=True)
class VarId:
    kind: VarKind
    root: Optional[Root]
    index: int
    weight: int

    @property
    def tag(self) -> str:
        if self.kind is VarKind.Z:
            return 'Z'
        return f"{self.kind.value}({self.root.i},{self.root.j})"

    def to_json(self) -> Dict:
        return {'index': self.index, 'tag': self.tag, 'weight': self.weight}

    def __str__(self):
        return self.tag


def lower_roots(n: int, order: str = HEIGHT_ORDER) -> List[Root]:
    """Negative roots in the order the lower unipotent factors are multiplied"""
    roots = [Root(i, j) for i in range(2, n + 1) for j in range(1, i)]
    if order == HEIGHT_ORDER:
        return sorted(roots, key=lambda r: (r.height, r.i))
    if order == LEX_ORDER:
        return sorted(roots, key=lambda r: (r.i, r.j))
    raise ValueError(f"unknown ordering {order!r}")


def upper_roots(n: int) -> List[Root]:
    """Positive roots, lowest row first and right to left within a row"""
    roots = [Root(i, j) for i in range(1, n) for j in range(i + 1, n + 1)]
    return sorted(roots, key=lambda r: (-r.i, -r.j))


def simple_roots(n: int) -> List[Root]:
    return [Root(k, k + 1) for k in range(1, n)]


@lru_cache(maxsize=None)
def enumerate_vars(n: int, order: str = HEIGHT_ORDER, kind: str = SL) -> Tuple[VarId, ...]:
    """The ordered variables x_1, ..., x_d (plus the central variable for GL)"""
    if n < 2:
        raise ValueError(f"group size must be at least 2, got {n}")
    if kind not in KINDS:
        raise ValueError(f"unknown group kind {kind!r}")
    variables: List[VarId] = []
    for root in lower_roots(n, order):
        variables.append(VarId(VarKind.U, root, len(variables) + 1, n + root.height))
    for root in simple_roots(n):
        variables.append(VarId(VarKind.W, root, len(variables) + 1, n))
    for root in upper_roots(n):
        variables.append(VarId(VarKind.V, root, len(variables) + 1, root.height))
    if kind == GL:
        variables.append(VarId(VarKind.Z, None, len(variables) + 1, n))
    return tuple(variables)


def variable_lookup(n: int, order: str = HEIGHT_ORDER, kind: str = SL) -> Dict[Tuple[str, Optional[Root]], VarId]:
    return {(v.kind.value, v.root): v for v in enumerate_vars(n, order, kind)}


def parse_tag(tag: str, n: int, order: str = HEIGHT_ORDER, kind: str = SL) -> VarId:
    """Inverse of VarId.tag"""
    lookup = variable_lookup(n, order, kind)
    tag = tag.strip()
    if tag == 'Z':
        key = ('Z', None)
    else:
        try:
            letter, rest = tag[0], tag[1:].strip('()')
            i, j = (int(part) for part in rest.split(','))
            key = (letter, Root(i, j))
        except (ValueError, IndexError):
            raise ValueError(f"malformed variable tag {tag!r}")
    if key not in lookup:
        raise ValueError(f"no variable {tag!r} for n={n}, kind={kind}")
    return lookup[key]


# ==================== PAIR CLASSIFICATION ====================

@dataclass(frozen=True)
class PairCase:
    """Which defining relation rewrites the wrong-ordered product a*b"""
    tag: str
    a: VarId
    b: VarId
    gamma: Optional[Root] = None
    sign: int = 0
    exponent: int = 0
    chain: Tuple[Root, ...] = field(default_factory=tuple)

    @property
    def is_swap(self) -> bool:
        return self.tag in SWAP_RELATIONS or (self.tag == 'WU-conj' and self.exponent == 0)


SWAP_TAGS = {
    (VarKind.V, VarKind.U): 'VU-swap',
    (VarKind.U, VarKind.U): 'UU-swap',
    (VarKind.W, VarKind.W): 'WW-swap',
    (VarKind.V, VarKind.V): 'VV-swap',
}
SWAP_RELATIONS = frozenset(SWAP_TAGS.values()) | {'Z-central'}


def classify_pair(a: VarId, b: VarId) -> PairCase:
    """Governing relation for the adjacent product a*b with index(a) > index(b)"""
    if a.index <= b.index:
        raise ValueError(f"{a}*{b} is not an inversion")
    if a.kind is VarKind.Z or b.kind is VarKind.Z:
        return PairCase('Z-central', a, b)
    kinds = (a.kind, b.kind)
    if kinds == (VarKind.W, VarKind.U):
        return PairCase('WU-conj', a, b, exponent=pairing(b.root, a.root))
    if kinds == (VarKind.V, VarKind.W):
        return PairCase('VW-conj', a, b, exponent=-pairing(a.root, b.root))
    if kinds == (VarKind.W, VarKind.W):
        return PairCase('WW-swap', a, b)
    if kinds == (VarKind.V, VarKind.U) and a.root == -b.root:
        i, j = a.root.i, a.root.j
        chain = tuple(Root(k, k + 1) for k in range(i, j))
        return PairCase('VU-opposite', a, b, chain=chain)
    data = commutator_data(a.root, b.root)
    if data is None:
        return PairCase(SWAP_TAGS[kinds], a, b)
    gamma, sign = data
    if kinds == (VarKind.V, VarKind.U):
        if a.root.j == b.root.i:
            tag = 'VU-upper' if gamma.is_positive else 'VU-lower'
        else:
            tag = 'VU-upper-rev' if gamma.is_positive else 'VU-lower-rev'
    elif kinds == (VarKind.U, VarKind.U):
        tag = 'UU-comm+' if sign > 0 else 'UU-comm-'
    elif kinds == (VarKind.V, VarKind.V):
        tag = 'VV-comm+' if sign > 0 else 'VV-comm-'
    else:
        raise ValueError(f"no relation governs {a}*{b}")
    return PairCase(tag, a, b, gamma=gamma, sign=sign)


def inversion_pairs(n: int, order: str = HEIGHT_ORDER, kind: str = SL) -> List[Tuple[VarId, VarId]]:
    variables = enumerate_vars(n, order, kind)
    return [(a, b) for a in variables for b in variables if a.index > b.index]
