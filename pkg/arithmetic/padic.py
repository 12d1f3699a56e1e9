"""
Fixed-precision arithmetic in Z_p.

Values live in Z/p^k for one of a few fixed exponents: the output precision K,
the compiler precision Kwork, and K-1 for discrete logarithms. There is no
floating precision tracking.
"""

import logging
from dataclasses import dataclass
from functools import total_ordering
from math import comb
from typing import Union

from utils.exceptions import DomainError, ParameterMismatch, PrecisionError

logger = logging.getLogger(__name__)


def valuation(x: int, p: int, cap: int) -> int:
    """Largest v < cap with p^v | x, or cap when p^cap | x"""
    if x == 0:
        return cap
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


def factorial_valuation(m: int, p: int) -> int:
    """val_p(m!) by Legendre's formula"""
    total = 0
    q = p
    while q <= m:
        total += m // q
        q *= p
    return total


@total_ordering
@dataclass(frozen=True)
class Valuation:
    """A valuation that is either exact or only known to be >= value"""
    value: int
    capped: bool = False

    @classmethod
    def cap(cls, bound: int) -> 'Valuation':
        return cls(bound, True)

    def _key(self):
        return (1, 0) if self.capped else (0, self.value)

    def __lt__(self, other):
        if isinstance(other, int):
            other = Valuation(other)
        return self._key() < other._key()

    def __eq__(self, other):
        if isinstance(other, int):
            return not self.capped and self.value == other
        if isinstance(other, Valuation):
            return self.capped == other.capped and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.capped))

    def shift(self, offset: int) -> 'Valuation':
        return Valuation(self.value + offset, self.capped)

    def to_json(self) -> str:
        return f">={self.value}" if self.capped else str(self.value)

    def __str__(self):
        return self.to_json()


@dataclass(frozen=True)
class PadicParams:
    p: int
    K: int
    Kwork: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"precision K must be >= 1, got {self.K}")
        if self.Kwork < self.K:
            object.__setattr__(self, 'Kwork', self.K)

    @classmethod
    def for_truncation(cls, p: int, K: int, M: int) -> 'PadicParams':
        """Kwork large enough that binom(q, m) is exact mod p^K for every m <= M"""
        return cls(p, K, K + factorial_valuation(max(M, 0), p))

    @property
    def modulus(self) -> int:
        return self.p ** self.K

    def element(self, value: int, prec: int = None) -> 'PadicInt':
        return PadicInt(value, self, self.K if prec is None else prec)

    def work(self, value: int) -> 'PadicInt':
        return PadicInt(value, self, self.Kwork)

    def zero(self) -> 'PadicInt':
        return self.element(0)

    def one(self) -> 'PadicInt':
        return self.element(1)


Operand = Union['PadicInt', int]


class PadicInt:
    """Residue mod p^prec; prec is K unless stated otherwise"""

    __slots__ = ('residue', 'params', 'prec')

    def __init__(self, residue: int, params: PadicParams, prec: int = None):
        prec = params.K if prec is None else prec
        if prec < 0:
            raise PrecisionError(f"negative precision {prec}")
        self.params = params
        self.prec = prec
        self.residue = residue % (params.p ** prec)

    # ==================== PRECISION ====================

    @property
    def modulus(self) -> int:
        return self.params.p ** self.prec

    def reduce(self, prec: int = None) -> 'PadicInt':
        """Drop to a lower precision (default K)"""
        prec = self.params.K if prec is None else prec
        return PadicInt(self.residue, self.params, min(prec, self.prec))

    def _coerce(self, other: Operand) -> 'PadicInt':
        if isinstance(other, PadicInt):
            if other.params.p != self.params.p:
                raise ParameterMismatch(f"primes differ: {self.params.p} vs {other.params.p}")
            return other
        if isinstance(other, int):
            return PadicInt(other, self.params, self.prec)
        raise TypeError(f"cannot combine PadicInt with {type(other).__name__}")

    # ==================== RING OPERATIONS ====================

    def __add__(self, other: Operand) -> 'PadicInt':
        other = self._coerce(other)
        return PadicInt(self.residue + other.residue, self.params, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self) -> 'PadicInt':
        return PadicInt(-self.residue, self.params, self.prec)

    def __sub__(self, other: Operand) -> 'PadicInt':
        return self + (-self._coerce(other))

    def __rsub__(self, other: Operand) -> 'PadicInt':
        return self._coerce(other) - self

    def __mul__(self, other: Operand) -> 'PadicInt':
        other = self._coerce(other)
        return PadicInt(self.residue * other.residue, self.params, min(self.prec, other.prec))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> 'PadicInt':
        if exponent < 0:
            return invert(self) ** (-exponent)
        return PadicInt(pow(self.residue, exponent, self.modulus), self.params, self.prec)

    def __eq__(self, other):
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        if isinstance(other, PadicInt):
            prec = min(self.prec, other.prec)
            return (self.residue - other.residue) % (self.params.p ** prec) == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.params.p, self.prec))

    def __int__(self):
        return self.residue

    def signed(self) -> int:
        """Representative in (-p^prec/2, p^prec/2]"""
        half = self.modulus // 2
        return self.residue - self.modulus if self.residue > half else self.residue

    def is_zero(self) -> bool:
        return self.residue == 0

    def is_unit(self) -> bool:
        return self.prec > 0 and self.residue % self.params.p != 0

    def val(self) -> Valuation:
        return val_p(self)

    def to_json(self) -> str:
        return str(self.residue)

    def __repr__(self):
        return f"PadicInt({self.residue} mod {self.params.p}^{self.prec})"


# ==================== SPECIAL FUNCTIONS ====================

def val_p(x: PadicInt) -> Valuation:
    """p-adic valuation, capped at the precision of x"""
    if x.residue == 0:
        return Valuation.cap(x.prec)
    return Valuation(valuation(x.residue, x.params.p, x.prec))


def invert(x: PadicInt) -> PadicInt:
    """Multiplicative inverse of a unit"""
    if not x.is_unit():
        logger.error(f"Inversion error: {x!r} has positive valuation")
        raise PrecisionError("not invertible at this precision")
    return PadicInt(pow(x.residue, -1, x.modulus), x.params, x.prec)


def pow_one_plus_p(z: Operand, params: PadicParams = None) -> PadicInt:
    """(1+p)^z for a p-adic exponent z

    z mod p^k determines (1+p)^z mod p^(k+1), so an exponent known to K-1
    digits still yields a value at precision K.
    """
    if isinstance(z, int):
        if params is None:
            raise ValueError("integer exponents need explicit params")
        z = params.element(z)
    params = z.params
    ceiling = params.Kwork if z.prec > params.K else params.K
    prec = min(z.prec + 1, ceiling)
    return PadicInt(pow(1 + params.p, z.residue, params.p ** prec), params, prec)


def binom(q: PadicInt, m: int) -> PadicInt:
    """Generalized binomial coefficient q(q-1)...(q-m+1)/m!

    Exact mod p^K when q carries at least K + val_p(m!) digits.
    """
    if m < 0:
        raise ValueError(f"binomial index must be nonnegative, got {m}")
    params = q.params
    prec = min(params.K, q.prec - factorial_valuation(m, params.p))
    if prec < 0:
        raise PrecisionError(f"binom({q!r}, {m}) needs more working digits")
    return PadicInt(comb(q.residue, m), params, prec)


def dlog_one_plus_p(u: PadicInt) -> PadicInt:
    """Discrete logarithm base (1+p) on 1 + pZ_p, known mod p^(prec-1)"""
    params = u.params
    p = params.p
    if u.residue % p != 1 % p:
        logger.error(f"Logarithm error: {u!r} is not congruent to 1 mod {p}")
        raise DomainError("not in the domain of the (1+p)-logarithm")
    z = 0
    for j in range(2, u.prec + 1):
        modulus = p ** j
        ratio = u.residue * pow(pow(1 + p, z, modulus), -1, modulus) % modulus
        digit = (ratio - 1) // p ** (j - 1) % p
        z += digit * p ** (j - 2)
    return PadicInt(z, params, max(u.prec - 1, 0))
