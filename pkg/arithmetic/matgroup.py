"""
The pro-p Iwahori subgroup of SL_n(Z_p) or GL_n(Z_p) as exact matrices mod p^K.

Generators, the p-valuation (stored scaled by n), the triangular split
g = X Z Y and ordered-basis coordinates.
"""

import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from arithmetic.padic import (PadicInt, PadicParams, Valuation, dlog_one_plus_p,
                              invert, pow_one_plus_p, valuation)
from arithmetic.roots import (GL, HEIGHT_ORDER, SL, Root, VarId, VarKind,
                              enumerate_vars, lower_roots, simple_roots, upper_roots)
from utils import linalg
from utils.exceptions import GroupMembershipError, ParameterMismatch

logger = logging.getLogger(__name__)


class GroupElement:
    """n x n matrix over Z/p^K lying in the pro-p Iwahori subgroup"""

    def __init__(self, entries, params: PadicParams, kind: str = SL, check: bool = True):
        self.params = params
        self.kind = kind
        self.entries = linalg.as_matrix(entries, params.modulus)
        if check:
            self.check_membership()

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def p(self) -> int:
        return self.params.p

    @classmethod
    def identity(cls, n: int, params: PadicParams, kind: str = SL) -> 'GroupElement':
        return cls(linalg.identity(n), params, kind, check=False)

    def check_membership(self):
        p, n = self.p, self.n
        for i in range(n):
            for j in range(n):
                entry = int(self.entries[i, j])
                if i > j and entry % p != 0:
                    raise GroupMembershipError(f"entry ({i + 1},{j + 1}) is not divisible by p: leaves pro-p Iwahori")
                if i == j and entry % p != 1 % p:
                    raise GroupMembershipError(f"diagonal entry {i + 1} is not 1 mod p: leaves pro-p Iwahori")
        if self.kind == SL and self.det() != 1:
            raise GroupMembershipError("determinant is not 1 mod p^K: leaves pro-p Iwahori")

    def entry(self, i: int, j: int) -> PadicInt:
        """Entry at 1-based position (i, j)"""
        return self.params.element(int(self.entries[i - 1, j - 1]))

    def det(self) -> PadicInt:
        return self.params.element(linalg.determinant(self.entries, self.params.modulus))

    def __matmul__(self, other: 'GroupElement') -> 'GroupElement':
        if other.params != self.params or other.n != self.n:
            raise ParameterMismatch("group elements come from different groups")
        kind = GL if GL in (self.kind, other.kind) else SL
        product = linalg.mat_mul(self.entries, other.entries, self.params.modulus)
        return GroupElement(product, self.params, kind, check=False)

    __mul__ = __matmul__

    def inverse(self) -> 'GroupElement':
        return GroupElement(linalg.inverse(self.entries, self.params.modulus), self.params, self.kind, check=False)

    def congruent(self, other: 'GroupElement', k: int = None) -> bool:
        """Entrywise equality mod p^k (default K)"""
        modulus = self.p ** (self.params.K if k is None else k)
        return bool(np.all((self.entries - other.entries) % modulus == 0))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.n == other.n and self.congruent(other)

    def __hash__(self):
        return hash(tuple(int(x) for x in self.entries.flat))

    def to_json(self) -> Dict:
        return {
            'n': self.n, 'p': self.p, 'K': self.params.K, 'kind': self.kind,
            'entries': [[str(int(x)) for x in row] for row in self.entries],
        }

    def __repr__(self):
        return f"GroupElement({self.entries.tolist()} mod {self.p}^{self.params.K})"


# ==================== GENERATORS ====================

def gen_x(root: Root, t, n: int, params: PadicParams, kind: str = SL) -> GroupElement:
    """x_root(t) = I + t*E_ij"""
    t = _as_padic(t, params)
    if root.is_negative and t.residue % params.p != 0:
        raise GroupMembershipError(f"x_{root}({t.residue}) leaves pro-p Iwahori")
    return GroupElement(linalg.elementary(n, root.i, root.j, t.residue, params.modulus), params, kind, check=False)


def gen_h(delta: Root, lam, n: int, params: PadicParams, kind: str = SL) -> GroupElement:
    """h_delta(lam): lam at (i,i), lam^-1 at (i+1,i+1)"""
    lam = _as_padic(lam, params)
    if not delta.is_simple:
        raise ValueError(f"{delta} is not a simple root")
    if lam.residue % params.p != 1 % params.p:
        raise GroupMembershipError(f"h_{delta}({lam.residue}) needs a unit congruent to 1 mod p")
    entries = [1] * n
    entries[delta.i - 1] = lam.residue
    entries[delta.j - 1] = invert(lam.reduce()).residue
    return GroupElement(linalg.diagonal(entries, params.modulus), params, kind, check=False)


def weyl_element(root: Root, lam: PadicInt, n: int) -> np.ndarray:
    """w_root(lam) = x_root(lam) x_-root(-lam^-1) x_root(lam), as a raw matrix"""
    modulus = lam.params.modulus
    inverse_lam = invert(lam.reduce()).residue
    factors = [
        linalg.elementary(n, root.i, root.j, lam.residue, modulus),
        linalg.elementary(n, root.j, root.i, -inverse_lam, modulus),
        linalg.elementary(n, root.i, root.j, lam.residue, modulus),
    ]
    return linalg.mat_product(factors, n, modulus)


def h_via_weyl(delta: Root, lam, n: int, params: PadicParams) -> np.ndarray:
    """h_delta(lam) computed as w_delta(lam) w_delta(1)^-1"""
    lam = _as_padic(lam, params)
    modulus = params.modulus
    w_lam = weyl_element(delta, lam, n)
    w_one = weyl_element(delta, params.one(), n)
    return linalg.mat_mul(w_lam, linalg.inverse(w_one, modulus), modulus)


def central_z(power, n: int, params: PadicParams, kind: str = GL) -> GroupElement:
    """(1+p)^power * I for the GL variant"""
    if kind != GL:
        raise ParameterMismatch("the central generator exists only for GL")
    scalar = pow_one_plus_p(_as_padic(power, params)).reduce()
    return GroupElement(linalg.diagonal([scalar.residue] * n, params.modulus), params, GL, check=False)


def generator(var: VarId, n: int, params: PadicParams, kind: str = SL) -> GroupElement:
    return generator_power(var, params.element(1), n, params, kind)


def generator_power(var: VarId, z, n: int, params: PadicParams, kind: str = SL) -> GroupElement:
    """g_var^z for a p-adic exponent z"""
    z = _as_padic(z, params)
    if var.kind is VarKind.U:
        return gen_x(var.root, z.residue * params.p, n, params, kind)
    if var.kind is VarKind.V:
        return gen_x(var.root, z.residue, n, params, kind)
    if var.kind is VarKind.W:
        scale = pow_one_plus_p(z).reduce()
        return gen_h(var.root, scale, n, params, kind)
    return central_z(z, n, params, kind)


def _as_padic(value, params: PadicParams) -> PadicInt:
    if isinstance(value, PadicInt):
        return value
    return params.element(int(value))


# ==================== VALUATION ====================

def entry_valuations(g: GroupElement) -> List[List[Valuation]]:
    """Scaled entry valuations: (j-i) + n*val(a_ij) off the diagonal, n*val(a_ii - 1) on it"""
    n, p, K = g.n, g.p, g.params.K
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = int(g.entries[i, j])
            if i == j:
                entry = (entry - 1) % g.params.modulus
            if entry == 0:
                row.append(Valuation.cap(n * K + (j - i if i != j else 0)))
            else:
                offset = (j - i) if i != j else 0
                row.append(Valuation(offset + n * valuation(entry, p, K)))
        table.append(row)
    return table


def omega(g: GroupElement) -> Valuation:
    """n times the p-valuation of g; capped when every component is capped"""
    finite = [v for row in entry_valuations(g) for v in row if not v.capped]
    if not finite:
        return Valuation.cap(g.n * g.params.K)
    return min(finite)


def staged_minimum(g: GroupElement) -> List[Dict]:
    """Running minimum of the entry valuations, taking the k-th diagonal entry,
    then the rest of row k, then the rest of column k"""
    table = entry_valuations(g)
    n = g.n
    stages = []
    current = Valuation.cap(n * g.params.K)
    for k in range(n):
        positions = [(k, k)] + [(k, j) for j in range(k + 1, n)] + [(i, k) for i in range(k + 1, n)]
        for i, j in positions:
            value = table[i][j]
            if not value.capped and (current.capped or value < current):
                current = value
            stages.append({'entry': [i + 1, j + 1], 'value': value.to_json(), 'running_min': current.to_json()})
    return stages


# ==================== ORDERED-BASIS COORDINATES ====================

@dataclass(frozen=True)
class BasisCoordinates:
    """Exponents of the ordered basis, indexed like enumerate_vars

    U, W and central coordinates are known mod p^(K-1), V coordinates mod p^K.
    """
    n: int
    params: PadicParams
    order: str
    kind: str
    coords: Tuple[PadicInt, ...]

    @property
    def variables(self) -> Tuple[VarId, ...]:
        return enumerate_vars(self.n, self.order, self.kind)

    @classmethod
    def from_ints(cls, values: Sequence[int], n: int, params: PadicParams,
                  order: str = HEIGHT_ORDER, kind: str = SL) -> 'BasisCoordinates':
        variables = enumerate_vars(n, order, kind)
        if len(values) != len(variables):
            raise ValueError(f"expected {len(variables)} coordinates, got {len(values)}")
        coords = tuple(params.element(int(x), coordinate_precision(var, params))
                       for var, x in zip(variables, values))
        return cls(n, params, order, kind, coords)

    @classmethod
    def zero(cls, n: int, params: PadicParams, order: str = HEIGHT_ORDER, kind: str = SL) -> 'BasisCoordinates':
        return cls.from_ints([0] * len(enumerate_vars(n, order, kind)), n, params, order, kind)

    def get(self, var: VarId) -> PadicInt:
        return self.coords[var.index - 1]

    def __eq__(self, other):
        if not isinstance(other, BasisCoordinates):
            return NotImplemented
        return (self.n, self.order, self.kind) == (other.n, other.order, other.kind) and \
            all(a == b for a, b in zip(self.coords, other.coords))

    def __hash__(self):
        return hash((self.n, self.order, self.kind, tuple(c.residue for c in self.coords)))

    def to_json(self) -> Dict:
        return {
            'n': self.n, 'p': self.params.p, 'K': self.params.K,
            'order': self.order, 'kind': self.kind,
            'coords': [c.to_json() for c in self.coords],
            'precision': [c.prec for c in self.coords],
        }


def coordinate_precision(var: VarId, params: PadicParams) -> int:
    return params.K if var.kind is VarKind.V else params.K - 1


def compose_from_coords(c: BasisCoordinates) -> GroupElement:
    """Ordered product g_1^{z_1} ... g_d^{z_d}"""
    result = GroupElement.identity(c.n, c.params, c.kind)
    for var, z in zip(c.variables, c.coords):
        if z.is_zero():
            continue
        result = result @ generator_power(var, z, c.n, c.params, c.kind)
    result.kind = c.kind
    return result


def _unipotent_product(roots: List[Root], values: Dict[Root, int], scale: int, n: int, modulus: int) -> np.ndarray:
    factors = [linalg.elementary(n, r.i, r.j, scale * values.get(r, 0), modulus) for r in roots]
    return linalg.mat_product(factors, n, modulus)


def _solve_levels(target: np.ndarray, roots: List[Root], scale: int, n: int, modulus: int) -> Dict[Root, int]:
    """Exponents t_r with prod_r (I + scale*t_r*E_r) = target, solved by |height|

    Entries at level L of the product are scale*t_r plus a polynomial in the
    exponents of strictly lower levels.
    """
    values: Dict[Root, int] = {}
    for level in range(1, n):
        product = _unipotent_product(roots, values, scale, n, modulus)
        for r in roots:
            if abs(r.height) != level:
                continue
            diff = (int(target[r.i - 1, r.j - 1]) - int(product[r.i - 1, r.j - 1])) % modulus
            if diff % scale != 0:
                raise GroupMembershipError(f"entry {r} is not divisible by {scale}: leaves pro-p Iwahori")
            values[r] = diff // scale
    return values


def decompose(g: GroupElement, order: str = HEIGHT_ORDER) -> BasisCoordinates:
    """Unique ordered-basis coordinates of g"""
    params, n, p, K = g.params, g.n, g.p, g.params.K
    modulus = params.modulus
    g.check_membership()
    work = g.entries
    central: Optional[PadicInt] = None
    # GL: strip the central factor so the remainder has determinant 1
    if g.kind == GL:
        log_det = dlog_one_plus_p(g.det())
        central = log_det * invert(params.element(n, log_det.prec)) if log_det.prec > 0 else log_det
        scalar = pow_one_plus_p(-central).reduce()
        work = work * scalar.residue % modulus

    # g = L D U with L, U unipotent
    lower, upper_full = linalg.lu_unipotent(work, modulus)
    diag = [int(upper_full[k, k]) for k in range(n)]
    upper = np.array([[upper_full[i, j] * pow(diag[i], -1, modulus) % modulus for j in range(n)]
                      for i in range(n)], dtype=object)

    # D = h_1(t_1) ... h_{n-1}(t_{n-1}); t_k is a running sum of diagonal logs
    logs = [dlog_one_plus_p(params.element(d)) for d in diag]
    torus: List[PadicInt] = []
    running = params.element(0, K - 1)
    for k in range(n - 1):
        running = running + logs[k]
        torus.append(running)

    # lower entries are multiples of p
    lower_values = _solve_levels(lower, lower_roots(n, order), p, n, modulus)
    upper_values = _solve_levels(upper, upper_roots(n), 1, n, modulus)

    # U digits are one short: the entries were divided by p
    coords: List[PadicInt] = []
    for var in enumerate_vars(n, order, g.kind):
        if var.kind is VarKind.U:
            coords.append(params.element(lower_values[var.root], K - 1))
        elif var.kind is VarKind.W:
            coords.append(torus[var.root.i - 1])
        elif var.kind is VarKind.V:
            coords.append(params.element(upper_values[var.root]))
        else:
            coords.append(central)
    return BasisCoordinates(n, params, order, g.kind, tuple(coords))


def closed_form(c: BasisCoordinates) -> GroupElement:
    """Entries of X Z Y from the explicit row-by-column formulas

    x_ij below the diagonal are the entries of X divided by p, above it the
    entries of Y; x_kk are the torus exponents.
    """
    n, params, p = c.n, c.params, c.params.p
    modulus = params.modulus
    values = {var: c.get(var) for var in c.variables}
    lower = {var.root: values[var].residue for var in c.variables if var.kind is VarKind.U}
    upper = {var.root: values[var].residue for var in c.variables if var.kind is VarKind.V}
    x_matrix = _unipotent_product(lower_roots(n, c.order), lower, p, n, modulus)
    y_matrix = _unipotent_product(upper_roots(n), upper, 1, n, modulus)

    x = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i > j:
                x[i, j] = int(x_matrix[i - 1, j - 1]) // p
            elif i < j:
                x[i, j] = int(y_matrix[i - 1, j - 1])
    diag = [params.element(0, params.K - 1)]
    for var in c.variables:
        if var.kind is VarKind.W:
            diag.append(values[var])
    diag.append(params.element(0, params.K - 1))

    def torus_entry(k: int) -> int:
        return pow_one_plus_p(diag[k] - diag[k - 1]).reduce().residue

    a = np.zeros((n, n), dtype=object)
    a[0, 0] = torus_entry(1)
    for j in range(2, n + 1):
        a[0, j - 1] = torus_entry(1) * x[1, j] % modulus
    for i in range(2, n + 1):
        a[i - 1, 0] = p * x[i, 1] * torus_entry(1) % modulus
    for i in range(2, n + 1):
        for j in range(2, n + 1):
            m = min(i - 1, j - 1)
            total = sum(p * x[i, k] * x[k, j] * torus_entry(k) for k in range(1, m + 1))
            if i > j:
                total += p * x[i, j] * torus_entry(j)
            elif i < j:
                total += x[i, j] * torus_entry(i)
            else:
                total += torus_entry(i)
            a[i - 1, j - 1] = total % modulus

    if c.kind == GL:
        central = values[c.variables[-1]]
        a = a * pow_one_plus_p(central).reduce().residue % modulus
    return GroupElement(a, params, c.kind, check=False)


def coordinate_terms(c: BasisCoordinates) -> List[Dict]:
    """Per-generator contributions weight + n*val(z) to the min formula"""
    terms = []
    for var, z in zip(c.variables, c.coords):
        v = z.val()
        term = Valuation.cap(c.n * c.params.K) if v.capped else Valuation(var.weight + c.n * v.value)
        terms.append({'var': var.tag, 'weight': var.weight, 'val': v.to_json(), 'term': term})
    return terms


def omega_via_min(c: BasisCoordinates) -> Valuation:
    """min over generators of (scaled weight + n*val(z_i))"""
    finite = [t['term'] for t in coordinate_terms(c) if not t['term'].capped]
    if not finite:
        return Valuation.cap(c.n * c.params.K)
    return min(finite)


# ==================== SAMPLING ====================

def random_coords(n: int, params: PadicParams, rng: random.Random, order: str = HEIGHT_ORDER,
                  kind: str = SL, max_depth: int = 2, zero_rate: float = 0.2) -> BasisCoordinates:
    """Coordinates p^v * u with v <= max_depth, some of them zero"""
    values = []
    for var in enumerate_vars(n, order, kind):
        prec = coordinate_precision(var, params)
        if rng.random() < zero_rate or prec == 0:
            values.append(0)
            continue
        depth = rng.randint(0, min(max_depth, prec - 1))
        unit = rng.randrange(1, params.p ** (prec - depth))
        while unit % params.p == 0:
            unit = rng.randrange(1, params.p ** (prec - depth))
        values.append(params.p ** depth * unit)
    return BasisCoordinates.from_ints(values, n, params, order, kind)


def random_element(n: int, params: PadicParams, rng: random.Random, kind: str = SL) -> GroupElement:
    return compose_from_coords(random_coords(n, params, rng, kind=kind))
