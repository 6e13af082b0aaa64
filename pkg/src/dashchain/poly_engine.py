"""Characteristic and adjoint polynomials of the chain, with exact oracles.

Two constructions come with independent checks:

* ``P_N(z) = det(zI - F)`` from the three-term recursion
  (:func:`char_poly_recursive`), checked by a fraction-free determinant
  over Q[z] (:func:`char_poly_det_oracle`) and by a combinatorial
  coefficient expansion (:func:`coefficient_expansion_check`);
* the transfer numerator ``h adj(zI - F) g`` in closed product form
  (:func:`adjoint_poly_closed_form`), checked by the signed cofactor
  (:func:`adjoint_cofactor_oracle`).

With ``b_i(z) = k_i + z c_i`` the recursion is::

    P_1 = z^2,  D_0 = 1
    D_n = P_n + (b_n / m_n) D_{n-1}
    P_n = (z^2 + b_{n-1}/m_n) P_{n-1} + z^2 (b_{n-1}/m_{n-1}) D_{n-2}

``D_n`` is the determinant of the first ``n`` masses' block of
``z^2 I + zC + K`` for a longer chain, i.e. with link ``n`` still
loading mass ``n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence

from .chain_model import ChainSpec, StateSpaceModel, validate_spec
from .errors import OracleDimensionExceeded
from .polynomial import RationalPoly, format_fraction, format_poly, product

DEFAULT_ORACLE_CAP = 16
EXPANSION_MAX_N = 4

Z = RationalPoly([0, 1])
Z2 = RationalPoly([0, 0, 1])
ONE = RationalPoly([1])


def link_poly(spec: ChainSpec, i: int) -> RationalPoly:
    """``b_i(z) = k_i + z c_i`` for link ``i`` (1-based)."""
    return RationalPoly([spec.stiffness[i - 1], spec.damping[i - 1]])


# -- characteristic polynomial --------------------------------------------

@dataclass(frozen=True)
class RecursionState:
    """One level of the recursion: ``P_level`` and ``D_{level-1}``."""

    p_current: RationalPoly
    d_previous: RationalPoly
    level: int


def recursion_states(spec: ChainSpec) -> Iterator[RecursionState]:
    """Yield the recursion state for levels ``1..N``."""
    spec = validate_spec(spec)
    m = (None,) + spec.masses  # 1-based
    p_prev, d_prevprev = None, None
    p, d_prev = Z2, ONE  # P_1, D_0
    yield RecursionState(p, d_prev, 1)
    for n in range(2, spec.n_masses + 1):
        b = link_poly(spec, n - 1)
        d_curr = p + b * (1 / m[n - 1]) * d_prev  # D_{n-1}
        p_prev, d_prevprev = p, d_prev
        p = (Z2 + b * (1 / m[n])) * p_prev + Z2 * b * (1 / m[n - 1]) * d_prevprev
        d_prev = d_curr
        yield RecursionState(p, d_prev, n)


def char_poly_recursive(spec: ChainSpec) -> RationalPoly:
    """``P_N(z)`` via the three-term recursion; monic of degree ``2N``."""
    state = None
    for state in recursion_states(spec):
        pass
    return state.p_current


def _check_cap(dim: int, cap: int, what: str):
    if dim > cap:
        raise OracleDimensionExceeded(f"{what}: dimension {dim} exceeds oracle cap {cap}")


def poly_matrix_det(rows: Sequence[Sequence[RationalPoly]]) -> RationalPoly:
    """Determinant of a square matrix over Q[z] by Bareiss elimination.

    Every division in the elimination is exact in the polynomial ring, so
    entries stay polynomials throughout.
    """
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return ONE
    if any(len(r) != n for r in a):
        raise ValueError("matrix is not square")
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return RationalPoly()
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = pivot * a[i][j] - aik * a[k][j]
                a[i][j] = num.exact_div(prev) if prev != ONE else num
            a[i][k] = RationalPoly()
        prev = pivot
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def resolvent_matrix(model: StateSpaceModel) -> List[List[RationalPoly]]:
    """``zI - F`` as a matrix of polynomials."""
    n = model.dim
    out = []
    for i, row in enumerate(model.f_matrix):
        out.append([RationalPoly([-row[j], 1]) if i == j else RationalPoly([-row[j]])
                    for j in range(n)])
    return out


def char_poly_det_oracle(model: StateSpaceModel, cap: int = DEFAULT_ORACLE_CAP) -> RationalPoly:
    """``det(zI - F)`` by fraction-free elimination over Q[z]."""
    _check_cap(model.dim, cap, "char_poly_det_oracle")
    return poly_matrix_det(resolvent_matrix(model))


# -- adjoint polynomial ---------------------------------------------------

@dataclass(frozen=True)
class AdjointFactorization:
    """``h adj(zI - F) g = scale * prod_i (k_i + z c_i)``.

    ``roots`` lists ``-k_i/c_i`` for every link with ``c_i > 0``, repeats
    kept; links with ``c_i = 0`` contribute the nonzero constant ``k_i``.
    """

    scale: Fraction
    linear_factors: tuple  # ((k_i, c_i), ...)
    roots: tuple

    def factor_polys(self) -> list:
        return [RationalPoly([k, c]) for k, c in self.linear_factors]

    def expand(self) -> RationalPoly:
        return product(self.factor_polys()) * self.scale

    @property
    def degree(self) -> int:
        return sum(1 for _, c in self.linear_factors if c != 0)

    def __str__(self):
        factors = "".join(f"({format_poly(p)})" for p in self.factor_polys())
        return f"{format_fraction(self.scale)}*{factors}" if factors else format_fraction(self.scale)


def adjoint_poly_closed_form(spec: ChainSpec) -> AdjointFactorization:
    """Closed product form of the transfer numerator."""
    spec = validate_spec(spec)
    scale = Fraction(1)
    for m in spec.masses:
        scale /= m
    factors = tuple(zip(spec.stiffness, spec.damping))
    roots = tuple(-k / c for k, c in factors if c > 0)
    return AdjointFactorization(scale, factors, roots)


def adjoint_cofactor_oracle(model: StateSpaceModel, cap: int = DEFAULT_ORACLE_CAP) -> RationalPoly:
    """``h adj(zI - F) g`` from the one cofactor it selects.

    ``h = e_N`` and ``g = e_{N+1}/m_1`` pick entry ``(N, N+1)`` of the
    adjugate, which is ``(-1)^{2N+1}`` times the minor with row ``N+1`` and
    column ``N`` deleted.
    """
    _check_cap(model.dim, cap, "adjoint_cofactor_oracle")
    n = model.n_masses
    a = resolvent_matrix(model)
    # 0-based: drop row n (the (N+1)th) and column n-1 (the Nth)
    minor = [[a[i][j] for j in range(model.dim) if j != n - 1] for i in range(model.dim) if i != n]
    return -poly_matrix_det(minor) * model.g_vector[n]


# -- coefficient expansion ------------------------------------------------

def _components(n: int, edges) -> list:
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        parent[find(e)] = find(e + 1)
    groups = {}
    for v in range(1, n + 1):
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


def _forest_ok(n: int, edges, masses_used) -> bool:
    # every component of the link subgraph keeps exactly one mass outside t
    for comp in _components(n, edges):
        if len(comp - set(masses_used)) != 1:
            return False
    return True


def coefficient_expansion_check(spec: ChainSpec, *, literal: bool = False,
                                max_n: int = EXPANSION_MAX_N) -> RationalPoly:
    """``P_N`` as an explicit sum over spring, dashpot and mass index sets.

    The coefficient of ``z^(2N - rho)`` collects, over ``2M + R = rho``,
    the terms ``k_r1..k_rM c_s1..c_sR / (m_t1..m_t(M+R))``.

    By default the index sets are restricted the way the determinant
    requires: spring links ``r`` and dashpot links ``s`` are disjoint, and
    the masses ``t`` leave exactly one mass uncovered in every connected
    piece of the chain cut down to links ``r`` and ``s``. With
    ``literal=True`` the three index sets range independently over all
    increasing tuples, which over-counts for ``N >= 3``; that variant is
    kept to document the discrepancy.
    """
    spec = validate_spec(spec)
    n = spec.n_masses
    if n > max_n:
        raise OracleDimensionExceeded(f"expansion limited to N <= {max_n}, got N = {n}")
    k = (None,) + spec.stiffness
    c = (None,) + spec.damping
    m = (None,) + spec.masses
    links = range(1, n)
    coeffs = [Fraction(0)] * (2 * n + 1)
    for rho in range(0, 2 * n - 1):
        total = Fraction(0)
        for M in range(0, rho // 2 + 1):
            R = rho - 2 * M
            if M + R > n:
                continue
            for r in itertools.combinations(links, M):
                for s in itertools.combinations(links, R):
                    if not literal and set(r) & set(s):
                        continue
                    num = Fraction(1)
                    for i in r:
                        num *= k[i]
                    for i in s:
                        num *= c[i]
                    if num == 0:
                        continue
                    for t in itertools.combinations(range(1, n + 1), M + R):
                        if not literal and not _forest_ok(n, r + s, t):
                            continue
                        den = Fraction(1)
                        for i in t:
                            den *= m[i]
                        total += num / den
        coeffs[2 * n - rho] += total
    return RationalPoly(coeffs)
