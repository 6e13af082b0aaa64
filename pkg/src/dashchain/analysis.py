"""Exact controllability/observability decisions for the chain.

For a single-input single-output system ``(F, g, h)`` the pair is jointly
reachable and observable exactly when ``det(zI - F)`` and
``h adj(zI - F) g`` share no root, i.e. when their gcd is constant.
For continuous-time LTI systems reachability and controllability coincide,
as do observability and reconstructibility, so one boolean covers all four
notions.

The Kalman rank tests here run their own Gaussian elimination over
``Fraction`` and share nothing with :mod:`dashchain.poly_engine`, so
agreement between the two is a genuine cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .chain_model import ChainSpec, StateSpaceModel, assemble_state_space, validate_spec
from .errors import (
    DashchainError,
    DerivedStiffnessNonPositive,
    OracleDimensionExceeded,
    SearchExhausted,
)
from .poly_engine import (
    DEFAULT_ORACLE_CAP,
    adjoint_poly_closed_form,
    char_poly_recursive,
)
from .polynomial import RationalLike, RationalPoly, format_fraction, poly_gcd, to_fraction


@dataclass(frozen=True)
class Verdict:
    """Decision plus the evidence behind it.

    ``kalman_control_rank``/``kalman_observe_rank`` are ``None`` when the
    model exceeds the rank-oracle cap.
    """

    n: int
    controllable_observable: bool
    char_poly: RationalPoly
    adjoint_poly: RationalPoly
    gcd: RationalPoly
    common_roots: tuple
    proportionality_holds: bool
    kalman_control_rank: Optional[int]
    kalman_observe_rank: Optional[int]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "controllable_observable": self.controllable_observable,
            "proportional": self.proportionality_holds,
            "char_poly": str(self.char_poly),
            "adjoint_poly": str(self.adjoint_poly),
            "gcd": str(self.gcd),
            "common_roots": [format_fraction(r) for r in self.common_roots],
            "kalman_ranks": {
                "control": self.kalman_control_rank,
                "observe": self.kalman_observe_rank,
            },
        }


def proportionality_check(spec: ChainSpec) -> bool:
    """True iff every ``c_i/k_i`` is the same rational (``0`` allowed)."""
    spec = validate_spec(spec)
    ratios = {c / k for k, c in zip(spec.stiffness, spec.damping)}
    return len(ratios) <= 1


def proportionality_residuals(spec: ChainSpec) -> dict:
    """``beta_ij = k_i - k_j c_i / c_j`` for all ordered pairs with ``c_j > 0``."""
    spec = validate_spec(spec)
    k, c = spec.stiffness, spec.damping
    out = {}
    for i, j in itertools.permutations(range(len(k)), 2):
        if c[j] != 0:
            out[(i + 1, j + 1)] = k[i] - k[j] * c[i] / c[j]
    return out


# -- Kalman rank oracles --------------------------------------------------

def _rank_exact(rows) -> int:
    a = [list(r) for r in rows]
    if not a:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank = 0
    for col in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, n_rows):
            f = a[i][col]
            if f:
                f = f / p
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def _matvec(m, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in m]


def _vecmat(v, m):
    n = len(m)
    return [sum((v[i] * m[i][j] for i in range(n)), Fraction(0)) for j in range(n)]


def controllability_matrix(model: StateSpaceModel) -> list:
    """Columns ``g, Fg, ..., F^(2N-1) g``, returned as a list of those columns."""
    cols, v = [], list(model.g_vector)
    for _ in range(model.dim):
        cols.append(v)
        v = _matvec(model.f_matrix, v)
    return cols


def observability_matrix(model: StateSpaceModel) -> list:
    """Rows ``h, hF, ..., h F^(2N-1)``."""
    return _observability_rows(model.f_matrix, model.h_vector)


def _observability_rows(f_matrix, h_vector) -> list:
    rows, v = [], [to_fraction(x) for x in h_vector]
    f = [[to_fraction(x) for x in row] for row in f_matrix]
    for _ in range(len(f)):
        rows.append(v)
        v = _vecmat(v, f)
    return rows


def observability_rank_of(f_matrix, h_vector) -> int:
    """Exact observability rank of an arbitrary rational pair ``(F, h)``.

    Float entries are read as the decimals they print as.
    """
    return _rank_exact(_observability_rows(f_matrix, h_vector))


def kalman_controllability_rank(model: StateSpaceModel, cap: int = DEFAULT_ORACLE_CAP) -> int:
    """Exact rank of ``[g, Fg, ..., F^(2N-1) g]``."""
    if model.dim > cap:
        raise OracleDimensionExceeded(f"dimension {model.dim} exceeds oracle cap {cap}")
    # rank(A) == rank(A^T), so eliminate on the list of columns directly
    return _rank_exact(controllability_matrix(model))


def kalman_observability_rank(model: StateSpaceModel, cap: int = DEFAULT_ORACLE_CAP) -> int:
    """Exact rank of ``[h; hF; ...; h F^(2N-1)]``."""
    if model.dim > cap:
        raise OracleDimensionExceeded(f"dimension {model.dim} exceeds oracle cap {cap}")
    return _rank_exact(observability_matrix(model))


# -- decision -------------------------------------------------------------

def _common_roots(gcd: RationalPoly, candidates: Sequence[Fraction]) -> tuple:
    """Roots of ``gcd`` with multiplicity, drawn from the adjoint's roots.

    Every root of the gcd is a root of the adjoint polynomial, whose roots
    are the rationals ``-k_i/c_i``; dividing them out must leave a constant.
    """
    rest = gcd
    roots = []
    for r in sorted(set(candidates)):
        lin = RationalPoly([-r, 1])
        while rest.degree >= 1:
            q, rem = rest.divmod(lin)
            if not rem.is_zero():
                break
            roots.append(r)
            rest = q
    if rest.degree != 0:
        raise DashchainError(f"gcd {gcd} has roots outside the adjoint's rational roots")
    return tuple(roots)


def decide(spec: ChainSpec, *, rank_cap: int = DEFAULT_ORACLE_CAP) -> Verdict:
    """Decide joint reachability/observability and collect the evidence.

    The decision comes from the gcd of the characteristic and adjoint
    polynomials. When the model fits under ``rank_cap`` both Kalman ranks
    are computed as well and must agree with it; disagreement raises
    :class:`DashchainError` since it can only mean a bug.
    """
    spec = validate_spec(spec)
    n = spec.n_masses
    p = char_poly_recursive(spec)
    fact = adjoint_poly_closed_form(spec)
    adj = fact.expand()
    g = poly_gcd(p, adj)
    ok = g.degree == 0
    roots = _common_roots(g, fact.roots)
    ctrl_rank = obs_rank = None
    if 2 * n <= rank_cap:
        model = assemble_state_space(spec)
        ctrl_rank = kalman_controllability_rank(model, rank_cap)
        obs_rank = kalman_observability_rank(model, rank_cap)
        if ok != (ctrl_rank == 2 * n and obs_rank == 2 * n):
            raise DashchainError(
                f"oracle disagreement: gcd={g}, ranks=({ctrl_rank}, {obs_rank}) for {spec}")
    return Verdict(n, ok, p, adj, g, roots, proportionality_check(spec), ctrl_rank, obs_rank)


# -- constructed families for N = 3 ----------------------------------------

@dataclass(frozen=True)
class CounterexampleN3:
    """Three-mass chain whose first adjoint root is also a characteristic root."""

    masses: tuple
    k1: Fraction
    k2: Fraction
    c1: Fraction
    c2: Fraction
    common_root: Fraction
    h_sum: Fraction

    @property
    def spec(self) -> ChainSpec:
        return ChainSpec(self.masses, (self.k1, self.k2), (self.c1, self.c2))


def make_counterexample_n3(m: Sequence[RationalLike], k1: RationalLike, c1: RationalLike,
                           c2: RationalLike) -> CounterexampleN3:
    """Choose ``k2`` so that ``z1 = -k1/c1`` is a common root.

    At ``z1`` the first link factor vanishes and
    ``P_3(z1) = z1^4 (z1^2 + b_2(z1) H)`` with ``H = 1/m2 + 1/m3``;
    requiring the bracket to vanish is linear in ``k2``::

        k2 = (k1/c1) c2 - k1^2 / (c1^2 H)
    """
    masses = tuple(to_fraction(x) for x in m)
    k1, c1, c2 = to_fraction(k1), to_fraction(c1), to_fraction(c2)
    if len(masses) != 3:
        raise ValueError("exactly three masses required")
    if any(x <= 0 for x in masses) or k1 <= 0 or c1 <= 0 or c2 < 0:
        raise ValueError("need masses > 0, k1 > 0, c1 > 0, c2 >= 0")
    H = 1 / masses[1] + 1 / masses[2]
    k2 = k1 / c1 * c2 - k1 * k1 / (c1 * c1 * H)
    if k2 <= 0:
        raise DerivedStiffnessNonPositive(
            f"derived k2 = {format_fraction(k2)} <= 0; increase c2 or decrease k1/c1")
    return CounterexampleN3(masses, k1, k2, c1, c2, -k1 / c1, H)


def root_condition_values(spec: ChainSpec) -> tuple:
    """Closed forms of ``P_3`` at the two adjoint roots of a 3-mass chain.

    Returns ``(P3(z1), P3(z2))`` computed as::

        (k1/c1)^4 [k1^2/c1^2 + (k2 - (k1/c1) c2) (1/m2 + 1/m3)]
        (k2/c2)^4 [k2^2/c2^2 + (k1 - (k2/c2) c1) (1/m1 + 1/m2)]

    Both dashpots must be present.
    """
    spec = validate_spec(spec)
    if spec.n_masses != 3:
        raise ValueError("three-mass chains only")
    (m1, m2, m3), (k1, k2), (c1, c2) = spec.masses, spec.stiffness, spec.damping
    if c1 == 0 or c2 == 0:
        raise ValueError("both dashpots must be present")
    h23 = 1 / m2 + 1 / m3
    h12 = 1 / m1 + 1 / m2
    v1 = (k1 / c1) ** 4 * ((k1 / c1) ** 2 + (k2 - k1 / c1 * c2) * h23)
    v2 = (k2 / c2) ** 4 * ((k2 / c2) ** 2 + (k1 - k2 / c2 * c1) * h12)
    return v1, v2


def _candidate_values(bound: int) -> list:
    vals = []
    for q in range(1, bound + 1):
        for p in range(1, bound + 1):
            f = Fraction(p, q)
            if f.denominator == q:
                vals.append(f)
    return vals


def make_controllable_nonproportional_n3(m: Sequence[RationalLike], c1: RationalLike,
                                         c2: RationalLike, *, bound: int = 12) -> ChainSpec:
    """Find stiffnesses making a non-proportional yet controllable 3-chain.

    Candidates ``(k1, k2)`` are small rationals (numerator and denominator
    up to ``bound``), integers first, walked in order of combined index.
    Each non-proportional candidate is accepted only after the exact gcd
    decision says the polynomials are coprime.
    """
    masses = tuple(to_fraction(x) for x in m)
    c1, c2 = to_fraction(c1), to_fraction(c2)
    if len(masses) != 3 or any(x <= 0 for x in masses) or c1 <= 0 or c2 <= 0:
        raise ValueError("need three positive masses and c1, c2 > 0")
    vals = _candidate_values(bound)
    n = len(vals)
    for total in range(2 * n - 1):
        for i in range(max(0, total - n + 1), min(total, n - 1) + 1):
            k1, k2 = vals[i], vals[total - i]
            if c1 / k1 == c2 / k2:
                continue
            spec = ChainSpec(masses, (k1, k2), (c1, c2))
            if decide(spec).controllable_observable:
                return spec
    raise SearchExhausted(f"no controllable non-proportional (k1, k2) with entries up to {bound}")
