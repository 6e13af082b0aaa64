"""Chain parameters and the exact first-order realization.

A chain of ``N`` point masses ``m_1..m_N`` is linked consecutively by springs
``k_1..k_{N-1}`` and dashpots ``c_1..c_{N-1}``; nothing is attached to a wall.
The control is a force on mass 1, the output is the position of mass N.
With ``z = (x_1..x_N, v_1..v_N)`` the motion is ``z' = F z + g u``,
``y = h z`` where::

    F = [[0, I], [-K, -C]],   K = X(k),  C = X(c)

and ``X`` is the mass-scaled path Laplacian built by
:func:`build_coupling_matrix`. Everything here is exact (``Fraction``);
floats appear only through :meth:`StateSpaceModel.to_numpy`.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    ChainSpecError,
    LengthMismatch,
    NegativeDamping,
    NonPositiveMass,
    NonPositiveStiffness,
    TooFewMasses,
)
from .polynomial import RationalLike, to_fraction

Matrix = tuple  # tuple of row tuples of Fraction


@dataclass(frozen=True)
class ChainSpec:
    """Validated physical parameters of a dashpot-spring-mass chain.

    Parameters
    ----------
    masses : sequence of rationals
        ``m_1..m_N``, all strictly positive.
    stiffness : sequence of rationals
        ``k_1..k_{N-1}``, all strictly positive.
    damping : sequence of rationals
        ``c_1..c_{N-1}``, all non-negative (zero gives a pure spring link).
    """

    masses: tuple
    stiffness: tuple
    damping: tuple

    def __post_init__(self):
        for name in ("masses", "stiffness", "damping"):
            object.__setattr__(self, name, tuple(to_fraction(v) for v in getattr(self, name)))
        n = len(self.masses)
        if n < 2:
            raise TooFewMasses(f"need at least 2 masses, got {n}")
        if len(self.stiffness) != n - 1:
            raise LengthMismatch(f"expected {n - 1} stiffness values, got {len(self.stiffness)}")
        if len(self.damping) != n - 1:
            raise LengthMismatch(f"expected {n - 1} damping values, got {len(self.damping)}")
        for i, m in enumerate(self.masses, 1):
            if m <= 0:
                raise NonPositiveMass(f"m_{i} = {m} must be > 0")
        for i, k in enumerate(self.stiffness, 1):
            if k <= 0:
                raise NonPositiveStiffness(f"k_{i} = {k} must be > 0")
        for i, c in enumerate(self.damping, 1):
            if c < 0:
                raise NegativeDamping(f"c_{i} = {c} must be >= 0")

    @property
    def n_masses(self) -> int:
        return len(self.masses)

    def to_dict(self) -> dict:
        """JSON-ready form with every value as a ``p/q`` string."""
        from .polynomial import format_fraction

        return {
            "masses": [format_fraction(v) for v in self.masses],
            "stiffness": [format_fraction(v) for v in self.stiffness],
            "damping": [format_fraction(v) for v in self.damping],
        }


def validate_spec(raw) -> ChainSpec:
    """Build a :class:`ChainSpec` from a mapping (or pass one through).

    ``raw`` needs the keys ``masses``, ``stiffness`` and ``damping``; values
    may be ints, ``Fraction``, decimal/``p/q`` strings or floats. An optional
    ``natural_lengths`` entry is accepted and ignored with a warning, since
    the model works in displacement coordinates; other extra keys are
    ignored silently. The input is not modified.
    """
    if isinstance(raw, ChainSpec):
        return raw
    if not isinstance(raw, Mapping):
        raise TypeError(f"expected a mapping of chain parameters, got {type(raw).__name__}")
    missing = [k for k in ("masses", "stiffness", "damping") if k not in raw]
    if missing:
        raise LengthMismatch(f"missing keys: {', '.join(missing)}")
    if "natural_lengths" in raw:
        warnings.warn("natural_lengths ignored: the model uses displacements from equilibrium",
                      stacklevel=2)
    try:
        return ChainSpec(tuple(raw["masses"]), tuple(raw["stiffness"]), tuple(raw["damping"]))
    except ChainSpecError:
        raise
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ChainSpecError(f"unparseable chain parameter: {exc}") from exc


def load_spec(path) -> ChainSpec:
    """Read a chain spec from a ``.json`` or ``.toml`` file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        raw = tomllib.loads(text)
    else:
        # keep decimals exact instead of going through binary floats
        raw = json.loads(text, parse_float=str)
    return validate_spec(raw)


def build_coupling_matrix(values: Sequence[RationalLike], masses: Sequence[RationalLike]) -> Matrix:
    """Tridiagonal mass-scaled coupling matrix for a free-free chain.

    Row ``i`` holds the forces on mass ``i`` divided by ``m_i``::

        X[i][i-1] = -x_{i-1}/m_i
        X[i][i]   = (x_{i-1} + x_i)/m_i
        X[i][i+1] = -x_i/m_i

    with the missing neighbour terms dropped at both ends. Feeding spring
    constants gives ``K``, feeding dashpot constants gives ``C``.
    """
    vals = [to_fraction(v) for v in values]
    ms = [to_fraction(m) for m in masses]
    n = len(ms)
    if len(vals) != n - 1:
        raise LengthMismatch(f"{n} masses need {n - 1} coupling values, got {len(vals)}")
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i, x in enumerate(vals):
        # link i joins masses i and i+1 (0-based)
        rows[i][i] += x / ms[i]
        rows[i][i + 1] -= x / ms[i]
        rows[i + 1][i] -= x / ms[i + 1]
        rows[i + 1][i + 1] += x / ms[i + 1]
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class StateSpaceModel:
    """Exact single-input single-output realization ``(F, g, h)`` of a chain.

    The direct-transmission term is identically zero and is not stored.
    """

    spec: ChainSpec
    f_matrix: Matrix
    g_vector: tuple
    h_vector: tuple
    k_matrix: Matrix = field(repr=False)
    c_matrix: Matrix = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.g_vector)

    @property
    def n_masses(self) -> int:
        return self.spec.n_masses

    def to_numpy(self):
        """Float copies ``(F, g, h)`` with ``g`` and ``h`` as 1-D arrays."""
        F = np.array([[float(x) for x in row] for row in self.f_matrix])
        g = np.array([float(x) for x in self.g_vector])
        h = np.array([float(x) for x in self.h_vector])
        return F, g, h

    def apply(self, state: Sequence[RationalLike]) -> tuple:
        """Exact ``F @ state``."""
        s = [to_fraction(x) for x in state]
        return tuple(sum((a * b for a, b in zip(row, s)), Fraction(0)) for row in self.f_matrix)


def assemble_state_space(spec: ChainSpec) -> StateSpaceModel:
    """Assemble ``F = [[0, I], [-K, -C]]``, ``g = e_{N+1}/m_1``, ``h = e_N``."""
    spec = validate_spec(spec)
    n = spec.n_masses
    K = build_coupling_matrix(spec.stiffness, spec.masses)
    C = build_coupling_matrix(spec.damping, spec.masses)
    zero = Fraction(0)
    rows = []
    for i in range(n):
        rows.append(tuple([zero] * n + [Fraction(int(i == j)) for j in range(n)]))
    for i in range(n):
        rows.append(tuple([-K[i][j] for j in range(n)] + [-C[i][j] for j in range(n)]))
    g = [zero] * (2 * n)
    g[n] = 1 / spec.masses[0]
    h = [zero] * (2 * n)
    h[n - 1] = Fraction(1)
    return StateSpaceModel(spec, tuple(rows), tuple(g), tuple(h), K, C)


# -- random specs for property sweeps ------------------------------------

def _rand_positive(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(1, bound), rng.randint(1, bound))


def random_spec(rng: random.Random, n: int, *, bound: int = 12,
                zero_damping_prob: float = 0.1,
                ratio: Optional[RationalLike] = None) -> ChainSpec:
    """Draw a chain with small-integer rational parameters.

    Numerators and denominators are uniform on ``1..bound``. Each dashpot
    is dropped (``c_i = 0``) with probability ``zero_damping_prob``. If
    ``ratio`` is given, damping is ``ratio * k_i`` for every link instead.
    """
    masses = [_rand_positive(rng, bound) for _ in range(n)]
    stiffness = [_rand_positive(rng, bound) for _ in range(n - 1)]
    if ratio is not None:
        lam = to_fraction(ratio)
        damping = [lam * k for k in stiffness]
    else:
        damping = [Fraction(0) if rng.random() < zero_damping_prob else _rand_positive(rng, bound)
                   for _ in range(n - 1)]
    return ChainSpec(tuple(masses), tuple(stiffness), tuple(damping))
