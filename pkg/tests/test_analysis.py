import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SEED, chain_specs, positive_rationals
from dashchain.analysis import (
    controllability_matrix,
    decide,
    kalman_controllability_rank,
    kalman_observability_rank,
    make_controllable_nonproportional_n3,
    make_counterexample_n3,
    observability_matrix,
    proportionality_check,
    proportionality_residuals,
)
from dashchain.chain_model import ChainSpec, assemble_state_space, random_spec
from dashchain.errors import DerivedStiffnessNonPositive, OracleDimensionExceeded
from dashchain.poly_engine import char_poly_recursive
from dashchain.polynomial import RationalPoly, poly_eval, poly_gcd

F = Fraction


def _sympy_rank(rows):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows]).rank()


def test_unit_n2_verdict():
    v = decide(ChainSpec((1, 1), (1,), (1,)))
    assert v.controllable_observable
    assert v.gcd == RationalPoly([1])
    assert (v.kalman_control_rank, v.kalman_observe_rank) == (4, 4)
    assert v.common_roots == ()


def test_undamped_n2_full_rank():
    model = assemble_state_space(ChainSpec((1, 1), (1,), (0,)))
    assert kalman_controllability_rank(model) == 4
    assert kalman_observability_rank(model) == 4


def test_n5_proportional_verdict():
    v = decide(ChainSpec((1, 3, F(1, 2), 2, 5), (1, 2, 3, 4), (2, 4, 6, 8)))
    assert v.controllable_observable and v.proportionality_holds
    assert v.kalman_control_rank == v.kalman_observe_rank == 10


def test_n3_unit_observability():
    model = assemble_state_space(ChainSpec((1, 1, 1), (1, 1), (1, 1)))
    assert kalman_observability_rank(model) == 6


@pytest.mark.parametrize("k, c, expected", [
    ((1, 2, 4), (3, 6, 12), True),
    ((1, 1), (1, 2), False),
    ((1, 1), (0, 0), True),
    ((1, 1), (0, 1), False),
])
def test_proportionality_check(k, c, expected):
    spec = ChainSpec((1,) * (len(k) + 1), k, c)
    assert proportionality_check(spec) is expected


def test_proportionality_residuals_vanish_iff_proportional():
    assert all(r == 0 for r in proportionality_residuals(ChainSpec((1, 1, 1), (1, 2), (3, 6))).values())
    assert any(r != 0 for r in proportionality_residuals(ChainSpec((1, 1, 1), (1, 1), (1, 2))).values())


def test_rank_oracle_cap():
    model = assemble_state_space(ChainSpec((1,) * 4, (1,) * 3, (1,) * 3))
    with pytest.raises(OracleDimensionExceeded):
        kalman_controllability_rank(model, cap=6)


def test_rank_matches_sympy():
    gen = random.Random(SEED)
    for n in (2, 3, 4):
        model = assemble_state_space(random_spec(gen, n, bound=6))
        assert kalman_controllability_rank(model) == _sympy_rank(controllability_matrix(model))


def test_cross_oracle_random_specs():
    gen = random.Random(SEED)
    for i in range(210):
        n = 2 + i % 5
        v = decide(random_spec(gen, n, zero_damping_prob=0.2))
        full = v.kalman_control_rank == 2 * n and v.kalman_observe_rank == 2 * n
        assert v.controllable_observable == full
        assert v.controllable_observable == (v.gcd.degree == 0)
        if v.proportionality_holds:
            assert v.controllable_observable


# -- counterexample family --------------------------------------------------

def test_counterexample_unit():
    ce = make_counterexample_n3((1, 1, 1), 1, 1, 1)
    assert ce.k2 == F(1, 2)
    assert ce.common_root == -1 and ce.h_sum == 2
    p = char_poly_recursive(ce.spec)
    assert poly_eval(p, -1) == 0
    v = decide(ce.spec)
    assert not v.controllable_observable
    assert v.gcd == RationalPoly([1, 1])
    assert v.common_roots == (-1,)
    assert not v.proportionality_holds


def test_counterexample_negative_stiffness():
    with pytest.raises(DerivedStiffnessNonPositive):
        make_counterexample_n3((1, 1, 1), 1, 1, F(1, 4))


@settings(max_examples=80, deadline=None)
@given(st.lists(positive_rationals(8), min_size=3, max_size=3), positive_rationals(8),
       positive_rationals(8), positive_rationals(8))
def test_counterexample_soundness(m, k1, c1, c2):
    try:
        ce = make_counterexample_n3(m, k1, c1, c2)
    except DerivedStiffnessNonPositive:
        return
    H = 1 / ce.masses[1] + 1 / ce.masses[2]
    assert k1 ** 2 / c1 ** 2 + (ce.k2 - k1 / c1 * c2) * H == 0
    v = decide(ce.spec)
    assert v.gcd.degree >= 1 and ce.common_root in v.common_roots
    assert not v.proportionality_holds
    # the shared root is a mode the input cannot reach
    assert v.kalman_control_rank < 6
    model = assemble_state_space(ce.spec)
    assert v.kalman_control_rank == _sympy_rank(controllability_matrix(model))


def test_counterexample_observability_rank_recorded():
    # independent rank computation; the shared mode stays visible at the output
    model = assemble_state_space(make_counterexample_n3((1, 1, 1), 1, 1, 1).spec)
    assert _sympy_rank(observability_matrix(model)) == kalman_observability_rank(model) == 6
    assert kalman_controllability_rank(model) == 5


# -- non-proportional controllable family ------------------------------------

def test_nonproportional_unit():
    spec = make_controllable_nonproportional_n3((1, 1, 1), 1, 1)
    assert spec.stiffness == (1, 2)
    v = decide(spec)
    assert v.controllable_observable and not v.proportionality_holds
    assert poly_gcd(char_poly_recursive(spec), RationalPoly([2, 3, 1])) == RationalPoly([1])


@settings(max_examples=30, deadline=None)
@given(st.lists(positive_rationals(6), min_size=3, max_size=3), positive_rationals(6), positive_rationals(6))
def test_nonproportional_postconditions(m, c1, c2):
    spec = make_controllable_nonproportional_n3(m, c1, c2)
    v = decide(spec)
    assert v.controllable_observable and not proportionality_check(spec)
    (k1, k2) = spec.stiffness
    p = char_poly_recursive(spec)
    assert poly_eval(p, -k1 / c1) != 0 and poly_eval(p, -k2 / c2) != 0


# -- verdict properties --------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(chain_specs(min_n=2, max_n=2))
def test_two_masses_always_decided_true(spec):
    assert decide(spec).controllable_observable


@settings(max_examples=60, deadline=None)
@given(chain_specs(min_n=2, max_n=6, bound=8), st.sampled_from([F(0), F(1, 3), F(1), F(7, 2)]))
def test_proportional_always_true(spec, lam):
    prop = ChainSpec(spec.masses, spec.stiffness, tuple(lam * k for k in spec.stiffness))
    v = decide(prop)
    assert v.proportionality_holds and v.controllable_observable


@settings(max_examples=30, deadline=None)
@given(chain_specs(max_n=4))
def test_decide_deterministic(spec):
    assert decide(spec) == decide(ChainSpec(spec.masses, spec.stiffness, spec.damping))
