import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from dashchain.chain_model import ChainSpec

SEED = 20240611


@pytest.fixture
def rng():
    return random.Random(SEED)


def positive_rationals(bound=12):
    return st.builds(Fraction, st.integers(1, bound), st.integers(1, bound))


def nonneg_rationals(bound=12):
    return st.one_of(st.just(Fraction(0)), positive_rationals(bound))


@st.composite
def chain_specs(draw, min_n=2, max_n=5, bound=12):
    n = draw(st.integers(min_n, max_n))
    masses = draw(st.lists(positive_rationals(bound), min_size=n, max_size=n))
    k = draw(st.lists(positive_rationals(bound), min_size=n - 1, max_size=n - 1))
    c = draw(st.lists(nonneg_rationals(bound), min_size=n - 1, max_size=n - 1))
    return ChainSpec(tuple(masses), tuple(k), tuple(c))


def displayed_p3(m, k, c):
    """Displayed three-mass expansion, coefficients lowest power first."""
    m1, m2, m3 = m
    k1, k2 = k
    c1, c2 = c
    z5 = c1 / m1 + c1 / m2 + c2 / m2 + c2 / m3
    z4 = (k1 / m1 + k1 / m2 + k2 / m2 + k2 / m3
          + c1 * c2 / (m1 * m2) + c1 * c2 / (m1 * m3) + c1 * c2 / (m2 * m3))
    z3 = (k1 * c2 / (m1 * m2) + k1 * c2 / (m2 * m3) + k2 * c1 / (m1 * m2)
          + k1 * c2 / (m1 * m3) + k2 * c1 / (m1 * m3) + k2 * c1 / (m2 * m3))
    z2 = k1 * k2 / (m1 * m2) + k1 * k2 / (m2 * m3) + k1 * k2 / (m1 * m3)
    return [0, 0, z2, z3, z4, z5, 1]


# -- acceptance report ------------------------------------------------------

ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""
    def record(number, ok, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[number])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
