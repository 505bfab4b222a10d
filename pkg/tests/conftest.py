import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from levikohn import DefiningFunction, parse_expression
from levikohn.gaussian import GaussianRational
from levikohn.poly import HermitianPolynomial

EXAMPLE_TEXT = (
    "-x3 - z1*conj(z1)*z2*conj(z2) + (1/4)*(z1*conj(z1))^2 + (3/4)*(z2*conj(z2))^2"
)


def example_domain():
    return DefiningFunction(parse_expression(EXAMPLE_TEXT, 3))


@pytest.fixture
def example():
    return example_domain()


def small_rational():
    return st.fractions(min_value=-5, max_value=5, max_denominator=4)


def gaussian():
    return st.builds(GaussianRational, small_rational(), small_rational())


def polynomials(n=2, max_terms=5, max_exp=2):
    exps = st.tuples(*[st.integers(0, max_exp)] * (2 * n))
    return st.dictionaries(exps, gaussian(), max_size=max_terms).map(
        lambda t: HermitianPolynomial(n, t)
    )


def random_poly(rng: random.Random, n: int, nterms: int, maxdeg: int, real=False, holo=False):
    terms = {}
    for _ in range(nterms):
        deg = rng.randint(0, maxdeg)
        e = [0] * (2 * n)
        slots = n if holo else 2 * n
        for _ in range(deg):
            e[rng.randrange(slots)] += 1
        c = GaussianRational(Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                             0 if real else Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        terms[tuple(e)] = terms.get(tuple(e), GaussianRational(0)) + c
    p = HermitianPolynomial(n, terms)
    if real:
        p = p + p.conjugate()
    return p


def random_boundary(rng: random.Random, n: int, maxdeg: int = 3):
    """r = -x_n + (random real polynomial in z_1..z_{n-1} of degree <= maxdeg)."""
    terms = {}
    for _ in range(4):
        deg = rng.randint(2, maxdeg)
        e = [0] * (2 * n)
        for _ in range(deg):
            slot = rng.randrange(n - 1) + (n if rng.random() < 0.5 else 0)
            e[slot] += 1
        terms[tuple(e)] = GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3))
    p = HermitianPolynomial(n, terms)
    p = p + p.conjugate() - HermitianPolynomial.x(n, n)
    return DefiningFunction(p)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
