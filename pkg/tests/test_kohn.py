import itertools
import random
import warnings

import pytest

from levikohn import DefiningFunction, parse_expression
from levikohn.errors import InputError
from levikohn.gaussian import GaussianRational
from levikohn.groebner import radical_membership
from levikohn.kohn import (
    BUDGET_EXHAUSTED,
    CERTIFIED,
    RUNNING,
    STUCK,
    FormModuleMatrix,
    FormRow,
    canonical,
    hermitian_sos,
    init_chain,
    minors,
    run_chain,
    step_chain,
    verify_certificate,
)
from levikohn.poly import HermitianPolynomial

from conftest import EXAMPLE_TEXT

# Every chain exercised by the suite: (label, n, r, q, expected status, expected h)
CHAIN_CASES = [
    ("ball", 2, "z1*conj(z1) + z2*conj(z2) - 1", 1, CERTIFIED, 1),
    ("half-space", 2, "2*x2", 1, STUCK, 2),
    ("quartic ball", 2, "z1*conj(z1) + (z2*conj(z2))^2 - 1", 1, CERTIFIED, 2),
    ("example q=2", 3, EXAMPLE_TEXT, 2, CERTIFIED, 2),
    ("levi-flat C3 q=2", 3, "2*x3", 2, STUCK, 2),
    ("line in boundary", 3, "-x3 + z2*conj(z2)", 1, STUCK, 2),
    ("finite type C2", 2, "-x2 + (z1*conj(z1))^2", 1, CERTIFIED, 2),
]


def domain(n, text):
    return DefiningFunction(parse_expression(text, n))


def P(text, n=2):
    return parse_expression(text, n)


def chain_states(d, q, max_h=8):
    state = init_chain(d, q)
    states = [state]
    while state.status == RUNNING and state.h < max_h:
        state = step_chain(state)
        states.append(state)
    return states


# --- examples ----------------------------------------------------------------

def test_minors_examples():
    rows = [[P("conj(z1)"), P("conj(z2)")], [P("1"), P("0")], [P("0"), P("1")]]
    assert minors(rows, 2) == [P("-conj(z2)"), P("conj(z1)"), P("1")]
    zero = [[P("0"), P("0")], [P("0"), P("0")]]
    assert minors(zero, 1) == [] and minors(zero, 2) == []
    assert minors([[P("z1"), P("0")]], 1) == [P("z1")]


def test_init_chain_examples(example):
    ball = init_chain(domain(2, "z1*conj(z1) + z2*conj(z2) - 1"), 1)
    assert ball.status == CERTIFIED and ball.h == 1
    half = init_chain(domain(2, "2*x2"), 1)
    assert half.status == RUNNING
    assert len(half.ideal.generators) == 1
    assert radical_membership(P("x2"), half.ideal.generators)
    state = init_chain(example, 2)
    assert state.minor_size == 2
    assert len(state.module.rows) == 4
    assert state.ideal.generators[0] == example.r
    rows = state.module.matrix()
    for ri in itertools.combinations(range(4), 2):
        for ci in itertools.combinations(range(3), 2):
            m = [[rows[i][j] for j in ci] for i in ri]
            det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
            assert radical_membership(det, state.ideal.generators)


def test_step_chain_half_space():
    state = init_chain(domain(2, "2*x2"), 1)
    nxt = step_chain(state)
    assert nxt.h == 2 and nxt.status == STUCK
    # d(2 x2) = (0, 1) is already the row dr; repeated rows only give zero minors
    assert (P("0"), P("1")) in [r.entries for r in nxt.module.rows]
    assert nxt.history[-1]["minors_found"] == 0
    assert nxt.history[-1]["generators_added"] == []


def test_step_refuses_finished_state():
    state = init_chain(domain(2, "z1*conj(z1) + z2*conj(z2) - 1"), 1)
    with pytest.raises(InputError):
        step_chain(state)


def test_quartic_ball_uses_sos_and_certifies():
    rep = run_chain(domain(2, "z1*conj(z1) + (z2*conj(z2))^2 - 1"), 1)
    assert rep.status == CERTIFIED and rep.h == 2
    assert verify_certificate(rep.certificate, rep.state.d)


@pytest.mark.parametrize("label,n,text,q,status,h", CHAIN_CASES, ids=[c[0] for c in CHAIN_CASES])
def test_chain_outcomes(label, n, text, q, status, h):
    rep = run_chain(domain(n, text), q, max_h=8)
    assert (rep.status, rep.h) == (status, h)
    if status == CERTIFIED:
        assert verify_certificate(rep.certificate, rep.state.d)
    else:
        assert rep.variety is not None


def test_half_space_variety():
    rep = run_chain(domain(2, "2*x2"), 1)
    assert rep.variety.generators == (P("z2 + conj(z2)"),)


def test_budget_exhausted():
    rep = run_chain(domain(2, "2*x2"), 1, max_h=1)
    assert rep.status == BUDGET_EXHAUSTED and rep.h == 1
    with pytest.raises(InputError):
        run_chain(domain(2, "2*x2"), 1, max_h=0)


def test_q_out_of_range():
    with pytest.raises(InputError):
        init_chain(domain(2, "2*x2"), 2)


# --- certificates ------------------------------------------------------------

def test_certificate_tampering_detected():
    d = domain(2, "z1*conj(z1) + z2*conj(z2) - 1")
    cert = dict(run_chain(d, 1).certificate)
    assert verify_certificate(cert, d)
    gens = list(cert["generators"])
    gens[1] = gens[1] + P("z1")
    bad = dict(cert, generators=tuple(gens))
    assert not verify_certificate(bad, d)
    assert not verify_certificate(cert, domain(2, "z1*conj(z1) + 2*z2*conj(z2) - 1"))


def test_sos_certificates_reverify():
    for label, n, text, q, status, h in CHAIN_CASES:
        rep = run_chain(domain(n, text), q)
        gens = rep.state.ideal.generators
        for c in rep.state.ideal.sos_certificates:
            assert c.identity_holds(), label
            if c.source_generator is not None:
                assert gens[c.source_generator] * c.scalar == c.source
            else:
                assert c.source_witness.verify()


def test_hermitian_sos():
    w, parts = hermitian_sos(P("z1*conj(z1) + 4*z2*conj(z2) + z1*conj(z2) + z2*conj(z1)"))
    total = sum((h * h.conjugate() * c for c, h in zip(w, parts)), P("0"))
    assert total == P("z1*conj(z1) + 4*z2*conj(z2) + z1*conj(z2) + z2*conj(z1)")
    assert all(c > 0 for c in w)
    assert hermitian_sos(P("z1*conj(z1) - z2*conj(z2)")) is None
    assert hermitian_sos(P("z1 + conj(z1)")) is None


def test_canonical_is_scale_invariant():
    p = P("z1*conj(z2) + z2*conj(z1) - 1")
    for c in (GaussianRational(3), GaussianRational(0, 2), GaussianRational(1, -1)):
        assert canonical(p * c) == canonical(p)
    assert canonical(p).is_real()


# --- properties --------------------------------------------------------------

def permutation_det(m):
    n = len(m)
    total = HermitianPolynomial.zero(m[0][0].n)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = HermitianPolynomial.constant(m[0][0].n, -1 if inv % 2 else 1)
        for i in range(n):
            term = term * m[i][perm[i]]
        total = total + term
    return total


def permutation_minors(m, k):
    out = []
    rows, cols = len(m), len(m[0])
    for ri in itertools.combinations(range(rows), k):
        for ci in itertools.combinations(range(cols), k):
            p = permutation_det([[m[i][j] for j in ci] for i in ri])
            if not p.is_zero():
                out.append(p)
    return out


def random_monomial_matrix(rng, size=4, n=2):
    def entry():
        if rng.random() < 0.2:
            return HermitianPolynomial.zero(n)
        e = tuple(rng.randint(0, 2) for _ in range(2 * n))
        return HermitianPolynomial.monomial(n, e, GaussianRational(rng.randint(-3, 3) or 1, rng.randint(-2, 2)))
    return [[entry() for _ in range(size)] for _ in range(size)]


def minor_oracle_mismatches(count=100, seed=0):
    rng = random.Random(seed)
    bad = 0
    for t in range(count):
        m = random_monomial_matrix(rng)
        k = 1 + t % 4
        if minors(m, k) != permutation_minors(m, k):
            bad += 1
    return bad


def test_minors_match_permutation_expansion():
    assert minor_oracle_mismatches() == 0


def monotonicity_failures(cases=CHAIN_CASES):
    fails = []
    for label, n, text, q, _, _ in cases:
        states = chain_states(domain(n, text), q)
        for a, b in zip(states, states[1:]):
            for g in a.ideal.generators:
                if not radical_membership(g, b.ideal.generators):
                    fails.append((label, a.h, str(g)))
    return fails


def test_chain_monotonicity():
    assert monotonicity_failures() == []


def test_conjugation_closure():
    for label, n, text, q, _, _ in CHAIN_CASES:
        for state in chain_states(domain(n, text), q):
            gens = state.ideal.generators
            assert {g.conjugate() for g in gens} == set(gens), label
            assert len(set(gens)) == len(gens), label


def test_determinism():
    for label, n, text, q, _, _ in CHAIN_CASES:
        a = run_chain(domain(n, text), q)
        b = run_chain(domain(n, text), q)
        assert a.state.ideal.generators == b.state.ideal.generators, label
        assert a.state.ideal.records == b.state.ideal.records, label


def test_certified_is_stable():
    for label, n, text, q, status, h in CHAIN_CASES:
        if status != CERTIFIED:
            continue
        for max_h in (h, h + 3, 10):
            rep = run_chain(domain(n, text), q, max_h=max_h)
            assert (rep.status, rep.h) == (CERTIFIED, h), label


def test_degree_cap_warns():
    d = domain(2, "z1*conj(z1) + (z2*conj(z2))^2 - 1")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = run_chain(d, 1, degree_cap=2)
    assert any("degree" in str(w.message) for w in caught)
    assert rep.status in (CERTIFIED, STUCK, BUDGET_EXHAUSTED)


def test_rows_have_length_n(example):
    state = init_chain(example, 1)
    assert all(len(r.entries) == 3 for r in state.module.rows)
    assert isinstance(state.module, FormModuleMatrix)
    assert all(isinstance(r, FormRow) for r in state.module.rows)
