"""Kohn's chain of multiplier ideals on q-forms.

M_1 holds the (1,0)-forms dr and d(dr/dconj z_i); I_1 is the radical closure
of r together with the (n-q+1)-minors of M_1.  Each step appends d g for
the generators g of the previous ideal and closes again.  The chain ends
when 1 enters the ideal (certified) or the ideal stops growing (stuck).

Radical closure here means: ordinary radical membership (Rabinowitsch) for
all decisions, plus one real-radical rule: a member of the ideal that is a
Hermitian sum of squares sum_k w_k |h_k|^2 (w_k > 0, h_k holomorphic) puts
every h_k into the ideal.  Each use of that rule is recorded with a
checkable certificate, and a stuck verdict is therefore only as strong as
these two rules.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import GroebnerBudgetError, InputError
from .gaussian import GaussianRational, I, ONE
from .groebner import (
    DEFAULT_LIMIT,
    MembershipWitness,
    groebner_basis,
    membership_witness,
    radical_membership,
)
from .levi import DefiningFunction, complex_hessian, gradient_form
from .poly import HermitianPolynomial
from .polymatrix import det, minor_index_sets, submatrix

log = logging.getLogger(__name__)

DEGREE_CAP = 40

RUNNING = "running"
CERTIFIED = "certified"
STUCK = "stuck"
BUDGET_EXHAUSTED = "budget-exhausted"


# --- data --------------------------------------------------------------------

@dataclass(frozen=True)
class FormRow:
    entries: tuple
    provenance: str  # gradient-of-r | hessian-row | gradient-of-multiplier
    source: int | None = None  # hessian index or generator index


@dataclass(frozen=True)
class FormModuleMatrix:
    rows: tuple
    n: int

    def matrix(self):
        return [list(r.entries) for r in self.rows]

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class SosCertificate:
    """source = sum_k weights[k] * parts[k] * conj(parts[k]), source in the ideal."""

    source: HermitianPolynomial
    weights: tuple
    parts: tuple
    source_generator: int | None = None
    scalar: GaussianRational = ONE  # source = scalar * generators[source_generator]
    source_witness: MembershipWitness | None = None

    def identity_holds(self) -> bool:
        n = self.source.n
        total = HermitianPolynomial.zero(n)
        for w, h in zip(self.weights, self.parts):
            total = total + h * h.conjugate() * w
        return all(w > 0 for w in self.weights) and total == self.source


@dataclass(frozen=True)
class MultiplierIdeal:
    generators: tuple
    records: tuple  # one provenance dict per generator
    n: int
    sos_certificates: tuple = ()

    def __len__(self):
        return len(self.generators)

    def index(self, g: HermitianPolynomial) -> int:
        return self.generators.index(g)


@dataclass(frozen=True)
class MultiplierChainState:
    d: DefiningFunction
    q: int
    h: int
    module: FormModuleMatrix
    ideal: MultiplierIdeal
    status: str = RUNNING
    heuristic_fired: bool = False
    history: tuple = ()
    limit: int = DEFAULT_LIMIT
    degree_cap: int = DEGREE_CAP

    @property
    def minor_size(self) -> int:
        return self.d.n - self.q + 1


# --- normalization -----------------------------------------------------------

def canonical(g: HermitianPolynomial) -> HermitianPolynomial:
    """Representative of the line Q(i)*g; real whenever some multiple is real."""
    lm, lc = g.leading_term()
    ng = g * lc.inverse()
    cg = ng.conjugate()
    c = cg.terms.get(lm)
    if c is not None and cg == ng * c:
        mu = ONE + c if c != -1 else I
        h = ng * mu
        lcv = h.leading_term()[1]
        a = lcv.re if lcv.re else lcv.im
        return h * (1 / a)
    return ng


def _key(g: HermitianPolynomial):
    return canonical(g)


class _IdealBuilder:
    """Mutable helper that keeps generators deduplicated and conjugation closed."""

    def __init__(self, ideal: MultiplierIdeal | None, n: int, degree_cap: int):
        self.n = n
        self.degree_cap = degree_cap
        self.gens = list(ideal.generators) if ideal else []
        self.records = list(ideal.records) if ideal else []
        self.sos = list(ideal.sos_certificates) if ideal else []
        self.keys = {_key(g) for g in self.gens}
        self.added: list = []

    def add(self, p: HermitianPolynomial, record: dict) -> bool:
        if p.is_zero():
            return False
        if p.degree() > self.degree_cap:
            warnings.warn(f"dropping generator of degree {p.degree()} > cap {self.degree_cap}",
                          RuntimeWarning, stacklevel=3)
            return False
        k = _key(p)
        if k in self.keys:
            return False
        self.keys.add(k)
        idx = len(self.gens)
        self.gens.append(p)
        self.records.append(record)
        self.added.append(idx)
        cp = p.conjugate()
        ck = _key(cp)
        if ck not in self.keys:
            self.keys.add(ck)
            self.gens.append(cp)
            self.records.append({"kind": "conjugate", "of": idx})
            self.added.append(idx + 1)
        return True

    def build(self) -> MultiplierIdeal:
        return MultiplierIdeal(tuple(self.gens), tuple(self.records), self.n, tuple(self.sos))


# --- operations --------------------------------------------------------------

def minors(m: FormModuleMatrix | Sequence[Sequence[HermitianPolynomial]], k: int,
           n: int | None = None, row_filter=None):
    """Nonzero k x k minors, enumerated by (row subset, column subset) lexicographically.

    Returns a list of polynomials.  ``row_filter`` restricts to row subsets
    for which it returns True (used to skip minors already computed).
    """
    return [p for _, _, p in _minors_with_index(m, k, n, row_filter)]


def _minors_with_index(m, k, n=None, row_filter=None):
    rows = m.matrix() if isinstance(m, FormModuleMatrix) else [list(r) for r in m]
    if not rows:
        return []
    ncols = len(rows[0])
    if not 1 <= k <= ncols:
        raise InputError(f"minor size {k} out of range 1..{ncols}")
    dim = n if n is not None else rows[0][0].n
    out = []
    for ri, ci in minor_index_sets(len(rows), ncols, k):
        if row_filter is not None and not row_filter(ri):
            continue
        p = det(submatrix(rows, ri, ci), dim)
        if not p.is_zero():
            out.append((ri, ci, p))
    return out


def hermitian_sos(p: HermitianPolynomial):
    """Write p = sum w_k |h_k|^2 with w_k > 0 rational and h_k holomorphic.

    Works on the Gram matrix of p in holomorphic monomials, which is unique;
    returns (weights, parts) or None when p is not of that form.
    """
    if p.is_zero() or not p.is_real():
        return None
    n = p.n
    G: dict = {}
    idx = set()
    for e, c in p.terms.items():
        a, b = e[:n], e[n:]
        G.setdefault(a, {})[b] = c
        idx.add(a)
        idx.add(b)
    order = sorted(idx)
    G = {a: {b: G.get(a, {}).get(b, GaussianRational(0)) for b in order} for a in order}
    weights, parts = [], []
    remaining = list(order)
    while True:
        live = [a for a in remaining if any(G[a][b] for b in remaining)]
        if not live:
            break
        piv = None
        for a in live:
            d = G[a][a]
            if d.im or d.re < 0:
                return None
            if d.re == 0:
                return None  # zero diagonal with nonzero row: indefinite
            if piv is None:
                piv = a
        d = G[piv][piv]
        col = {a: G[a][piv] / d for a in live}
        for a in live:
            for b in live:
                G[a][b] = G[a][b] - d * col[a] * col[b].conjugate()
        weights.append(d.re)
        terms = {a + (0,) * n: col[a] for a in live if col[a]}
        parts.append(HermitianPolynomial(n, terms))
        remaining = [a for a in remaining if a != piv]
    return tuple(weights), tuple(parts)


def _sos_candidates(p: HermitianPolynomial):
    """(source, scalar, decomposition) with source = scalar * p a Hermitian SOS."""
    c = canonical(p)
    if not c.is_real():
        return None
    m = next(iter(p.terms))
    scalar = c.terms[m] / p.terms[m]
    for sign in (1, -1):
        res = hermitian_sos(c * sign)
        if res is not None:
            return c * sign, scalar * sign, res
    return None


def _closure(builder: _IdealBuilder, limit: int):
    """Apply the sum-of-squares rule until nothing new enters.

    Returns (groebner basis of the closed ideal, rule fired?).
    """
    fired = False
    while True:
        gb = groebner_basis(builder.gens, limit=limit) if builder.gens else None
        if gb is None or gb.contains_one():
            return gb, fired
        grew = False
        pool = [(i, g) for i, g in enumerate(builder.gens)]
        gen_keys = {_key(g) for g in builder.gens}
        pool += [(None, b) for b in gb.basis if _key(b) not in gen_keys]
        for src_idx, p in pool:
            hit = _sos_candidates(p)
            if hit is None:
                continue
            source, scalar, (weights, parts) = hit
            if all(gb.reduce(h).is_zero() for h in parts):
                continue
            witness = None
            if src_idx is None:
                witness = membership_witness(source, tuple(builder.gens), limit=limit)
                scalar = ONE
            cert = SosCertificate(source, weights, parts, src_idx, scalar, witness)
            cert_id = len(builder.sos)
            builder.sos.append(cert)
            for h in parts:
                if not gb.reduce(h).is_zero():
                    if builder.add(h, {"kind": "sos-split", "certificate": cert_id}):
                        grew = True
            fired = True
            if grew:
                break
        if not grew:
            return gb, fired


def _module_rows_init(d: DefiningFunction):
    hess = complex_hessian(d)
    n = d.n
    rows = [FormRow(gradient_form(d), "gradient-of-r")]
    for i in range(n):
        # d(dr/dconj z_i) has entries d^2 r / dz_j dconj z_i, i.e. column i
        rows.append(FormRow(tuple(hess[j][i] for j in range(n)), "hessian-row", i))
    return rows


def init_chain(d: DefiningFunction, q: int, limit: int = DEFAULT_LIMIT,
               degree_cap: int = DEGREE_CAP) -> MultiplierChainState:
    n = d.n
    if not 1 <= q <= n - 1:
        raise InputError(f"q must lie in 1..{n - 1}")
    k = n - q + 1
    module = FormModuleMatrix(tuple(_module_rows_init(d)), n)
    builder = _IdealBuilder(None, n, degree_cap)
    builder.add(d.r, {"kind": "defining-function"})
    found = _minors_with_index(module, k, n)
    used = 0
    for ri, ci, p in found:
        if builder.add(p, {"kind": "minor", "step": 1, "rows": list(ri), "cols": list(ci)}):
            used += 1
    gb, fired = _closure(builder, limit)
    ideal = builder.build()
    status = CERTIFIED if gb is not None and gb.contains_one() else RUNNING
    entry = {
        "h": 1,
        "rows_added": len(module.rows),
        "minors_found": len(found),
        "generators_added": list(builder.added),
        "sos_rule_fired": fired,
    }
    return MultiplierChainState(d, q, 1, module, ideal, status, fired, (entry,), limit, degree_cap)


def step_chain(state: MultiplierChainState) -> MultiplierChainState:
    """One step: append d g for new generators, add new minors, close."""
    if state.status != RUNNING:
        raise InputError(f"step_chain requires a running state, got {state.status}")
    n = state.d.n
    k = state.minor_size
    old_rows = list(state.module.rows)
    have = {r.source for r in old_rows if r.provenance == "gradient-of-multiplier"}
    seen_rows = {r.entries for r in old_rows}
    new_rows = []
    for idx, g in enumerate(state.ideal.generators):
        if idx in have:
            continue
        entries = tuple(g.dz(j) for j in range(1, n + 1))
        if all(e.is_zero() for e in entries) or entries in seen_rows:
            continue
        seen_rows.add(entries)
        new_rows.append(FormRow(entries, "gradient-of-multiplier", idx))
    module = FormModuleMatrix(tuple(old_rows + new_rows), n)
    first_new = len(old_rows)
    builder = _IdealBuilder(state.ideal, n, state.degree_cap)
    gb_old = groebner_basis(state.ideal.generators, limit=state.limit)
    found = _minors_with_index(module, k, n, row_filter=lambda ri: ri[-1] >= first_new)
    for ri, ci, p in found:
        if gb_old.reduce(p, state.limit).is_zero():
            continue
        builder.add(p, {"kind": "minor", "step": state.h + 1, "rows": list(ri), "cols": list(ci)})
    gb, fired = _closure(builder, state.limit)
    ideal = builder.build()
    h = state.h + 1
    if gb is not None and gb.contains_one():
        status = CERTIFIED
    elif all(
        radical_membership(ideal.generators[i], state.ideal.generators, limit=state.limit)
        for i in builder.added
    ):
        status = STUCK
    else:
        status = RUNNING
    entry = {
        "h": h,
        "rows_added": len(new_rows),
        "minors_found": len(found),
        "generators_added": list(builder.added),
        "sos_rule_fired": fired,
    }
    return MultiplierChainState(
        state.d, state.q, h, module, ideal, status,
        state.heuristic_fired or fired, state.history + (entry,), state.limit, state.degree_cap,
    )


@dataclass(frozen=True)
class ChainReport:
    state: MultiplierChainState
    certificate: dict | None = None
    variety: object | None = None  # VarietyIdeal for stuck outcomes

    @property
    def status(self) -> str:
        return self.state.status

    @property
    def h(self) -> int:
        return self.state.h


def run_chain(d: DefiningFunction, q: int, max_h: int = 10, limit: int = DEFAULT_LIMIT,
              degree_cap: int = DEGREE_CAP) -> ChainReport:
    """Iterate until certified, stuck, or max_h steps have been taken."""
    if max_h < 1:
        raise InputError("max_h must be >= 1")
    state = init_chain(d, q, limit, degree_cap)
    while state.status == RUNNING:
        if state.h >= max_h:
            state = replace(state, status=BUDGET_EXHAUSTED)
            break
        try:
            state = step_chain(state)
        except GroebnerBudgetError as exc:
            exc.partial_state = state
            raise
    certificate = None
    variety = None
    if state.status == CERTIFIED:
        certificate = build_certificate(state)
    elif state.status == STUCK:
        from .variety import VarietyIdeal
        variety = VarietyIdeal.from_complex(state.ideal.generators)
    return ChainReport(state, certificate, variety)


# --- certificates ------------------------------------------------------------

def _unit_witness(gens: tuple, limit: int) -> MembershipWitness:
    n = gens[0].n
    one = HermitianPolynomial.constant(n, 1)
    for i, g in enumerate(gens):
        if g.is_constant():
            cof = [HermitianPolynomial.zero(n)] * len(gens)
            cof[i] = HermitianPolynomial.constant(n, g.constant_term().inverse())
            return MembershipWitness(one, 1, gens, tuple(cof))
    w = membership_witness(one, gens, limit=limit)
    if w is None:
        raise RuntimeError("ideal was certified but 1 has no membership witness")
    return w


def build_certificate(state: MultiplierChainState) -> dict:
    """Replayable record of how 1 entered the ideal."""
    if state.status != CERTIFIED:
        raise InputError("certificate requested for an uncertified chain")
    return {
        "q": state.q,
        "h": state.h,
        "minor_size": state.minor_size,
        "rows": [(r.provenance, r.source) for r in state.module.rows],
        "generators": state.ideal.generators,
        "records": state.ideal.records,
        "sos_certificates": state.ideal.sos_certificates,
        "unit_witness": _unit_witness(state.ideal.generators, state.limit),
    }


def verify_certificate(cert: dict, d: DefiningFunction) -> bool:
    """Recompute every row, minor and witness from scratch."""
    n = d.n
    hess = complex_hessian(d)
    gens = tuple(cert["generators"])
    rows = []
    for prov, src in cert["rows"]:
        if prov == "gradient-of-r":
            rows.append(list(gradient_form(d)))
        elif prov == "hessian-row":
            rows.append([hess[j][src] for j in range(n)])
        elif prov == "gradient-of-multiplier":
            rows.append([gens[src].dz(j) for j in range(1, n + 1)])
        else:
            return False
    k = cert["minor_size"]
    sos = cert["sos_certificates"]
    for i, (g, rec) in enumerate(zip(gens, cert["records"])):
        kind = rec["kind"]
        if kind == "defining-function":
            ok = g == d.r
        elif kind == "conjugate":
            ok = rec["of"] < i and g == gens[rec["of"]].conjugate()
        elif kind == "minor":
            ri, ci = rec["rows"], rec["cols"]
            ok = len(ri) == k and max(ri) < len(rows) and det(submatrix(rows, ri, ci), n) == g
        elif kind == "sos-split":
            c = sos[rec["certificate"]]
            ok = c.identity_holds() and any(g == h for h in c.parts)
            if c.source_generator is not None:
                ok = ok and gens[c.source_generator] * c.scalar == c.source
            else:
                w = c.source_witness
                ok = ok and w is not None and w.f == c.source and w.power == 1 and w.verify()
                ok = ok and all(x in gens for x in w.generators)
        else:
            ok = False
        if not ok:
            log.info("certificate check failed at generator %d (%s)", i, kind)
            return False
    w = cert["unit_witness"]
    return w.f == HermitianPolynomial.constant(n, 1) and w.generators == gens and w.verify()
