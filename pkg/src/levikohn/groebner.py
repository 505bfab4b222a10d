"""Buchberger's algorithm over Q(i) and radical membership.

Polynomials are handled internally as plain ``{exponents: coefficient}``
dicts over an arbitrary number of variables, so the Rabinowitsch variable
can be appended to the 2n slots of a HermitianPolynomial.  The monomial
order is graded reverse lexicographic with the variable order of
``poly.grevlex_key`` (the extra variable, when present, is the largest).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .errors import GroebnerBudgetError
from .gaussian import GaussianRational, ONE
from .poly import HermitianPolynomial, grevlex_key

log = logging.getLogger(__name__)

DEFAULT_LIMIT = 100_000


# --- dict polynomial helpers -------------------------------------------------

def _lm(p: dict):
    return max(p, key=grevlex_key)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _quo(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _coprime(a, b) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


def _axpy(p: dict, c: GaussianRational, m, g: dict):
    """p -= c * x^m * g, in place."""
    for e, v in g.items():
        e2 = tuple(a + b for a, b in zip(e, m))
        s = p.get(e2)
        if s is None:
            p[e2] = -(c * v)
        else:
            s = s - c * v
            if s:
                p[e2] = s
            else:
                del p[e2]


def _scale(p: dict, c: GaussianRational) -> dict:
    return {e: v * c for e, v in p.items()}


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            s = out.get(e)
            out[e] = c1 * c2 if s is None else s + c1 * c2
    return {e: c for e, c in out.items() if c}


def _add(p: dict, q: dict) -> dict:
    out = dict(p)
    for e, c in q.items():
        s = out.get(e)
        if s is None:
            out[e] = c
        else:
            s = s + c
            if s:
                out[e] = s
            else:
                del out[e]
    return out


class _Counter:
    def __init__(self, limit: int):
        self.limit = limit
        self.count = 0

    def tick(self):
        self.count += 1
        if self.count > self.limit:
            raise GroebnerBudgetError(
                f"Groebner reduction budget of {self.limit} steps exceeded"
            )


def _reduce(p: dict, basis, lms, counter: _Counter, cof=None, cofs=None):
    """Full reduction of p modulo basis.  Returns (remainder, cofactors).

    With tracking, ``cof`` is the cofactor vector of p and ``cofs`` those of
    the basis elements; the returned vector satisfies the same identity for
    the remainder.
    """
    p = dict(p)
    rem: dict = {}
    while p:
        m = _lm(p)
        c = p[m]
        for k, lm_k in enumerate(lms):
            if _divides(lm_k, m):
                q = _quo(m, lm_k)
                g = basis[k]
                f = c / g[lm_k]
                _axpy(p, f, q, g)
                if cof is not None:
                    mono = {q: f}
                    cof = [_add(a, _scale(_mul(mono, b), -ONE)) for a, b in zip(cof, cofs[k])]
                counter.tick()
                break
        else:
            rem[m] = c
            del p[m]
    return rem, cof


def _monic(p: dict, cof=None):
    c = p[_lm(p)].inverse()
    p = _scale(p, c)
    if cof is not None:
        cof = [_scale(a, c) for a in cof]
    return p, cof


def buchberger(polys: Sequence[dict], nvars: int, limit: int = DEFAULT_LIMIT, track: bool = False):
    """Reduced Groebner basis of dict polynomials.

    Returns (basis, cofactors) where cofactors[k][i] is the multiplier of
    input i in the representation of basis[k] (None unless ``track``).
    """
    counter = _Counter(limit)
    zero_mono = (0,) * nvars
    inputs = [dict(p) for p in polys]
    G: list = []
    C: list = []
    L: list = []
    for i, p in enumerate(inputs):
        if not p:
            continue
        cof = None
        if track:
            cof = [{} for _ in inputs]
            cof[i] = {zero_mono: ONE}
        if G:
            p, cof = _reduce(p, G, L, counter, cof, C)
            if not p:
                continue
        p, cof = _monic(p, cof)
        G.append(p)
        C.append(cof)
        L.append(_lm(p))

    pairs = {(i, j) for j in range(len(G)) for i in range(j)}
    while pairs:
        i, j = min(pairs, key=lambda ij: (grevlex_key(_lcm(L[ij[0]], L[ij[1]])), ij))
        pairs.discard((i, j))
        lcm = _lcm(L[i], L[j])
        if _coprime(L[i], L[j]):
            continue
        if any(
            k != i and k != j
            and _divides(L[k], lcm)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue
        qi, qj = _quo(lcm, L[i]), _quo(lcm, L[j])
        s = {}
        _axpy(s, -ONE, qi, G[i])
        _axpy(s, ONE, qj, G[j])
        cof = None
        if track:
            cof = [
                _add(_mul({qi: ONE}, a), _scale(_mul({qj: ONE}, b), -ONE))
                for a, b in zip(C[i], C[j])
            ]
        counter.tick()
        s, cof = _reduce(s, G, L, counter, cof, C)
        if not s:
            continue
        s, cof = _monic(s, cof)
        k = len(G)
        G.append(s)
        C.append(cof)
        L.append(_lm(s))
        pairs.update((a, k) for a in range(k))
        if not any(L[k]):
            break

    # minimal basis: each element was reduced by its predecessors when added,
    # so leading monomials are pairwise distinct
    keep = [k for k in range(len(G))
            if not any(o != k and _divides(L[o], L[k]) for o in range(len(G)))]
    G = [G[k] for k in keep]
    C = [C[k] for k in keep]
    L = [L[k] for k in keep]
    # tail reduction
    for k in range(len(G)):
        others = [o for o in range(len(G)) if o != k]
        lead = L[k]
        head = {lead: G[k][lead]}
        tail = {e: c for e, c in G[k].items() if e != lead}
        cof = C[k]
        if track:
            cof = list(cof)
        tail, cof = _reduce(
            tail, [G[o] for o in others], [L[o] for o in others], counter,
            cof, [C[o] for o in others] if track else None,
        )
        G[k] = _add(head, tail)
        C[k] = cof
    order = sorted(range(len(G)), key=lambda k: grevlex_key(L[k]))
    G = [G[k] for k in order]
    C = [C[k] for k in order] if track else None
    return G, C


# --- public API --------------------------------------------------------------

@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis in the z, conj(z) ring."""

    basis: tuple
    order: str = "grevlex"
    generators: tuple = ()
    cofactors: tuple | None = field(default=None, compare=False)

    def contains_one(self) -> bool:
        return any(p.is_constant() and not p.is_zero() for p in self.basis)

    def reduce(self, f: HermitianPolynomial, limit: int = DEFAULT_LIMIT) -> HermitianPolynomial:
        if not self.basis:
            return f
        dicts = [p.terms for p in self.basis]
        rem, _ = _reduce(f.terms, dicts, [_lm(d) for d in dicts], _Counter(limit))
        return HermitianPolynomial._raw(f.n, rem)

    def __contains__(self, f: HermitianPolynomial) -> bool:
        return self.reduce(f).is_zero()

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)


def groebner_basis(gens: Sequence[HermitianPolynomial], limit: int = DEFAULT_LIMIT,
                   track: bool = False) -> GroebnerBasis:
    """Reduced Groebner basis treating z_j and conj(z_j) as 2n indeterminates."""
    gens = tuple(gens)
    if not gens:
        return GroebnerBasis(basis=(), generators=())
    n = gens[0].n
    for g in gens:
        if g.n != n:
            from .errors import DimensionMismatch
            raise DimensionMismatch("generators live in different dimensions")
    G, C = buchberger([g.terms for g in gens], 2 * n, limit=limit, track=track)
    basis = tuple(HermitianPolynomial._raw(n, g) for g in G)
    cofactors = None
    if track:
        cofactors = tuple(
            tuple(HermitianPolynomial._raw(n, c) for c in row) for row in C
        )
    return GroebnerBasis(basis=basis, generators=gens, cofactors=cofactors)


def ideal_membership(f: HermitianPolynomial, gens: Sequence[HermitianPolynomial],
                     limit: int = DEFAULT_LIMIT) -> bool:
    if f.is_zero():
        return True
    if not gens:
        return False
    return f in groebner_basis(gens, limit=limit)


@dataclass(frozen=True)
class MembershipWitness:
    """f^power = sum(cofactors[i] * generators[i]), checkable by arithmetic."""

    f: HermitianPolynomial
    power: int
    generators: tuple
    cofactors: tuple

    def verify(self) -> bool:
        n = self.f.n
        total = HermitianPolynomial.zero(n)
        for c, g in zip(self.cofactors, self.generators):
            total = total + c * g
        return total == self.f ** self.power


def membership_witness(f: HermitianPolynomial, gens: Sequence[HermitianPolynomial],
                       limit: int = DEFAULT_LIMIT) -> MembershipWitness | None:
    """Cofactors expressing f in the ideal, or None when f is not a member."""
    gens = tuple(gens)
    n = f.n
    if f.is_zero():
        return MembershipWitness(f, 1, gens, tuple(HermitianPolynomial.zero(n) for _ in gens))
    if not gens:
        return None
    G, C = buchberger([g.terms for g in gens], 2 * n, limit=limit, track=True)
    counter = _Counter(limit)
    cof0 = [{} for _ in gens]
    rem, cof = _reduce(f.terms, G, [_lm(g) for g in G], counter, cof0, C)
    if rem:
        return None
    # f - sum(cof_i g_i) = 0 with the sign convention of _reduce
    cofactors = tuple(HermitianPolynomial._raw(n, _scale(c, -ONE)) for c in cof)
    return MembershipWitness(f, 1, gens, cofactors)


def _extend(p: dict, extra: int = 1) -> dict:
    pad = (0,) * extra
    return {e + pad: c for e, c in p.items()}


def radical_membership(f: HermitianPolynomial, gens: Sequence[HermitianPolynomial],
                       limit: int = DEFAULT_LIMIT, witness: bool = False):
    """Decide f in rad(gens) via 1 in <gens, 1 - t f>.

    With ``witness=True`` returns a MembershipWitness (f^N as a combination
    of the generators) or None; otherwise a boolean.
    """
    gens = tuple(g for g in gens)
    n = f.n
    if f.is_zero():
        return membership_witness(f, gens, limit) if witness else True
    if not gens:
        return None if witness else False
    # cheap first pass: plain membership
    if witness:
        w = membership_witness(f, gens, limit)
        if w is not None:
            return w
    else:
        gb = groebner_basis(gens, limit=limit)
        if gb.contains_one() or f in gb:
            return True
    nv = 2 * n + 1
    t = tuple([0] * (2 * n) + [1])
    rab = {(0,) * nv: ONE}
    for e, c in f.terms.items():
        e2 = e + (0,)
        rab[tuple(a + b for a, b in zip(e2, t))] = -c
    polys = [_extend(g.terms) for g in gens] + [rab]
    G, C = buchberger(polys, nv, limit=limit, track=witness)
    one_idx = next((k for k, g in enumerate(G) if not any(_lm(g))), None)
    if one_idx is None:
        return None if witness else False
    if not witness:
        return True
    # 1 = sum a_i(t) g_i + b (1 - t f); substitute t = 1/f and clear denominators
    row = C[one_idx]
    scale = G[one_idx][(0,) * nv].inverse()
    coeffs = [_scale(a, scale) for a in row[: len(gens)]]
    N = max((e[-1] for a in coeffs for e in a), default=0)
    fpow = [HermitianPolynomial.constant(n, 1)]
    for _ in range(N):
        fpow.append(fpow[-1] * f)
    cofactors = []
    for a in coeffs:
        acc = HermitianPolynomial.zero(n)
        by_k: dict = {}
        for e, c in a.items():
            by_k.setdefault(e[-1], {})[e[:-1]] = c
        for k, terms in by_k.items():
            acc = acc + HermitianPolynomial._raw(n, terms) * fpow[N - k]
        cofactors.append(acc)
    return MembershipWitness(f, N, gens, tuple(cofactors))


def contains_one(gens: Sequence[HermitianPolynomial], limit: int = DEFAULT_LIMIT) -> bool:
    if not gens:
        return False
    return groebner_basis(gens, limit=limit).contains_one()
