"""Exact polynomials in z_1..z_n and their formal conjugates.

A monomial is a dense tuple of 2n exponents: the first n belong to z_1..z_n,
the last n to conj(z_1)..conj(z_n).  The variable order used everywhere is
z_1 < ... < z_n < conj(z_1) < ... < conj(z_n) with graded reverse
lexicographic comparison.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch
from .gaussian import GaussianRational, ONE, I

Monomial = tuple


def grevlex_key(exps: Sequence[int]):
    """Sort key: larger key means larger monomial in grevlex.

    The exponent tuple is stored smallest variable first, so the reverse
    lexicographic tie break reads it from the front.
    """
    return (sum(exps), tuple(-e for e in exps))


def _coerce(c) -> GaussianRational:
    return c if isinstance(c, GaussianRational) else GaussianRational.coerce(c)


class HermitianPolynomial:
    """Immutable polynomial over Q(i) in z and conj(z), n complex variables."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Monomial, object] | None = None):
        self.n = n
        clean = {}
        if terms:
            width = 2 * n
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != width:
                    raise DimensionMismatch(
                        f"monomial {exps} has {len(exps)} exponents, expected {width}"
                    )
                c = _coerce(c)
                if c:
                    clean[exps] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "HermitianPolynomial":
        # trusted constructor: caller guarantees no zero coefficients
        p = cls.__new__(cls)
        p.n = n
        p.terms = terms
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, n: int) -> "HermitianPolynomial":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "HermitianPolynomial":
        return cls(n, {(0,) * (2 * n): c})

    @classmethod
    def monomial(cls, n: int, exps: Sequence[int], c=1) -> "HermitianPolynomial":
        return cls(n, {tuple(exps): c})

    @classmethod
    def z(cls, n: int, j: int) -> "HermitianPolynomial":
        """The coordinate z_j (1-based)."""
        _check_index(n, j)
        e = [0] * (2 * n)
        e[j - 1] = 1
        return cls._raw(n, {tuple(e): ONE})

    @classmethod
    def zbar(cls, n: int, j: int) -> "HermitianPolynomial":
        _check_index(n, j)
        e = [0] * (2 * n)
        e[n + j - 1] = 1
        return cls._raw(n, {tuple(e): ONE})

    @classmethod
    def x(cls, n: int, j: int) -> "HermitianPolynomial":
        """Real part (z_j + conj z_j)/2."""
        return (cls.z(n, j) + cls.zbar(n, j)) * Fraction(1, 2)

    @classmethod
    def y(cls, n: int, j: int) -> "HermitianPolynomial":
        """Imaginary part (z_j - conj z_j)/(2i)."""
        return (cls.z(n, j) - cls.zbar(n, j)) * (I * Fraction(-1, 2))

    # basic properties

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def low_degree(self) -> int:
        """Lowest total degree of a nonzero term; -1 for zero."""
        if not self.terms:
            return -1
        return min(sum(e) for e in self.terms)

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * (2 * self.n), GaussianRational(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def sorted_terms(self):
        """Terms from largest to smallest monomial in grevlex."""
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            return None
        exps = max(self.terms, key=grevlex_key)
        return exps, self.terms[exps]

    def is_holomorphic(self) -> bool:
        """True when no conj(z) variable occurs."""
        n = self.n
        return all(not any(e[n:]) for e in self.terms)

    # ring structure

    def _check(self, other: "HermitianPolynomial"):
        if self.n != other.n:
            raise DimensionMismatch(f"dimension mismatch: {self.n} vs {other.n}")

    def _lift(self, other) -> "HermitianPolynomial":
        if isinstance(other, HermitianPolynomial):
            self._check(other)
            return other
        return HermitianPolynomial.constant(self.n, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            if s is None:
                terms[e] = c
            else:
                s = s + c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return HermitianPolynomial._raw(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return HermitianPolynomial._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, HermitianPolynomial):
            c = _coerce(other)
            if not c:
                return HermitianPolynomial.zero(self.n)
            return HermitianPolynomial._raw(self.n, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e)
                terms[e] = c1 * c2 if s is None else s + c1 * c2
        return HermitianPolynomial._raw(self.n, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = HermitianPolynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, HermitianPolynomial):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == HermitianPolynomial.constant(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    # conjugation and derivatives

    def conjugate(self) -> "HermitianPolynomial":
        n = self.n
        return HermitianPolynomial._raw(
            n, {e[n:] + e[:n]: c.conjugate() for e, c in self.terms.items()}
        )

    def is_real(self) -> bool:
        return self == self.conjugate()

    def real_part(self) -> "HermitianPolynomial":
        return (self + self.conjugate()) * Fraction(1, 2)

    def imag_part(self) -> "HermitianPolynomial":
        return (self - self.conjugate()) * (I * Fraction(-1, 2))

    def diff(self, slot: int) -> "HermitianPolynomial":
        """Formal partial derivative in exponent slot 0..2n-1."""
        terms = {}
        for e, c in self.terms.items():
            k = e[slot]
            if k:
                e2 = e[:slot] + (k - 1,) + e[slot + 1:]
                terms[e2] = c * k
        return HermitianPolynomial._raw(self.n, terms)

    def dz(self, j: int) -> "HermitianPolynomial":
        _check_index(self.n, j)
        return self.diff(j - 1)

    def dzbar(self, j: int) -> "HermitianPolynomial":
        _check_index(self.n, j)
        return self.diff(self.n + j - 1)

    def dx(self, j: int) -> "HermitianPolynomial":
        """Real partial derivative d/dx_j = d/dz_j + d/dconj(z_j)."""
        return self.dz(j) + self.dzbar(j)

    def dy(self, j: int) -> "HermitianPolynomial":
        """Real partial derivative d/dy_j = i (d/dz_j - d/dconj(z_j))."""
        return (self.dz(j) - self.dzbar(j)) * I

    # evaluation and substitution

    def evaluate(self, point: Sequence, mode: str = "float"):
        """Substitute z_j = point[j], conj(z_j) = conj(point[j])."""
        if len(point) != self.n:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.n}")
        if mode == "exact":
            pts = [_coerce(p) for p in point]
            vals = pts + [p.conjugate() for p in pts]
            total = GaussianRational(0)
            for e, c in self.terms.items():
                term = c
                for v, k in zip(vals, e):
                    if k:
                        term = term * v ** k
                total = total + term
            return total
        if mode != "float":
            raise ValueError(f"unknown evaluation mode {mode!r}")
        pts = [complex(p) for p in point]
        vals = pts + [p.conjugate() for p in pts]
        total = 0j
        for e, c in self.terms.items():
            term = complex(c)
            for v, k in zip(vals, e):
                if k:
                    term *= v ** k
            total += term
        return total

    def substitute(self, images: Sequence["HermitianPolynomial"]) -> "HermitianPolynomial":
        """Replace slot k (z_1..z_n, conj z_1..conj z_n) with images[k].

        All images must live in one common ring; the result lives there too.
        """
        if len(images) != 2 * self.n:
            raise DimensionMismatch("need one image per exponent slot")
        target = images[0].n
        powers: dict = {}

        def power(k, m):
            key = (k, m)
            if key not in powers:
                powers[key] = images[k] ** m
            return powers[key]

        total = HermitianPolynomial.zero(target)
        for e, c in self.terms.items():
            term = HermitianPolynomial.constant(target, c)
            for k, m in enumerate(e):
                if m:
                    term = term * power(k, m)
            total = total + term
        return total

    # display

    def __str__(self):
        return self.to_string()

    def to_string(self, letter: str = "z") -> str:
        """Parseable text form; letter names the variables (z1, conj(z1), ...)."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            parts.append(_format_term(self.n, e, c, letter))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"HermitianPolynomial(n={self.n}, {self})"


def _format_coeff(c: GaussianRational) -> str:
    if not c.im:
        r = c.re
        if r.denominator == 1:
            return str(r.numerator)
        if r < 0:
            return f"-({-r.numerator}/{r.denominator})"
        return f"({r.numerator}/{r.denominator})"
    return f"({c})"


def _format_term(n: int, e, c: GaussianRational, letter: str = "z") -> str:
    factors = []
    for j in range(n):
        k = e[j]
        if k:
            v = f"{letter}{j + 1}"
            factors.append(v if k == 1 else f"{v}^{k}")
    for j in range(n):
        k = e[n + j]
        if k:
            v = f"conj({letter}{j + 1})"
            factors.append(v if k == 1 else f"{v}^{k}")
    if not factors:
        return _format_coeff(c)
    body = "*".join(factors)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return _format_coeff(c) + "*" + body


def _check_index(n: int, j: int):
    if not 1 <= j <= n:
        raise IndexError(f"variable index {j} out of range 1..{n}")


def arith(a: HermitianPolynomial, b: HermitianPolynomial, op: str) -> HermitianPolynomial:
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")
    if op in ("add", "+"):
        return a + b
    if op in ("sub", "-"):
        return a - b
    if op in ("mul", "*"):
        return a * b
    raise ValueError(f"unknown op {op!r}")


def wirtinger_d(p: HermitianPolynomial, var: int, kind: str = "holomorphic") -> HermitianPolynomial:
    """d/dz_var (kind='holomorphic') or d/dconj(z_var) (kind='antiholomorphic')."""
    if kind in ("holomorphic", "hol"):
        return p.dz(var)
    if kind in ("antiholomorphic", "antihol"):
        return p.dzbar(var)
    raise ValueError(f"unknown derivative kind {kind!r}")


def conjugate(p: HermitianPolynomial) -> HermitianPolynomial:
    return p.conjugate()


def is_real(p: HermitianPolynomial) -> bool:
    return p.is_real()


def evaluate(p: HermitianPolynomial, point: Sequence, mode: str = "float"):
    return p.evaluate(point, mode)


def variables(n: int):
    """Convenience tuple (z_1..z_n, conj z_1..conj z_n)."""
    return tuple(HermitianPolynomial.z(n, j) for j in range(1, n + 1)), tuple(
        HermitianPolynomial.zbar(n, j) for j in range(1, n + 1)
    )


def abs2(p: HermitianPolynomial) -> HermitianPolynomial:
    """p * conj(p)."""
    return p * p.conjugate()


def poly_sum(polys: Iterable[HermitianPolynomial], n: int) -> HermitianPolynomial:
    total = HermitianPolynomial.zero(n)
    for p in polys:
        total = total + p
    return total


def compile_poly(p: HermitianPolynomial):
    """Vectorized float evaluator: f(points) for points of shape (..., n)."""
    import numpy as np

    if not p.terms:
        return lambda pts: np.zeros(np.asarray(pts).shape[:-1], dtype=complex)
    exps = np.array(list(p.terms.keys()), dtype=int)
    coeffs = np.array([complex(c) for c in p.terms.values()])

    def f(pts):
        pts = np.asarray(pts, dtype=complex)
        vals = np.concatenate([pts, pts.conj()], axis=-1)
        mono = np.prod(vals[..., None, :] ** exps, axis=-1)
        return mono @ coeffs

    return f
