"""Varieties and submanifolds in the boundary.

Real tangent vectors use the interleaved layout (x_1, y_1, ..., x_n, y_n);
the complex structure J sends d/dx_j to d/dy_j and d/dy_j to -d/dx_j, which
in complex coordinates z_j = x_j + i y_j is multiplication by i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateRankError,
    DimensionMismatch,
    InputError,
    KindMismatch,
    NoSamplesError,
    NotInBoundaryError,
    NotTangentError,
    OffBoundaryError,
    OffVarietyError,
    RankJumpError,
)
from .groebner import radical_membership
from .jacobi import jacobi_eigh
from .levi import (
    BOUNDARY_TOL,
    DefiningFunction,
    complex_to_real,
    levi_matrix_on_frame,
    orthonormal_frame_at,
    real_gradient,
    real_to_complex,
)
from .poly import HermitianPolynomial, compile_poly

log = logging.getLogger(__name__)

ANGLE_TOL = 1e-7
RANK_TOL = 1e-8


# --- types -------------------------------------------------------------------

@dataclass(frozen=True)
class VarietyIdeal:
    """Real generators cutting out V; the boundary equation is added by callers that need it."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(self.generators)
        for g in gens:
            if not g.is_real():
                raise InputError("variety generators must be real polynomials")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_complex(cls, gens: Sequence[HermitianPolynomial]) -> "VarietyIdeal":
        """Real and imaginary parts of complex generators, deduplicated."""
        from .kohn import canonical

        out, seen = [], set()
        for g in gens:
            parts = [g] if g.is_real() else [g.real_part(), g.imag_part()]
            for p in parts:
                if p.is_zero():
                    continue
                key = canonical(p)
                if key in seen:
                    continue
                seen.add(key)
                out.append(key)
        return cls(tuple(out))

    @property
    def n(self) -> int | None:
        return self.generators[0].n if self.generators else None

    def with_boundary(self, d: DefiningFunction) -> "VarietyIdeal":
        if d.r in self.generators:
            return self
        return VarietyIdeal(self.generators + (d.r,))


@dataclass(frozen=True)
class PolyVectorField:
    """A (1,0) field sum a_j d/dz_j (kind 'holomorphic', n coefficients) or a
    real field sum a_j d/dx_j + b_j d/dy_j (kind 'real', 2n coefficients)."""

    coefficients: tuple
    kind: str = "real"

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if self.kind not in ("real", "holomorphic"):
            raise InputError(f"unknown field kind {self.kind!r}")
        if not coeffs:
            raise InputError("vector field needs coefficients")
        n = coeffs[0].n
        want = 2 * n if self.kind == "real" else n
        if len(coeffs) != want:
            raise DimensionMismatch(
                f"{self.kind} field in C^{n} needs {want} coefficients, got {len(coeffs)}"
            )

    @property
    def n(self) -> int:
        return self.coefficients[0].n

    def apply(self, f: HermitianPolynomial) -> HermitianPolynomial:
        """Derivative of f along the field."""
        total = HermitianPolynomial.zero(self.n)
        if self.kind == "holomorphic":
            for j, a in enumerate(self.coefficients, start=1):
                if not a.is_zero():
                    total = total + a * f.dz(j)
            return total
        for j in range(1, self.n + 1):
            a, b = self.coefficients[2 * j - 2], self.coefficients[2 * j - 1]
            if not a.is_zero():
                total = total + a * f.dx(j)
            if not b.is_zero():
                total = total + b * f.dy(j)
        return total

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def real_fields(self) -> tuple:
        """(L + conj L, i(L - conj L)) for a (1,0) field; itself for a real one."""
        if self.kind == "real":
            return (self,)
        xs, jxs = [], []
        for a in self.coefficients:
            re, im = a.real_part(), a.imag_part()
            xs += [re, im]
            jxs += [-im, re]
        return PolyVectorField(tuple(xs), "real"), PolyVectorField(tuple(jxs), "real")

    def evaluate(self, point) -> np.ndarray:
        vals = np.array([c.evaluate(point) for c in self.coefficients])
        return vals.real if self.kind == "real" else vals


@dataclass(frozen=True)
class BracketFlag:
    dims: tuple
    depth: int
    finite_type: bool
    base_point: tuple
    manifold_dim: int
    complex_manifold: bool = False


@dataclass(frozen=True)
class HoloMap:
    """Holomorphic polynomial map from C^d (parameters w) to C^n."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise InputError("holomorphic map needs components")
        for c in comps:
            if not c.is_holomorphic():
                raise InputError("map component depends on conj(w); not holomorphic")

    @property
    def params(self) -> int:
        return self.components[0].n


@dataclass(frozen=True)
class TangencyResult:
    order: int | None
    identically_zero: bool
    inconclusive: bool
    composition: HermitianPolynomial


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    max_violation: float
    samples: int

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class HolomorphicDimensionReport:
    value: int
    table: tuple  # one dict per radius
    rank_jumps: bool


# --- linear algebra ----------------------------------------------------------

def apply_J(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0::2] = -v[..., 1::2]
    out[..., 1::2] = v[..., 0::2]
    return out


def null_space(A: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal rows spanning ker A."""
    A = np.atleast_2d(A)
    ncols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(ncols)
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 0.0)))
    return vh[rank:].conj()


def row_basis(A: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal rows spanning the row space of A."""
    A = np.atleast_2d(A)
    if A.size == 0:
        return A.reshape(0, A.shape[-1])
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vh[:rank]


def rank(A: np.ndarray, tol: float = RANK_TOL) -> int:
    return len(row_basis(A, tol))


def intersect(A: np.ndarray, B: np.ndarray, tol: float = ANGLE_TOL) -> np.ndarray:
    """Rows spanning the intersection of two row spaces (principal angles).

    Both inputs must have orthonormal rows; directions whose principal angle
    cosine exceeds 1 - tol are kept.
    """
    if len(A) == 0 or len(B) == 0:
        return np.zeros((0, A.shape[-1]), dtype=A.dtype)
    u, s, _ = np.linalg.svd(A.conj() @ B.T)
    k = int(np.sum(s > 1 - tol))
    return (u[:, :k].T @ A) if k else np.zeros((0, A.shape[1]), dtype=A.dtype)


def complex_part(T: np.ndarray, tol: float = ANGLE_TOL) -> np.ndarray:
    """Largest J-invariant subspace of a real subspace, as complex rows in C^n."""
    n = T.shape[1] // 2
    if len(T) == 0:
        return np.zeros((0, n), dtype=complex)
    JT = row_basis(apply_J(T))
    inv = intersect(T, JT, tol)
    if len(inv) == 0:
        return np.zeros((0, n), dtype=complex)
    return row_basis(real_to_complex(inv).astype(complex))


# --- real polynomial systems -------------------------------------------------

class _System:
    def __init__(self, gens: Sequence[HermitianPolynomial]):
        self.gens = tuple(gens)
        self.values = [compile_poly(g) for g in self.gens]
        self.grads = [real_gradient(g) for g in self.gens]

    def residual(self, z) -> np.ndarray:
        return np.array([f(z).real for f in self.values])

    def jacobian(self, z) -> np.ndarray:
        if not self.gens:
            return np.zeros((0, 2 * len(z)))
        return np.array([g(z) for g in self.grads])

    def project(self, x: np.ndarray, iters: int = 60, tol: float = 1e-13):
        """Gauss-Newton (minimum-norm steps) onto the zero set; None if it fails."""
        if not self.gens:
            return x
        for _ in range(iters):
            z = real_to_complex(x)
            F = self.residual(z)
            if np.max(np.abs(F)) <= tol:
                return x
            J = self.jacobian(z)
            step, *_ = np.linalg.lstsq(J, F, rcond=None)
            x = x - step
            if not np.all(np.isfinite(x)):
                return None
        z = real_to_complex(x)
        return x if np.max(np.abs(self.residual(z))) <= 1e-10 else None


def _sample_on(system: _System, center: np.ndarray, radius: float, count: int,
               rng: np.random.Generator, max_tries: int | None = None) -> list:
    """Points of the zero set within ``radius`` of ``center`` (real layout)."""
    dim = len(center)
    out = []
    for _ in range(max_tries or 20 * count):
        if len(out) >= count:
            break
        u = rng.normal(size=dim)
        u *= radius * rng.random() ** (1 / dim) / np.linalg.norm(u)
        x = system.project(center + u)
        if x is None or np.linalg.norm(x - center) > radius:
            continue
        out.append(x)
    return out


# --- operations --------------------------------------------------------------

def levi_kernel_at(d: DefiningFunction, point, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal rows (ambient C^n vectors) spanning the radical of the Levi form at p."""
    frame = orthonormal_frame_at(d, point)
    V = np.array(frame.vectors)
    A = levi_matrix_on_frame(d, frame).as_array()
    w, vecs = jacobi_eigh(A)
    null = vecs[:, np.abs(w) < tol]
    # null vectors a of A give kernel coefficients conj(a) on the frame
    return (null.conj().T @ V).reshape(-1, d.n)


def tangent_spaces_at(V: VarietyIdeal, point, tol: float = RANK_TOL, n: int | None = None):
    """(real basis of T_pV as rows in R^2n, complex basis of T^C_pV as rows in C^n)."""
    point = tuple(complex(c) for c in point)
    n = n or V.n or len(point)
    system = _System(V.generators)
    res = system.residual(np.array(point))
    if len(res) and np.max(np.abs(res)) > BOUNDARY_TOL:
        raise OffVarietyError(f"point is off the variety: residual {np.max(np.abs(res)):.3e}")
    J = system.jacobian(np.array(point))
    T = null_space(J, tol) if len(J) else np.eye(2 * n)
    T = np.real(T)
    return T, complex_part(T)


def _intersection_dim(A: np.ndarray, B: np.ndarray, tol: float) -> int:
    return len(intersect(A, B, tol))


def holomorphic_dimension(d: DefiningFunction, V: VarietyIdeal, z0, radius: float = 0.5,
                          samples: int = 12, seed: int = 0, tol: float = ANGLE_TOL,
                          levels: int = 5, kernel_tol: float = 1e-9) -> HolomorphicDimensionReport:
    """sup over shrinking neighbourhoods of the inf of dim(T^C V cap Ker L).

    Radii radius * 2^-k, k < levels, are sampled; points where the Jacobian
    rank drops below the generic rank are treated as singular and skipped.
    """
    n = d.n
    z0 = np.array([complex(c) for c in z0])
    full = V.with_boundary(d)
    system = _System(full.generators)
    if np.max(np.abs(system.residual(z0))) > BOUNDARY_TOL:
        raise OffVarietyError("base point is not on V and the boundary")
    rng = np.random.default_rng(seed)
    x0 = complex_to_real(z0)
    table = []
    rank_jumps = False
    best = None
    for k in range(levels):
        rad = radius * 2.0 ** (-k)
        pts = [x0] + _sample_on(system, x0, rad, samples, rng)
        infos = []
        for x in pts:
            z = real_to_complex(x)
            J = system.jacobian(z)
            infos.append((x, rank(J)))
        generic = max(r for _, r in infos)
        smooth = [x for x, r in infos if r == generic]
        skipped = len(infos) - len(smooth)
        rank_jumps = rank_jumps or skipped > 0
        dims = []
        for x in smooth:
            z = real_to_complex(x)
            try:
                _, TC = tangent_spaces_at(full, z, n=n)
                K = levi_kernel_at(d, z, kernel_tol)
            except (OffBoundaryError, OffVarietyError):
                continue
            dims.append(_intersection_dim(TC, K, tol))
        if not dims:
            table.append({"radius": rad, "points": 0, "min_dim": None, "singular_skipped": skipped})
            continue
        m = min(dims)
        table.append({"radius": rad, "points": len(dims), "min_dim": m,
                      "singular_skipped": skipped, "rank": generic})
        best = m if best is None else max(best, m)
    if best is None:
        raise NoSamplesError("no sample points found on V and the boundary")
    return HolomorphicDimensionReport(best, tuple(table), rank_jumps)


def complex_tangential_check(d: DefiningFunction, M: VarietyIdeal, samples: int = 12,
                             seed: int = 0, tol: float = 1e-7, center=None,
                             radius: float = 1.0) -> CheckResult:
    """Check TM inside T bOmega cap J T bOmega on sampled points of M."""
    n = d.n
    center = np.zeros(n, dtype=complex) if center is None else np.array([complex(c) for c in center])
    system = _System(M.generators)
    rng = np.random.default_rng(seed)
    pts = _sample_on(system, complex_to_real(center), radius, samples, rng)
    if not pts:
        raise NoSamplesError("no sample points found on M")
    rgrad = real_gradient(d.r)
    rval = compile_poly(d.r)
    worst = 0.0
    for x in pts:
        z = real_to_complex(x)
        if abs(rval(z)) > BOUNDARY_TOL:
            raise NotInBoundaryError(f"M leaves the boundary: |r| = {abs(rval(z)):.3e}")
        T = np.real(null_space(system.jacobian(z)))
        g = rgrad(z)
        gn = np.linalg.norm(g)
        if gn == 0:
            raise InputError("dr vanishes on M")
        for X in T:
            worst = max(worst, abs(g @ X) / gn, abs(g @ apply_J(X)) / gn)
    return CheckResult(bool(worst < tol), float(worst), len(pts))


def lie_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """[X, Y] with components X(Y_k) - Y(X_k)."""
    if X.kind != Y.kind:
        raise KindMismatch(f"cannot bracket {X.kind} with {Y.kind} field")
    if X.n != Y.n:
        raise DimensionMismatch("fields live in different dimensions")
    coeffs = tuple(X.apply(b) - Y.apply(a) for a, b in zip(X.coefficients, Y.coefficients))
    return PolyVectorField(coeffs, X.kind)


def _real_field_list(fields):
    out = []
    for f in fields:
        out.extend(f.real_fields())
    return out


def bracket_flag(fields: Sequence[PolyVectorField], M: VarietyIdeal, point, max_depth: int = 4,
                 tol: float = RANK_TOL, n: int | None = None,
                 check_tangent: bool = True) -> BracketFlag:
    """Dimensions of L^0 c L^1 c ... where L^j adds brackets [X_0, L^(j-1)] at p."""
    point = tuple(complex(c) for c in point)
    n = n or (fields[0].n if fields else M.n)
    real = _real_field_list(fields)
    system = _System(M.generators)
    res = system.residual(np.array(point))
    if len(res) and np.max(np.abs(res)) > BOUNDARY_TOL:
        raise OffVarietyError("base point is not on M")
    if check_tangent:
        for X in real:
            for g in M.generators:
                Xg = X.apply(g)
                if not radical_membership(Xg, M.generators):
                    raise NotTangentError(f"field is not tangent to M: X(g) = {Xg}")
    J = system.jacobian(np.array(point))
    dim_m = 2 * n - (rank(J, tol) if len(J) else 0)

    def values(fs):
        if not fs:
            return np.zeros((0, 2 * n))
        return np.array([f.evaluate(point) for f in fs])

    span = values(real)
    current = rank(span, tol)
    if current % 2:
        raise DegenerateRankError(
            f"odd rank {current} for T^C M at the point; move to a nearby generic point"
        )
    dims = [current]
    level = real
    for _ in range(max_depth):
        if current >= dim_m or not level:
            break
        new = []
        seen = set()
        for X0 in real:
            for W in level:
                B = lie_bracket(X0, W)
                if B.is_zero() or B.coefficients in seen:
                    continue
                seen.add(B.coefficients)
                new.append(B)
        if len(new) > 256:
            # keep the fields that matter at p, in enumeration order
            kept, basis = [], span
            for B in new:
                trial = np.vstack([basis, values([B])])
                if rank(trial, tol) > rank(basis, tol):
                    kept.append(B)
                    basis = trial
            new = kept
        span = np.vstack([span, values(new)]) if new else span
        r = rank(span, tol)
        dims.append(r - current)
        current = r
        level = new
    while len(dims) > 1 and dims[-1] == 0:
        dims.pop()
    complex_manifold = dims[0] == dim_m and dim_m > 0
    finite = current == dim_m and sum(dims[1:]) >= 1
    return BracketFlag(tuple(dims), len(dims) - 1, finite, point, dim_m, complex_manifold)


def involutivity_check(fields: Sequence[PolyVectorField], M: VarietyIdeal | None = None,
                       samples: int = 8, seed: int = 0, tol: float = 1e-8, center=None,
                       radius: float = 1.0) -> CheckResult:
    """Pairwise brackets stay in the pointwise span of the fields on sampled points."""
    real = _real_field_list(fields)
    if not real:
        return CheckResult(True, 0.0, 0)
    n = real[0].n
    center = np.zeros(n, dtype=complex) if center is None else np.array([complex(c) for c in center])
    rng = np.random.default_rng(seed)
    system = _System(M.generators if M is not None else ())
    pts = _sample_on(system, complex_to_real(center), radius, samples, rng)
    if not pts:
        raise NoSamplesError("no sample points found on M")
    brackets = [lie_bracket(real[i], real[j]) for i in range(len(real)) for j in range(i + 1, len(real))]
    worst = 0.0
    ranks = set()
    for x in pts:
        z = tuple(real_to_complex(x))
        F = np.array([f.evaluate(z) for f in real])
        ranks.add(rank(F, tol))
        for B in brackets:
            b = B.evaluate(z)
            coef, *_ = np.linalg.lstsq(F.T, b, rcond=None)
            worst = max(worst, float(np.linalg.norm(F.T @ coef - b)))
    if len(ranks) > 1:
        raise RankJumpError(f"field rank varies across samples: {sorted(ranks)}")
    return CheckResult(bool(worst < tol), float(worst), len(pts))


def tangency_order(d: DefiningFunction, phi: HoloMap, max_order: int = 24) -> TangencyResult:
    """Lowest degree of r composed with phi, exactly, in (w, conj w)."""
    if len(phi.components) != d.n:
        raise DimensionMismatch(f"map has {len(phi.components)} components, expected {d.n}")
    base = [c.constant_term() for c in phi.components]
    val = d.r.evaluate(base, mode="exact")
    if val:
        raise OffBoundaryError(f"phi(0) is not on the boundary: r(phi(0)) = {val}")
    images = list(phi.components) + [c.conjugate() for c in phi.components]
    comp = d.r.substitute(images)
    if comp.is_zero():
        return TangencyResult(None, True, False, comp)
    order = comp.low_degree()
    if order > max_order:
        return TangencyResult(None, False, True, comp)
    return TangencyResult(order, False, False, comp)
