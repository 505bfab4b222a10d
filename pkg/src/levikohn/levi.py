"""Complex Hessian, Levi form on tangent frames and pointwise classification."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateFrameError,
    DimensionMismatch,
    InputError,
    NotRealError,
    OffBoundaryError,
)
from .gaussian import GaussianRational
from .jacobi import jacobi_eigh, jacobi_eigvalsh
from .poly import HermitianPolynomial, compile_poly
from .polymatrix import det

log = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-8
SIGNATURE_TOL = 1e-9


@dataclass(frozen=True)
class DefiningFunction:
    """Real polynomial r with the domain on the side r < 0."""

    r: HermitianPolynomial

    def __post_init__(self):
        if not self.r.is_real():
            raise NotRealError("defining function is not real")

    @property
    def n(self) -> int:
        return self.r.n

    def value(self, point) -> complex:
        return self.r.evaluate(point)


@dataclass(frozen=True)
class HermitianMetric:
    """Constant Hermitian metric H, or the graph-frame metric.

    ``kind="graph"`` is the metric in which the graph frame
    e_j - (r_{z_j}/r_{z_n}) e_n is orthonormal at every point; it changes
    from point to point and is the convention of the classical C^3 example.
    """

    H: tuple | None = None
    kind: str = "constant"

    def __post_init__(self):
        if self.kind == "graph":
            return
        if self.kind != "constant" or self.H is None:
            raise InputError("metric must be 'graph' or carry a constant matrix")
        H = [[GaussianRational.coerce(c) for c in row] for row in self.H]
        m = len(H)
        if any(len(row) != m for row in H):
            raise InputError("metric matrix must be square")
        for i in range(m):
            for j in range(m):
                if H[i][j] != H[j][i].conjugate():
                    raise InputError("metric matrix is not Hermitian")
        for k in range(1, m + 1):
            minor = _exact_det([row[:k] for row in H[:k]])
            if not (minor.is_real() and minor.re > 0):
                raise InputError("metric matrix is not positive definite")
        object.__setattr__(self, "H", tuple(tuple(row) for row in H))

    @classmethod
    def identity(cls, n: int) -> "HermitianMetric":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def graph(cls) -> "HermitianMetric":
        return cls(None, "graph")

    def matrix(self) -> np.ndarray:
        return np.array([[complex(c) for c in row] for row in self.H])


def _exact_det(m):
    k = len(m)
    if k == 1:
        return m[0][0]
    total = GaussianRational(0)
    for j in range(k):
        sub = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _exact_det(sub)
        total = total + term if j % 2 == 0 else total - term
    return total


@dataclass(frozen=True)
class TangentFrame:
    """(1,0) vectors spanning T^C bOmega.

    Symbolic frames hold polynomial entries.  When the graph derivative is not
    a constant, the vectors are multiplied by ``scale`` = r_{z_k} to stay
    polynomial, and the Levi matrix on the frame carries the factor |scale|^2.
    """

    vectors: tuple
    symbolic: bool
    base_point: tuple | None = None
    scale: HermitianPolynomial | None = None
    direction: int | None = None


@dataclass(frozen=True)
class LeviFrameMatrix:
    entries: tuple
    frame: TangentFrame
    metric: HermitianMetric | None = None

    @property
    def symbolic(self) -> bool:
        return self.frame.symbolic

    @property
    def size(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        if self.symbolic:
            raise TypeError("symbolic matrix; evaluate first")
        return np.array(self.entries, dtype=complex)

    def evaluate(self, point) -> np.ndarray:
        if not self.symbolic:
            return self.as_array()
        return np.array([[e.evaluate(point) for e in row] for row in self.entries])


@dataclass(frozen=True)
class ClassificationReport:
    point: tuple
    q: int
    eigenvalues: tuple
    signature: tuple
    q_margin: float
    pseudoconvex: bool
    q_convex: bool
    z_q: bool
    tol: float = SIGNATURE_TOL
    metric: str = "identity"


# --- symbolic data -----------------------------------------------------------

def complex_hessian(d: DefiningFunction) -> tuple:
    """Matrix with entry (i, j) = d^2 r / dz_i dconj(z_j)."""
    n = d.n
    return tuple(
        tuple(d.r.dz(i).dzbar(j) for j in range(1, n + 1)) for i in range(1, n + 1)
    )


def gradient_form(d: DefiningFunction) -> tuple:
    """Coefficients of dr's (1,0) part: (dr/dz_1, ..., dr/dz_n)."""
    return tuple(d.r.dz(j) for j in range(1, d.n + 1))


def _check_on_boundary(d: DefiningFunction, point, tol: float):
    if len(point) != d.n:
        raise DimensionMismatch(f"point has {len(point)} coordinates, expected {d.n}")
    val = d.value(point)
    if abs(val) > tol:
        raise OffBoundaryError(f"point is off the boundary: |r(p)| = {abs(val):.3e} > {tol:g}")


def graph_frame(d: DefiningFunction, point=None, direction: int | None = None,
                tol: float = BOUNDARY_TOL) -> TangentFrame:
    """Frame L_j = e_j - (r_{z_j}/r_{z_k}) e_k, j != k, where k = direction.

    Without a point the frame is symbolic.  With a point the vectors are
    complex numbers and the call checks p in bOmega and r_{z_k}(p) != 0.
    """
    n = d.n
    k = n if direction is None else direction
    if not 1 <= k <= n:
        raise IndexError(f"graph direction {k} out of range 1..{n}")
    grad = gradient_form(d)
    others = [j for j in range(1, n + 1) if j != k]
    if point is None:
        gk = grad[k - 1]
        if gk.is_zero():
            raise DegenerateFrameError("frame direction degenerate: r_{z_k} vanishes identically")
        zero = HermitianPolynomial.zero(n)
        one = HermitianPolynomial.constant(n, 1)
        vectors = []
        if gk.is_constant():
            inv = gk.constant_term().inverse()
            for j in others:
                v = [zero] * n
                v[j - 1] = one
                v[k - 1] = -(grad[j - 1] * inv)
                vectors.append(tuple(v))
            scale = None
        else:
            for j in others:
                v = [zero] * n
                v[j - 1] = gk
                v[k - 1] = -grad[j - 1]
                vectors.append(tuple(v))
            scale = gk
        return TangentFrame(tuple(vectors), True, None, scale, k)
    point = tuple(complex(c) for c in point)
    _check_on_boundary(d, point, tol)
    g = [c.evaluate(point) for c in grad]
    if abs(g[k - 1]) < 1e-14:
        raise DegenerateFrameError("frame direction degenerate: r_{z_k}(p) = 0")
    vectors = []
    for j in others:
        v = [0j] * n
        v[j - 1] = 1 + 0j
        v[k - 1] = -g[j - 1] / g[k - 1]
        vectors.append(tuple(v))
    return TangentFrame(tuple(vectors), False, point, None, k)


def levi_matrix_on_frame(d: DefiningFunction, frame: TangentFrame,
                         metric: HermitianMetric | None = None) -> LeviFrameMatrix:
    """Entry (i, j) = sum_ab v_i[a] r_{a conj b} conj(v_j[b])."""
    hess = complex_hessian(d)
    n = d.n
    vs = frame.vectors
    if frame.symbolic:
        conj_vs = [tuple(c.conjugate() for c in v) for v in vs]
        entries = []
        for vi in vs:
            row_h = [
                sum((vi[a] * hess[a][b] for a in range(n) if not vi[a].is_zero() and not hess[a][b].is_zero()),
                    HermitianPolynomial.zero(n))
                for b in range(n)
            ]
            entries.append(tuple(
                sum((row_h[b] * cvj[b] for b in range(n)), HermitianPolynomial.zero(n))
                for cvj in conj_vs
            ))
        return LeviFrameMatrix(tuple(entries), frame, metric)
    R = hessian_at(d, frame.base_point)
    V = np.array(vs, dtype=complex)
    A = V @ R @ V.conj().T
    A = (A + A.conj().T) / 2
    return LeviFrameMatrix(tuple(map(tuple, A)), frame, metric)


def hessian_at(d: DefiningFunction, point) -> np.ndarray:
    return np.array([[e.evaluate(point) for e in row] for row in complex_hessian(d)])


def frame_trace_det(m: LeviFrameMatrix):
    """Trace and determinant of a Levi matrix (symbolic or numeric)."""
    k = m.size
    if m.symbolic:
        n = m.frame.vectors[0][0].n if k else 1
        if k == 0:
            return HermitianPolynomial.zero(n), HermitianPolynomial.constant(n, 1)
        trace = sum((m.entries[i][i] for i in range(k)), HermitianPolynomial.zero(n))
        return trace, det([list(row) for row in m.entries], n)
    A = m.as_array()
    return complex(np.trace(A)), complex(np.linalg.det(A))


# --- pointwise numerics ------------------------------------------------------

def complex_tangent_basis(grad: np.ndarray) -> np.ndarray:
    """Rows spanning {v : sum grad_a v_a = 0}, pivoting on the largest entry."""
    n = len(grad)
    k = int(np.argmax(np.abs(grad)))
    rows = []
    for j in range(n):
        if j == k:
            continue
        v = np.zeros(n, dtype=complex)
        v[j] = 1
        v[k] = -grad[j] / grad[k]
        rows.append(v)
    return np.array(rows).reshape(n - 1, n)


def gram_schmidt(vectors: np.ndarray, H: np.ndarray | None = None) -> np.ndarray:
    """Orthonormalize rows with respect to <u, w> = w^H H u."""
    H = np.eye(vectors.shape[1]) if H is None else H
    out = []
    for v in vectors:
        w = v.astype(complex)
        for _ in range(2):
            for u in out:
                w = w - (u.conj() @ H @ w) * u
        norm = np.sqrt(np.real(w.conj() @ H @ w))
        if norm < 1e-14:
            raise DegenerateFrameError("frame vectors are linearly dependent")
        out.append(w / norm)
    return np.array(out).reshape(len(out), vectors.shape[1])


def orthonormal_frame_at(d: DefiningFunction, point, metric: HermitianMetric | None = None,
                         tol: float = BOUNDARY_TOL) -> TangentFrame:
    """Metric-orthonormal frame of T^C_p bOmega (rows of the returned frame)."""
    point = tuple(complex(c) for c in point)
    _check_on_boundary(d, point, tol)
    g = np.array([c.evaluate(point) for c in gradient_form(d)])
    if np.max(np.abs(g)) < 1e-14:
        raise DegenerateFrameError("dr vanishes at the point")
    if metric is not None and metric.kind == "graph":
        return graph_frame(d, point, tol=tol)
    H = None if metric is None else metric.matrix()
    basis = gram_schmidt(complex_tangent_basis(g), H)
    return TangentFrame(tuple(map(tuple, basis)), False, point)


def numeric_levi_matrix(d: DefiningFunction, point, metric: HermitianMetric | None = None,
                        tol: float = BOUNDARY_TOL) -> np.ndarray:
    frame = orthonormal_frame_at(d, point, metric, tol)
    return levi_matrix_on_frame(d, frame, metric).as_array()


def signature(eigenvalues, tol: float = SIGNATURE_TOL):
    pos = sum(1 for x in eigenvalues if x >= tol)
    neg = sum(1 for x in eigenvalues if x <= -tol)
    return pos, neg, len(eigenvalues) - pos - neg


def q_margin(A, q: int) -> float:
    """Sum of the q smallest eigenvalues of a Hermitian matrix.

    By Ky Fan this is the minimum of trace(Q^H A Q) over orthonormal n x q Q.
    """
    w = jacobi_eigvalsh(np.asarray(A, dtype=complex))
    if not 0 <= q <= len(w):
        raise InputError(f"q must lie in 0..{len(w)}")
    return float(np.sum(w[:q]))


def classify_point(d: DefiningFunction, point, q: int, metric: HermitianMetric | None = None,
                   tol: float = SIGNATURE_TOL, boundary_tol: float = BOUNDARY_TOL) -> ClassificationReport:
    """Eigen-signature, q-convexity margin, pseudoconvexity and Z(q) at a point.

    The margin is the sum of the q smallest eigenvalues of the Levi form in a
    metric-orthonormal frame, i.e. the minimum of its trace over complex
    q-planes.
    """
    n = d.n
    if not 1 <= q <= n - 1:
        raise InputError(f"q must lie in 1..{n - 1}")
    A = numeric_levi_matrix(d, point, metric, boundary_tol)
    w, _ = jacobi_eigh(A)
    sig = signature(w, tol)
    margin = float(np.sum(w[:q]))
    n_pos, n_neg, _ = sig
    return ClassificationReport(
        point=tuple(complex(c) for c in point),
        q=q,
        eigenvalues=tuple(float(x) for x in w),
        signature=sig,
        q_margin=margin,
        pseudoconvex=bool(w[0] >= -tol),
        q_convex=margin > tol,
        z_q=(n_pos >= n - q) or (n_neg >= q + 1),
        tol=tol,
        metric="identity" if metric is None else ("graph" if metric.kind == "graph" else "constant"),
    )


# --- boundary sampling -------------------------------------------------------

def real_to_complex(x: np.ndarray) -> np.ndarray:
    """(x1, y1, x2, y2, ...) -> (x1 + i y1, ...)."""
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def complex_to_real(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def real_gradient(p: HermitianPolynomial):
    """Evaluator of the real gradient (d/dx_1, d/dy_1, ...) of a real polynomial."""
    n = p.n
    parts = []
    for j in range(1, n + 1):
        parts.append(compile_poly(p.dx(j)))
        parts.append(compile_poly(p.dy(j)))

    def grad(pts):
        return np.stack([f(pts).real for f in parts], axis=-1)

    return grad


def sample_boundary(d: DefiningFunction, box: Sequence[Sequence[float]], count: int,
                    seed: int, grid: int = 64, max_lines: int | None = None,
                    residual: float = 1e-12) -> list:
    """Deterministic boundary points found on random lines through a real box.

    ``box`` lists (lo, hi) for x_1, y_1, ..., x_n, y_n.  Each line is scanned
    on a grid for a sign change of r, bisected, then polished by Newton.
    """
    n = d.n
    if count < 1:
        raise InputError("count must be >= 1")
    box = np.asarray(box, dtype=float)
    if box.shape != (2 * n, 2):
        raise DimensionMismatch(f"box must have {2 * n} (lo, hi) rows")
    lo, hi = box[:, 0], box[:, 1]
    rng = np.random.default_rng(seed)
    f = compile_poly(d.r)
    grad = real_gradient(d.r)
    max_lines = max_lines or 50 * count
    points = []
    for _ in range(max_lines):
        if len(points) >= count:
            break
        a = lo + (hi - lo) * rng.random(2 * n)
        u = rng.normal(size=2 * n)
        u /= np.linalg.norm(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (lo - a) / u
            t2 = (hi - a) / u
        tmin = np.max(np.where(u != 0, np.minimum(t1, t2), -np.inf))
        tmax = np.min(np.where(u != 0, np.maximum(t1, t2), np.inf))
        ts = np.linspace(tmin, tmax, grid)
        xs = a + ts[:, None] * u
        vals = f(real_to_complex(xs)).real
        if np.any(vals == 0):
            i = int(np.flatnonzero(vals == 0)[0])
            t = ts[i]
        else:
            change = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
            if not len(change):
                continue
            i = int(change[0])
            ta, tb, fa = ts[i], ts[i + 1], vals[i]
            for _ in range(60):
                tm = 0.5 * (ta + tb)
                fm = f(real_to_complex(a + tm * u)).real
                if np.sign(fm) == np.sign(fa):
                    ta, fa = tm, fm
                else:
                    tb = tm
                if tb - ta < 1e-13:
                    break
            t = 0.5 * (ta + tb)
            for _ in range(8):
                x = a + t * u
                fx = f(real_to_complex(x)).real
                if abs(fx) <= residual * 1e-3:
                    break
                dfx = grad(real_to_complex(x)) @ u
                if dfx == 0:
                    break
                t_new = t - fx / dfx
                if not (ta - 1e-9 <= t_new <= tb + 1e-9):
                    break
                t = t_new
        x = a + t * u
        if abs(f(real_to_complex(x)).real) <= residual and np.all(x >= lo - 1e-12) and np.all(x <= hi + 1e-12):
            points.append(tuple(real_to_complex(x)))
    if len(points) < count:
        warnings.warn(
            f"sample_boundary found {len(points)} of {count} requested points",
            RuntimeWarning,
            stacklevel=2,
        )
    return points
