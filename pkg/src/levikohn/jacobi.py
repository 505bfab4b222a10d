"""Cyclic Jacobi eigenvalue iteration for complex Hermitian matrices."""

import numpy as np

OFF_TOL = 1e-13
MAX_SWEEPS = 100


def _off(a):
    mask = ~np.eye(a.shape[0], dtype=bool)
    return np.sqrt(np.sum(np.abs(a[mask]) ** 2))


def jacobi_eigh(matrix, tol=OFF_TOL, max_sweeps=MAX_SWEEPS):
    """Eigen-decomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvectors as columns).  Rotations are
    applied in a fixed cyclic order so the result is deterministic.
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    a = (a + a.conj().T) / 2
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _off(a) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2 * mag)
                if theta == 0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 1 / (2 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                u = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0
                v[:, idx] = v[:, idx] @ u
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def jacobi_eigvalsh(matrix, tol=OFF_TOL):
    return jacobi_eigh(matrix, tol)[0]
