"""Cyclic Jacobi eigensolver for real symmetric matrices.

Only elementwise numpy operations are used, so the result does not depend
on BLAS threading.
"""

from __future__ import annotations

import math

import numpy as np

from meaningspace.errors import NumericalError, ValidationError

REL_TOL = 1e-12


def off_norm(a: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part."""
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return math.sqrt(float(np.sum(off * off)))


def jacobi_eigh(a, rel_tol: float = REL_TOL, max_rotations: int | None = None):
    """Eigen-decompose a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` in the order the diagonal ends
    up in (unsorted); column ``k`` of ``eigenvectors`` pairs with
    ``eigenvalues[k]``. Sweeps stop once the off-diagonal Frobenius norm is
    below ``rel_tol`` times the Frobenius norm of the input. Raises
    NumericalError after ``max_rotations`` rotations (default ``100 * n**2``).
    """
    a = np.array(a, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValidationError("matrix has non-finite entries")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(a).max(initial=0)))):
        raise ValidationError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    if n < 2:
        return np.diag(a).copy(), v
    if max_rotations is None:
        max_rotations = 100 * n * n

    fro = math.sqrt(float(np.sum(a * a)))
    target = rel_tol * fro
    # entries this small are left alone; their total stays well under target
    skip = 1e-3 * target / n
    rotations = 0
    while True:
        off = off_norm(a)
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                if rotations >= max_rotations:
                    raise NumericalError(
                        f"Jacobi iteration did not converge after {rotations} rotations; "
                        f"off-diagonal residual norm {off_norm(a):.3e} "
                        f"(target {target:.3e})")
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
                rotations += 1
    return np.diag(a).copy(), v
