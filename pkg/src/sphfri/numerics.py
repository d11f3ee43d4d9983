"""Dense kernels: triangular and Vandermonde solves, null vectors, polynomial roots."""
import warnings

import numpy as np

from .config import resolve
from .errors import (
    AmbiguousNullSpaceError,
    DegeneratePolynomialError,
    DomainError,
    DuplicateNodeError,
    IllConditionedWarning,
    SingularDiagonalError,
)

__all__ = [
    "solve_lower_triangular",
    "solve_vandermonde",
    "vandermonde_matrix",
    "smallest_right_singular_vector",
    "polynomial_roots",
    "poly_from_roots",
]


def solve_lower_triangular(A, b):
    """Forward substitution for A x = b with A lower triangular."""
    A = np.asarray(A)
    b = np.asarray(b)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n or b.shape[0] != n:
        raise DomainError(f"shape mismatch: A {A.shape}, b {b.shape}")
    diag = np.diagonal(A)
    if np.any(diag == 0):
        raise SingularDiagonalError(f"zero on the diagonal at index {int(np.argmin(np.abs(diag)))}")
    x = np.zeros(n, dtype=np.result_type(A, b, float))
    for i in range(n):
        x[i] = (b[i] - A[i, :i] @ x[:i]) / A[i, i]
    return x


def vandermonde_matrix(nodes, rows=None):
    """V[m, k] = nodes[k] ** m, m = 0 .. rows-1."""
    nodes = np.asarray(nodes)
    rows = len(nodes) if rows is None else rows
    return nodes[np.newaxis, :] ** np.arange(rows)[:, np.newaxis]


def solve_vandermonde(nodes, rhs, tol=None):
    """Solve sum_k a_k x_k^m = d_m, m = 0..K-1, for the weights a.

    Bjorck-Pereyra elimination for the primal system: O(K^2) operations and
    no pivoting, which keeps the structure and usually beats LU in accuracy
    on clustered nodes.
    """
    tol = resolve(tol)
    x = np.asarray(nodes, dtype=complex)
    a = np.array(rhs, dtype=complex)
    n = len(x)
    if a.shape != (n,):
        raise DomainError(f"need {n} right-hand-side values, got {a.shape}")
    if n == 0:
        return a
    scale = max(1.0, float(np.max(np.abs(x))))
    gaps = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(gaps, np.inf)
    if np.min(gaps) <= tol.duplicate_node * scale:
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        raise DuplicateNodeError(f"nodes {i} and {j} coincide: {x[i]}")

    if n > 1:
        cond = np.linalg.cond(vandermonde_matrix(x))
        if not cond < tol.vandermonde_cond:
            warnings.warn(f"Vandermonde condition number {cond:.3g}", IllConditionedWarning, stacklevel=2)

    for k in range(n - 1):
        for i in range(n - 1, k, -1):
            a[i] -= x[k] * a[i - 1]
    for k in range(n - 2, -1, -1):
        for i in range(k + 1, n):
            a[i] /= x[i] - x[i - k - 1]
        for i in range(k, n - 1):
            a[i] -= a[i + 1]
    return a


def smallest_right_singular_vector(M, tol=None):
    """Unit right singular vector for the smallest singular value of ``M``.

    Returns ``(v, gap)`` with ``gap = sigma_min / sigma_second_min``. Wide
    matrices (rows = cols - 1) have an implicit zero singular value.

    The null space counts as ambiguous when the gap ratio exceeds
    ``tol.null_gap`` or when sigma_second_min is itself at rounding level
    (below ``tol.null_rank * sigma_max``). The second test is what catches a
    two-dimensional null space in a wide matrix, where sigma_min is exactly 0.
    """
    tol = resolve(tol)
    M = np.asarray(M)
    rows, cols = M.shape
    if cols < 2 or rows < cols - 1:
        raise DomainError(f"need cols >= 2 and rows >= cols - 1, got {M.shape}")
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    s = np.concatenate([s, np.zeros(cols - len(s))])
    s_min, s_second = s[-1], s[-2]
    if s_second <= tol.null_rank * s[0]:
        raise AmbiguousNullSpaceError(
            f"null space not one-dimensional: sigma_second/sigma_max = "
            f"{(s_second / s[0]) if s[0] else 0.0:.3e}"
        )
    gap = s_min / s_second
    if gap > tol.null_gap:
        raise AmbiguousNullSpaceError(
            f"null space not one-dimensional: sigma_min/sigma_second = {gap:.3e} "
            f"(sigma_min={s_min:.3e}, sigma_second={s_second:.3e})"
        )
    return vh[-1].conj(), float(gap)


def polynomial_roots(coeffs, polish=False, tol=None):
    """Roots of V(z) = sum_n v_n z^-n, i.e. of v_0 z^K + v_1 z^(K-1) + ... + v_K.

    Eigenvalues of the companion matrix (LAPACK balances it first).
    ``polish`` applies one Newton step per root.
    """
    tol = resolve(tol)
    v = np.asarray(coeffs, dtype=complex)
    if v.ndim != 1 or len(v) < 2:
        raise DomainError("need at least two coefficients")
    if np.abs(v[0]) <= tol.leading_coeff * np.max(np.abs(v)):
        raise DegeneratePolynomialError(f"leading coefficient {v[0]} is numerically zero")
    K = len(v) - 1
    monic = v[1:] / v[0]
    companion = np.zeros((K, K), dtype=complex)
    companion[0, :] = -monic
    companion[np.arange(1, K), np.arange(K - 1)] = 1.0
    roots = np.linalg.eigvals(companion)
    if polish:
        dv = np.polyder(v)
        step = np.polyval(v, roots) / np.polyval(dv, roots)
        roots = np.where(np.isfinite(step), roots - step, roots)
    return roots


def poly_from_roots(roots):
    """Coefficients v_0..v_K of prod_k (1 - x_k z^-1), so v_0 = 1."""
    v = np.array([1.0 + 0j])
    for r in roots:
        v = np.append(v, 0) - r * np.append(0, v)
    return v
