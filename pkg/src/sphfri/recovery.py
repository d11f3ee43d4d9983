"""Annihilating-filter recovery of Dirac parameters from harmonic coefficients.

Pipeline: peel the Legendre structure off f_lm order by order to get the
exponential mixtures d_pm, stack their sliding windows into the annihilating
matrix Z, take its null vector as filter taps, root the filter to get the
nodes x_k = sin(theta_k) exp(-i phi_k), then two Vandermonde solves give
alpha_k and alpha_k cos(theta_k).
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import resolve
from .errors import (
    AmplitudeFloorError,
    BandlimitError,
    DomainError,
    InsufficientRowsError,
    SphFriError,
    ZeroNodeError,
)
from .numerics import (
    polynomial_roots,
    smallest_right_singular_vector,
    solve_lower_triangular,
    solve_vandermonde,
    vandermonde_matrix,
)
from .sh_core import ShCoefficients, build_legendre_poly_table

__all__ = [
    "BandlimitPlan",
    "DpmSequences",
    "RecoveryDiagnostics",
    "RecoveryResult",
    "required_bandlimit",
    "extract_dpm",
    "synthesize_flm",
    "build_annihilating_matrix",
    "annihilating_row_count",
    "estimate_xk",
    "recover_phi",
    "recover_alpha",
    "recover_theta",
    "recover",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class BandlimitPlan:
    K: int
    L_required: int
    max_rows: int
    L_two_k: int
    L_k_sqrt_k: int


def annihilating_row_count(K, L):
    """Rows of Z when every window is used: (L - K)(L - K + 1)."""
    n = max(L - K, 0)
    return n * (n + 1)


def required_bandlimit(K):
    """Smallest L with L >= K + sqrt(K + 1/4) - 1/2, plus the 2K and
    ceil(K + sqrt(K)) bandlimits of the earlier methods for comparison.

    Integer arithmetic: the bound is equivalent to (L - K)(L - K + 1) >= K.
    """
    if K < 1 or int(K) != K:
        raise DomainError(f"K={K} must be a positive integer")
    K = int(K)
    n = 0
    while n * (n + 1) < K:
        n += 1
    L = K + n
    r = math.isqrt(K)
    k_sqrt_k = K + r + (r * r < K)
    return BandlimitPlan(K=K, L_required=L, max_rows=annihilating_row_count(K, L), L_two_k=2 * K, L_k_sqrt_k=k_sqrt_k)


@lru_cache(maxsize=64)
def _table(L):
    return build_legendre_poly_table(L)


class DpmSequences:
    """d_pm for |m| < L, 0 <= p < L - |m|, stored as ``values[p, m + L - 1]``."""

    def __init__(self, L, values):
        self.L = int(L)
        values = np.asarray(values, dtype=complex)
        if values.shape != (self.L, 2 * self.L - 1):
            raise DomainError(f"values shape {values.shape} does not match L={L}")
        self.values = values

    def __getitem__(self, key):
        p, m = key
        if abs(m) >= self.L or not 0 <= p < self.L - abs(m):
            raise DomainError(f"d[{p}, {m}] outside the index set for L={self.L}")
        return self.values[p, m + self.L - 1]

    def positive(self, p, count):
        """d_{p,0}, d_{p,1}, ..., d_{p,count-1}."""
        return np.array([self[p, m] for m in range(count)])

    def conj_negative(self, p, count):
        """conj(d_{p,0}), conj(d_{p,-1}), ..., conj(d_{p,-(count-1)})."""
        return np.conj([self[p, -m] for m in range(count)])


def extract_dpm(flm, K=None):
    """Solve f_lm = sum_p c^p_lm d_pm (l = |m| .. L-1) for every order m.

    With ``K`` given the bandlimit is checked against the requirement first.
    """
    L = flm.L
    if K is not None and L < required_bandlimit(K).L_required:
        raise BandlimitError(f"L={L} below the required {required_bandlimit(K).L_required} for K={K}")
    table = _table(L)
    values = np.zeros((L, 2 * L - 1), dtype=complex)
    for m in range(-(L - 1), L):
        d = solve_lower_triangular(table.order_matrix(m), flm.order_column(m))
        values[: len(d), m + L - 1] = d
    return DpmSequences(L, values)


def synthesize_flm(d):
    """Inverse of :func:`extract_dpm`: f_lm = sum_p c^p_lm d_pm."""
    L = d.L
    table = _table(L)
    flm = ShCoefficients(L)
    for m in range(-(L - 1), L):
        n = L - abs(m)
        flm.values[abs(m):, m + L - 1] = table.order_matrix(m) @ d.values[:n, m + L - 1]
    return flm


def _windows(seq, K):
    # rows [s_j, s_{j-1}, ..., s_{j-K}] for j from len-1 down to K
    return np.array([seq[j - K : j + 1][::-1] for j in range(len(seq) - 1, K - 1, -1)]).reshape(-1, K + 1)


def build_annihilating_matrix(d, K):
    """Stack all length-(K+1) descending windows of d_pm and conj(d_{p,-m}).

    Block order per p: the positive-order windows, then the conjugated
    negative-order windows. Every p with at least one window contributes.
    """
    L = d.L
    blocks = []
    for p in range(L):
        n = L - p
        if n < K + 1:
            break
        blocks.append(_windows(d.positive(p, n), K))
        blocks.append(_windows(d.conj_negative(p, n), K))
    rows = sum(len(b) for b in blocks)
    if rows < K:
        raise InsufficientRowsError(f"only {rows} annihilating rows for K={K} at L={L}")
    return np.vstack(blocks)


def estimate_xk(Z, K, tol=None, polish=False):
    """Nodes x_k as roots of the filter spanning the null space of Z.

    Returns ``(x, v, gap)``: the K roots, the unit filter taps and the
    singular-value ratio sigma_min / sigma_second_min.
    """
    Z = np.asarray(Z)
    if Z.shape[1] != K + 1:
        raise DomainError(f"Z has {Z.shape[1]} columns, expected K+1={K + 1}")
    v, gap = smallest_right_singular_vector(Z, tol=tol)
    return polynomial_roots(v, polish=polish, tol=tol), v, gap


def recover_phi(xk, tol=None):
    """phi_k = -arg(x_k), wrapped into [0, 2 pi)."""
    tol = resolve(tol)
    xk = np.asarray(xk, dtype=complex)
    if np.any(np.abs(xk) <= tol.zero_node):
        raise ZeroNodeError("node at the origin: a Dirac sits on a pole, longitude undefined")
    phi = np.mod(-np.angle(xk), TWO_PI)
    # -0.0 and values rounding up to 2 pi
    return np.where(phi >= TWO_PI, 0.0, phi) + 0.0


def _vandermonde_residual(x, a, rhs):
    r = vandermonde_matrix(x) @ a - rhs
    return float(np.linalg.norm(r) / max(np.linalg.norm(rhs), np.finfo(float).tiny))


def recover_alpha(xk, d, tol=None):
    """Amplitudes from sum_k alpha_k x_k^m = d_{0m}, m = 0..K-1."""
    K = len(xk)
    return solve_vandermonde(xk, d.positive(0, K), tol=tol)


def recover_theta(xk, alpha_est, d, tol=None):
    """Colatitudes from sum_k (alpha_k cos theta_k) x_k^m = d_{1m}.

    Returns ``(theta, info)``; ``info`` counts arccos clamps and reports the
    largest discarded imaginary part of the cosine estimate.
    """
    tol = resolve(tol)
    xk = np.asarray(xk, dtype=complex)
    alpha_est = np.asarray(alpha_est, dtype=complex)
    K = len(xk)
    small = np.abs(alpha_est) < tol.amplitude_floor
    if np.any(small):
        raise AmplitudeFloorError(f"|alpha| = {np.min(np.abs(alpha_est)):.3e} below floor {tol.amplitude_floor:g}")
    beta = solve_vandermonde(xk, d.positive(1, K), tol=tol)
    cos_est = beta / alpha_est
    re = cos_est.real
    clamped = int(np.count_nonzero(np.abs(re) > 1.0))
    theta = np.arccos(np.clip(re, -1.0, 1.0))
    info = {
        "arccos_clamped": clamped,
        "cos_imag_residue": float(np.max(np.abs(cos_est.imag))) if K else 0.0,
        "beta": beta,
    }
    return theta, info


@dataclass
class RecoveryDiagnostics:
    null_gap: float
    annihilation_residual: float
    z_norm: float
    vand_res_alpha: float
    vand_res_theta: float
    arccos_clamped: int
    cos_imag_residue: float = 0.0

    def to_dict(self):
        return {
            "null_gap": self.null_gap,
            "annihilation_residual": self.annihilation_residual,
            "vand_res_alpha": self.vand_res_alpha,
            "vand_res_theta": self.vand_res_theta,
            "arccos_clamped": self.arccos_clamped,
        }


@dataclass
class RecoveryResult:
    theta: np.ndarray
    phi: np.ndarray
    alpha: np.ndarray
    diagnostics: RecoveryDiagnostics
    nodes: np.ndarray = field(default=None, repr=False)

    @property
    def K(self):
        return len(self.theta)

    def to_dict(self):
        # canonical order: by theta, then phi
        order = np.lexsort((self.phi, self.theta))
        return {
            "K": self.K,
            "diracs": [
                {
                    "theta": float(self.theta[i]),
                    "phi": float(self.phi[i]),
                    "alpha_re": float(self.alpha[i].real),
                    "alpha_im": float(self.alpha[i].imag),
                }
                for i in order
            ],
            "diagnostics": self.diagnostics.to_dict(),
        }


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SphFriError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def recover(flm, K, tol=None, polish=False):
    """Recover K Diracs from the coefficient triangle ``flm``.

    Errors from every stage propagate with ``exc.stage`` naming the step.
    """
    if K < 1 or int(K) != K:
        raise DomainError(f"K={K} must be a positive integer")
    K = int(K)
    d = _stage("extract_dpm", extract_dpm, flm, K)
    Z = _stage("build_annihilating_matrix", build_annihilating_matrix, d, K)
    xk, v, gap = _stage("estimate_xk", estimate_xk, Z, K, tol=tol, polish=polish)
    phi = _stage("recover_phi", recover_phi, xk, tol=tol)
    alpha = _stage("recover_alpha", recover_alpha, xk, d, tol=tol)
    theta, info = _stage("recover_theta", recover_theta, xk, alpha, d, tol=tol)

    diagnostics = RecoveryDiagnostics(
        null_gap=gap,
        annihilation_residual=float(np.max(np.abs(Z @ v))),
        z_norm=float(np.linalg.norm(Z)),
        vand_res_alpha=_vandermonde_residual(xk, alpha, d.positive(0, K)),
        vand_res_theta=_vandermonde_residual(xk, info["beta"], d.positive(1, K)),
        arccos_clamped=info["arccos_clamped"],
        cos_imag_residue=info["cos_imag_residue"],
    )
    return RecoveryResult(theta=theta, phi=phi, alpha=alpha, diagnostics=diagnostics, nodes=xk)


def result_from_dict(data):
    """Parse RecoveryResult JSON back into arrays (diagnostics kept as a dict)."""
    diracs = data["diracs"]
    return RecoveryResult(
        theta=np.array([r["theta"] for r in diracs], dtype=float),
        phi=np.array([r["phi"] for r in diracs], dtype=float),
        alpha=np.array([complex(r["alpha_re"], r["alpha_im"]) for r in diracs]),
        diagnostics=RecoveryDiagnostics(**{**data["diagnostics"], "z_norm": float("nan")}),
    )
