"""Spherical harmonics, associated Legendre functions and the polynomial
coefficient tables used to peel the harmonic structure off the coefficients.

Conventions: orthonormal harmonics with the Condon-Shortley phase,

    Y_l^m(theta, phi) = N_lm P_l^m(cos theta) exp(i m phi),
    N_lm = sqrt((2l + 1) / (4 pi) * (l - m)! / (l + m)!).
"""
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, PrecisionWarning

__all__ = [
    "MAX_BANDLIMIT",
    "SphDirection",
    "LegendrePolyTable",
    "ShCoefficients",
    "eval_associated_legendre",
    "eval_ylm",
    "eval_ylm_all",
    "ylm_normalization",
    "build_legendre_poly_table",
    "legendre_poly_coefficients",
]

# Beyond this the double-precision triangular solves lose too many digits.
MAX_BANDLIMIT = 32

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SphDirection:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise DomainError(f"theta={self.theta} outside [0, pi]")
        object.__setattr__(self, "phi", float(np.mod(self.phi, TWO_PI)))

    def unit_vector(self):
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


def _check_degree_order(l, m, allow_negative):
    if l < 0 or int(l) != l:
        raise DomainError(f"degree l={l} must be a non-negative integer")
    lo = -l if allow_negative else 0
    if not lo <= m <= l or int(m) != m:
        raise DomainError(f"order m={m} must satisfy {lo} <= m <= {l}")


def eval_associated_legendre(l, m, nu):
    """P_l^m(nu) for 0 <= m <= l, Condon-Shortley phase included.

    Upward recurrence in the degree starting from the sectoral value
    P_m^m = (-1)^m (2m - 1)!! (1 - nu^2)^(m/2). ``nu`` may be an array.
    Negative orders follow from ``P_l^-m = (-1)^m (l-m)!/(l+m)! P_l^m``.
    """
    _check_degree_order(l, m, allow_negative=False)
    nu = np.asarray(nu, dtype=float)
    if np.any(np.abs(nu) > 1.0):
        raise DomainError("|nu| must not exceed 1")

    sin_part = np.sqrt((1.0 - nu) * (1.0 + nu))
    pmm = np.ones_like(nu)
    for k in range(1, m + 1):
        pmm = -pmm * (2 * k - 1) * sin_part
    if l == m:
        return pmm[()]

    p_prev, p_cur = pmm, nu * (2 * m + 1) * pmm
    for n in range(m + 2, l + 1):
        p_prev, p_cur = p_cur, ((2 * n - 1) * nu * p_cur - (n + m - 1) * p_prev) / (n - m)
    return p_cur[()]


def ylm_normalization(l, m):
    """N_lm of the orthonormal harmonic, factorial ratio evaluated via log-gamma."""
    log_ratio = math.lgamma(l - m + 1) - math.lgamma(l + m + 1)
    return math.sqrt((2 * l + 1) / (4 * math.pi)) * math.exp(0.5 * log_ratio)


def eval_ylm(l, m, theta, phi=0.0):
    """Complex spherical harmonic Y_l^m at (theta, phi).

    ``theta`` may be a :class:`SphDirection`, in which case ``phi`` is ignored.
    Scalars or broadcastable arrays are accepted.
    """
    _check_degree_order(l, m, allow_negative=True)
    if isinstance(theta, SphDirection):
        theta, phi = theta.theta, theta.phi
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)

    am = abs(m)
    nu = np.clip(np.cos(theta), -1.0, 1.0)
    val = ylm_normalization(l, am) * eval_associated_legendre(l, am, nu)
    if m < 0 and am % 2:
        # N_{l,-m} P_l^{-m} = (-1)^m N_lm P_l^m
        val = -val
    return (val * np.exp(1j * m * phi))[()]


def eval_ylm_all(L, theta, phi=0.0):
    """Every Y_l^m with l < L at once, shape ``(L, 2L - 1) + theta.shape``.

    Slot ``[l, m + L - 1]``; entries with |m| > l are zero. Same recurrence
    as :func:`eval_associated_legendre`, swept over all orders.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta, phi = np.broadcast_arrays(theta, phi)
    nu = np.clip(np.cos(theta), -1.0, 1.0)
    sin_part = np.sqrt((1.0 - nu) * (1.0 + nu))
    out = np.zeros((L, 2 * L - 1) + theta.shape, dtype=complex)
    pmm = np.ones_like(nu)
    for m in range(L):
        if m > 0:
            pmm = -pmm * (2 * m - 1) * sin_part
        p_prev, p_cur = None, pmm
        phase = np.exp(1j * m * phi)
        for l in range(m, L):
            if l == m + 1:
                p_prev, p_cur = p_cur, nu * (2 * m + 1) * p_cur
            elif l > m + 1:
                p_prev, p_cur = p_cur, ((2 * l - 1) * nu * p_cur - (l + m - 1) * p_prev) / (l - m)
            y = ylm_normalization(l, m) * p_cur
            out[l, m + L - 1] = y * phase
            if m:
                out[l, -m + L - 1] = (-y if m % 2 else y) * np.conj(phase)
    return out


def legendre_poly_coefficients(L):
    """Exact monomial coefficients of the Legendre polynomials P_0..P_{L-1}.

    Bonnet recurrence (n+1) P_{n+1} = (2n+1) nu P_n - n P_{n-1}, carried out
    on coefficient vectors of Fractions. ``out[l][p]`` is the nu^p coefficient.
    """
    polys = [[Fraction(1)], [Fraction(0), Fraction(1)]]
    for n in range(1, L - 1):
        prev, cur = polys[n - 1], polys[n]
        nxt = [Fraction(0)] * (n + 2)
        for p, c in enumerate(cur):
            nxt[p + 1] += (2 * n + 1) * c
        for p, c in enumerate(prev):
            nxt[p] -= n * c
        polys.append([c / (n + 1) for c in nxt])
    return polys[:L]


def _derivative(coeffs):
    return [p * c for p, c in enumerate(coeffs)][1:]


@dataclass(frozen=True)
class LegendrePolyTable:
    """c^p_lm with Y_l^m(theta, 0) = sum_p c^p_lm cos^p(theta) sin^|m|(theta).

    ``coeffs[l, m, p]`` holds non-negative orders; entries with p > l - m
    are zero. Negative orders: c^p_{l,-m} = (-1)^m c^p_{lm}.
    """

    L: int
    coeffs: np.ndarray

    def coeff(self, l, m, p):
        _check_degree_order(l, m, allow_negative=True)
        am = abs(m)
        if p < 0 or p > l - am:
            return 0.0
        c = self.coeffs[l, am, p]
        return -c if (m < 0 and am % 2) else c

    def order_matrix(self, m):
        """Lower-triangular (L-|m|) x (L-|m|) matrix mapping d_{pm} to f_{lm}.

        Row i corresponds to degree l = |m| + i, column j to power p = j.
        """
        am = abs(m)
        if am >= self.L:
            raise DomainError(f"|m|={am} not below L={self.L}")
        n = self.L - am
        mat = self.coeffs[am:, am, :n].copy()
        if m < 0 and am % 2:
            mat = -mat
        return mat

    def evaluate(self, l, m, theta):
        """Y_l^m(theta, 0) rebuilt from the stored coefficients."""
        am = abs(m)
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        poly = np.zeros_like(theta)
        for p in range(l - am, -1, -1):
            poly = poly * c + self.coeff(l, m, p)
        # 0**0 == 1, so theta in {0, pi} with m == 0 is handled exactly
        return (poly * s ** am)[()]

    def to_json(self):
        rows = []
        for l in range(self.L):
            for m in range(l + 1):
                for p in range(l - m + 1):
                    rows.append({"l": l, "m": m, "p": p, "c": float(self.coeffs[l, m, p])})
        return json.dumps({"L": self.L, "coeffs": rows})


def build_legendre_poly_table(L):
    """Coefficient table c^p_lm for all 0 <= m <= l < L.

    The polynomial factor of P_l^m is (-1)^m d^m/dnu^m P_l(nu); the m-fold
    derivative is taken formally on the exact coefficient vectors and the
    result is scaled by N_lm with a single rounding to double.
    """
    if L < 1 or int(L) != L:
        raise DomainError(f"bandlimit L={L} must be a positive integer")
    if L > MAX_BANDLIMIT:
        warnings.warn(
            f"L={L} exceeds the double-precision cap {MAX_BANDLIMIT}; "
            "coefficient tables lose accuracy",
            PrecisionWarning,
            stacklevel=2,
        )
    legendre = legendre_poly_coefficients(L)
    coeffs = np.zeros((L, L, L))
    inv_sqrt_4pi = 1.0 / math.sqrt(4.0 * math.pi)
    for l in range(L):
        deriv = legendre[l]
        for m in range(l + 1):
            # exact squared scale (2l+1)(l-m)!/(l+m)!
            scale_sq = Fraction((2 * l + 1) * math.factorial(l - m), math.factorial(l + m))
            sign = -1 if m % 2 else 1
            for p, c in enumerate(deriv):
                if c == 0:
                    continue
                mag = math.sqrt(c * c * scale_sq)
                coeffs[l, m, p] = sign * math.copysign(mag, c) * inv_sqrt_4pi
            deriv = _derivative(deriv)
    return LegendrePolyTable(L=L, coeffs=coeffs)


class ShCoefficients:
    """Triangle of spherical-harmonic coefficients f_lm for l < L, |m| <= l.

    Stored densely as ``values[l, m + L - 1]``; slots with |m| > l are zero.
    """

    def __init__(self, L, values=None):
        if L < 1 or int(L) != L:
            raise DomainError(f"bandlimit L={L} must be a positive integer")
        self.L = int(L)
        shape = (self.L, 2 * self.L - 1)
        if values is None:
            values = np.zeros(shape, dtype=complex)
        values = np.asarray(values, dtype=complex)
        if values.shape != shape:
            raise DomainError(f"values shape {values.shape} != {shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("non-finite spherical-harmonic coefficient")
        self.values = values

    def _index(self, key):
        l, m = key
        _check_degree_order(l, m, allow_negative=True)
        if l >= self.L:
            raise DomainError(f"degree {l} not below L={self.L}")
        return l, m + self.L - 1

    def __getitem__(self, key):
        return self.values[self._index(key)]

    def __setitem__(self, key, value):
        self.values[self._index(key)] = value

    def __add__(self, other):
        if other.L != self.L:
            raise DomainError("bandlimits differ")
        return ShCoefficients(self.L, self.values + other.values)

    def order_column(self, m):
        """f_lm for l = |m| .. L-1."""
        return self.values[abs(m):, m + self.L - 1].copy()

    def to_dict(self):
        flm = []
        for l in range(self.L):
            for m in range(-l, l + 1):
                v = self[l, m]
                flm.append({"l": l, "m": m, "re": float(v.real), "im": float(v.imag)})
        return {"L": self.L, "flm": flm}

    @classmethod
    def from_dict(cls, data):
        out = cls(int(data["L"]))
        seen = set()
        for row in data["flm"]:
            key = (int(row["l"]), int(row["m"]))
            out[key] = complex(row["re"], row["im"])
            seen.add(key)
        if len(seen) != out.L ** 2:
            raise DomainError(f"coefficient triangle incomplete: {len(seen)} of {out.L ** 2} entries")
        return out
