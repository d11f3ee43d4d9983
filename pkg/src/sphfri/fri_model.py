"""Dirac ensembles on the sphere: random instances, exact coefficients, rendering."""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GenerationError
from .sh_core import ShCoefficients, SphDirection, eval_ylm_all

__all__ = [
    "DiracEnsemble",
    "InstanceGenConfig",
    "generate_instance",
    "forward_sh_coefficients",
    "eval_bandlimited",
    "great_circle_distance",
    "unit_vectors",
]

TWO_PI = 2.0 * np.pi
MIN_NODE_GAP = 1e-6


def unit_vectors(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def great_circle_distance(theta1, phi1, theta2, phi2):
    """Pairwise great-circle distances; inputs broadcast like numpy arrays."""
    dot = np.sum(unit_vectors(theta1, phi1) * unit_vectors(theta2, phi2), axis=-1)
    return np.arccos(np.clip(dot, -1.0, 1.0))


@dataclass(frozen=True)
class DiracEnsemble:
    """K weighted Diracs at colatitudes ``theta`` and longitudes ``phi``.

    ``validate=True`` enforces theta strictly inside (0, pi) and pairwise
    distinct nodes x_k = sin(theta_k) exp(-i phi_k). Leave it off to build
    deliberately degenerate signals.
    """

    theta: np.ndarray
    phi: np.ndarray
    alpha: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        phi = np.mod(np.atleast_1d(np.asarray(self.phi, dtype=float)), TWO_PI)
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=complex))
        if not theta.shape == phi.shape == alpha.shape or theta.ndim != 1:
            raise DomainError("theta, phi and alpha must be 1-D and equally long")
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(phi)) and np.all(np.isfinite(alpha))):
            raise DomainError("non-finite Dirac parameter")
        if np.any((theta < 0) | (theta > np.pi)):
            raise DomainError("theta outside [0, pi]")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "alpha", alpha)
        if self.validate:
            if self.K < 1:
                raise DomainError("ensemble needs at least one Dirac")
            if np.any((theta <= 0) | (theta >= np.pi)):
                raise DomainError("Diracs at the poles are not recoverable")
            gap = self.min_node_gap()
            if gap < MIN_NODE_GAP:
                raise DomainError(f"nodes x_k not distinct (min gap {gap:.2e})")

    @property
    def K(self):
        return len(self.theta)

    @property
    def nodes(self):
        """x_k = sin(theta_k) exp(-i phi_k)."""
        return np.sin(self.theta) * np.exp(-1j * self.phi)

    def min_node_gap(self):
        x = self.nodes
        if len(x) < 2:
            return np.inf
        d = np.abs(x[:, None] - x[None, :])
        return float(np.min(d[np.triu_indices(len(x), 1)]))

    def min_separation(self):
        if self.K < 2:
            return np.inf
        d = great_circle_distance(self.theta[:, None], self.phi[:, None], self.theta[None, :], self.phi[None, :])
        return float(np.min(d[np.triu_indices(self.K, 1)]))

    def __or__(self, other):
        return DiracEnsemble(
            np.concatenate([self.theta, other.theta]),
            np.concatenate([self.phi, other.phi]),
            np.concatenate([self.alpha, other.alpha]),
            validate=False,
        )

    def to_dict(self):
        return {
            "K": self.K,
            "diracs": [
                {"theta": float(t), "phi": float(p), "alpha_re": float(a.real), "alpha_im": float(a.imag)}
                for t, p, a in zip(self.theta, self.phi, self.alpha)
            ],
        }

    @classmethod
    def from_dict(cls, data, validate=True):
        diracs = data["diracs"]
        if "K" in data and int(data["K"]) != len(diracs):
            raise DomainError(f"K={data['K']} but {len(diracs)} Diracs listed")
        return cls(
            [d["theta"] for d in diracs],
            [d["phi"] for d in diracs],
            [complex(d["alpha_re"], d["alpha_im"]) for d in diracs],
            validate=validate,
        )


@dataclass(frozen=True)
class InstanceGenConfig:
    """Random-instance settings.

    ``min_separation`` defaults to pi / (3K) radians of great-circle distance.
    ``location_distribution`` is ``"sphere"`` (uniform area) or ``"theta"``
    (theta uniform in (0, pi)).
    """

    K: int
    rng_seed: int = 0
    min_separation: float = None
    amplitude_range: tuple = (-1.0, 1.0)
    location_distribution: str = "sphere"
    min_amplitude: float = 0.0
    max_attempts: int = 100_000

    def __post_init__(self):
        if self.K < 1:
            raise DomainError("K must be at least 1")
        if self.min_separation is None:
            object.__setattr__(self, "min_separation", math.pi / (3 * self.K))
        if not self.min_separation > 0:
            raise DomainError("min_separation must be positive")
        lo, hi = self.amplitude_range
        if not lo < hi:
            raise DomainError("empty amplitude range")
        if self.location_distribution not in ("sphere", "theta"):
            raise DomainError(f"unknown location distribution {self.location_distribution!r}")


def _draw_location(rng, distribution):
    if distribution == "sphere":
        z = rng.uniform(-1.0, 1.0)
        theta = math.acos(z)
    else:
        theta = rng.uniform(0.0, math.pi)
    return theta, rng.uniform(0.0, TWO_PI)


def generate_instance(cfg, rng=None):
    """Random ensemble by sequential rejection sampling.

    A candidate location is kept only if it lies at least
    ``cfg.min_separation`` from every kept Dirac and its node x stays at
    least 1e-6 from every kept node. ``rng`` overrides the seed.
    """
    rng = np.random.default_rng(cfg.rng_seed) if rng is None else rng
    thetas, phis = [], []
    attempts = 0
    while len(thetas) < cfg.K:
        if attempts >= cfg.max_attempts:
            raise GenerationError(
                f"placed {len(thetas)} of {cfg.K} Diracs in {cfg.max_attempts} draws "
                f"(min_separation={cfg.min_separation:.4g})"
            )
        attempts += 1
        theta, phi = _draw_location(rng, cfg.location_distribution)
        if theta <= 0.0 or theta >= math.pi:
            continue
        if thetas:
            t, p = np.array(thetas), np.array(phis)
            if np.min(great_circle_distance(theta, phi, t, p)) < cfg.min_separation:
                continue
            x = math.sin(theta) * np.exp(-1j * phi)
            if np.min(np.abs(np.sin(t) * np.exp(-1j * p) - x)) < MIN_NODE_GAP:
                continue
        thetas.append(theta)
        phis.append(phi)

    lo, hi = cfg.amplitude_range
    alphas = []
    while len(alphas) < cfg.K:
        a = complex(rng.uniform(lo, hi), rng.uniform(lo, hi))
        if abs(a) >= cfg.min_amplitude:
            alphas.append(a)
    return DiracEnsemble(np.array(thetas), np.array(phis), np.array(alphas))


def forward_sh_coefficients(sig, L):
    """f_lm = sum_k alpha_k conj(Y_l^m(theta_k, phi_k)) for l < L."""
    if L < 1 or int(L) != L:
        raise DomainError(f"bandlimit L={L} must be a positive integer")
    y = eval_ylm_all(L, sig.theta, sig.phi)
    return ShCoefficients(L, np.conj(y) @ sig.alpha)


def eval_bandlimited(sig, L, theta, phi=None, flm=None):
    """Truncated expansion sum_{l<L} sum_m f_lm Y_l^m at the given points.

    ``theta`` may be a :class:`SphDirection`. Pass ``flm`` to skip recomputing
    the coefficients.
    """
    if isinstance(theta, SphDirection):
        theta, phi = theta.theta, theta.phi
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if flm is None:
        flm = forward_sh_coefficients(sig, L)
    y = eval_ylm_all(L, theta, phi)
    return np.tensordot(flm.values, y, axes=([0, 1], [0, 1]))[()]
