"""Error-vs-K sweep: random instances, recovery, matching and mean-squared errors."""
import csv
import io
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import CountMismatchError, DomainError, IllConditionedWarning, SphFriError
from .fri_model import InstanceGenConfig, forward_sh_coefficients, generate_instance, great_circle_distance
from .recovery import recover, required_bandlimit

__all__ = [
    "ExperimentConfig",
    "ErrorRecord",
    "match_diracs",
    "compute_errors",
    "run_trial",
    "run_experiment",
    "records_to_csv",
    "CSV_HEADER",
]

log = logging.getLogger(__name__)

CSV_HEADER = ["K", "L", "E_theta", "E_phi", "E_alpha", "trials_succeeded"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep settings. ``L_policy`` is ``"minimal"`` (smallest admissible
    bandlimit) or a mapping K -> L."""

    K_values: tuple = tuple(range(2, 21, 2))
    trials: int = 1000
    seed: int = 0
    L_policy: object = "minimal"
    output_path: str = None
    workers: int = 1
    tol: object = None
    location_distribution: str = "sphere"

    def __post_init__(self):
        object.__setattr__(self, "K_values", tuple(int(k) for k in self.K_values))
        if not self.K_values or min(self.K_values) < 1:
            raise DomainError("K_values must be nonempty positive integers")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")
        if self.L_policy != "minimal":
            missing = [K for K in self.K_values if K not in self.L_policy]
            if missing:
                raise DomainError(f"no bandlimit given for K={missing}")

    def bandlimit(self, K):
        if self.L_policy == "minimal":
            return required_bandlimit(K).L_required
        return int(self.L_policy[K])


@dataclass
class ErrorRecord:
    K: int
    L: int
    E_theta: float
    E_phi: float
    E_alpha: float
    trials_succeeded: int
    trials_failed: int = 0
    failures: dict = field(default_factory=dict, repr=False)


def match_diracs(truth, est):
    """Assignment minimising total great-circle distance.

    Returns ``perm`` with ``est[perm[k]]`` paired to ``truth[k]``.
    """
    if truth.K != len(est.theta):
        raise CountMismatchError(f"{truth.K} true Diracs vs {len(est.theta)} estimates")
    cost = great_circle_distance(
        truth.theta[:, None], truth.phi[:, None], np.asarray(est.theta)[None, :], np.asarray(est.phi)[None, :]
    )
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(truth.K, dtype=int)
    perm[rows] = cols
    return perm


def circular_difference(a, b):
    """Signed shortest angular difference a - b in (-pi, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2 * np.pi) - np.pi
    return np.where(d == -np.pi, np.pi, d)


def compute_errors(truth, est, perm):
    """(E_theta, E_phi, E_alpha): per-Dirac mean squared errors."""
    theta = np.asarray(est.theta)[perm]
    phi = np.asarray(est.phi)[perm]
    alpha = np.asarray(est.alpha)[perm]
    e_theta = float(np.mean((theta - truth.theta) ** 2))
    e_phi = float(np.mean(circular_difference(phi, truth.phi) ** 2))
    e_alpha = float(np.mean(np.abs(alpha - truth.alpha) ** 2))
    return e_theta, e_phi, e_alpha


def trial_rng(seed, K, trial):
    return np.random.default_rng(np.random.SeedSequence([seed, K, trial]))


def run_trial(K, L, seed, trial, tol=None, location_distribution="sphere"):
    """One instance -> coefficients -> recovery -> errors.

    Returns ``(trial, errors)``, with ``errors`` a triple, or a string naming
    the failure when recovery raised.
    """
    gen = InstanceGenConfig(K=K, rng_seed=seed, location_distribution=location_distribution)
    try:
        truth = generate_instance(gen, rng=trial_rng(seed, K, trial))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IllConditionedWarning)
            est = recover(forward_sh_coefficients(truth, L), K, tol=tol)
    except (SphFriError, np.linalg.LinAlgError) as exc:
        return trial, f"{type(exc).__name__}: {exc}"
    return trial, compute_errors(truth, est, match_diracs(truth, est))


def _run_trial_args(args):
    return run_trial(*args)


def _mean(values):
    if not values:
        return math.nan
    return math.fsum(sorted(values)) / len(values)


def aggregate(K, L, outcomes):
    """Average per-trial errors; failed trials are counted, not averaged."""
    ok = [e for _, e in sorted(outcomes, key=lambda o: o[0]) if not isinstance(e, str)]
    failures = {t: e for t, e in outcomes if isinstance(e, str)}
    return ErrorRecord(
        K=K,
        L=L,
        E_theta=_mean([e[0] for e in ok]),
        E_phi=_mean([e[1] for e in ok]),
        E_alpha=_mean([e[2] for e in ok]),
        trials_succeeded=len(ok),
        trials_failed=len(failures),
        failures=failures,
    )


def run_experiment(cfg):
    """Sweep every K in ``cfg.K_values`` and return one ErrorRecord per K.

    Each trial draws from its own seed derived from (seed, K, trial), so the
    output does not depend on ``cfg.workers``. Writes the CSV when
    ``cfg.output_path`` is set.
    """
    tasks = []
    for K in cfg.K_values:
        L = cfg.bandlimit(K)
        tasks.extend((K, L, cfg.seed, t, cfg.tol, cfg.location_distribution) for t in range(cfg.trials))

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_trial_args, tasks, chunksize=max(1, len(tasks) // (8 * cfg.workers))))
    else:
        outcomes = [_run_trial_args(t) for t in tasks]

    records = []
    i = 0
    for K in cfg.K_values:
        L = cfg.bandlimit(K)
        rec = aggregate(K, L, outcomes[i : i + cfg.trials])
        i += cfg.trials
        if rec.trials_failed:
            log.warning("K=%d: %d of %d trials failed", K, rec.trials_failed, cfg.trials)
        records.append(rec)

    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(records_to_csv(records))
    return records


def _fmt(x):
    return "nan" if math.isnan(x) else f"{x:.16e}"


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([r.K, r.L, _fmt(r.E_theta), _fmt(r.E_phi), _fmt(r.E_alpha), r.trials_succeeded])
    return buf.getvalue()
