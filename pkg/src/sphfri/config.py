"""Numerical tolerances shared by the kernels.

Every field can be overridden from the environment as ``SPHFRI_<NAME>``
(e.g. ``SPHFRI_NULL_GAP=1e-5``).
"""
import dataclasses
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    residual: float = 1e-12
    # sigma_min / sigma_second_min above this means the null space is not 1-D
    null_gap: float = 1e-4
    # sigma_second_min below this fraction of sigma_max: numerical rank too low
    null_rank: float = 1e-13
    vandermonde_cond: float = 1e14
    duplicate_node: float = 1e-14
    zero_node: float = 1e-14
    leading_coeff: float = 1e-14
    amplitude_floor: float = 1e-12

    def replace(self, **changes):
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
        return dataclasses.replace(self, **{k: float(v) for k, v in changes.items()})

    @classmethod
    def from_env(cls, environ=None):
        environ = os.environ if environ is None else environ
        changes = {}
        for f in dataclasses.fields(cls):
            key = "SPHFRI_" + f.name.upper()
            if key in environ:
                changes[f.name] = float(environ[key])
        return cls().replace(**changes)


DEFAULT_TOLERANCES = Tolerances()


def resolve(tol):
    return DEFAULT_TOLERANCES if tol is None else tol
