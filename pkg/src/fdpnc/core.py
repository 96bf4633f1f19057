"""Shared parameter types, validation, unit conversion and random substreams."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "SystemParams",
    "ValidationError",
    "validate",
    "db_to_linear",
    "linear_to_db",
    "substream",
]

#: Violation codes reported by :func:`validate`.
NON_POSITIVE_ENERGY = "NonPositiveEnergy"
NEGATIVE_NOISE = "NegativeNoise"
NEGATIVE_KAPPA = "NegativeKappa"
DEGENERATE_SINR_DENOMINATOR = "DegenerateSinrDenominator"


class ValidationError(ValueError):
    """Raised when a parameter set breaks one or more invariants.

    ``violations`` lists every broken invariant as ``(code, detail)`` pairs so
    callers can report all of them at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(f"{code}: {detail}" for code, detail in self.violations)
        super().__init__(msg)

    @property
    def codes(self):
        return [code for code, _ in self.violations]


@dataclass(frozen=True)
class SystemParams:
    """Scenario constants for the three-node full-duplex relay link.

    All quantities are linear scale.  ``kappa_*`` are amplitude coefficients of
    the residual self-interference, so the residual SI power of node ``i`` is
    ``kappa_i**2 * energy_i``.
    """

    energy_a: float = 1.0
    energy_b: float = 1.0
    energy_r: float = 1.0
    noise_var_a: float = 0.1
    noise_var_b: float = 0.1
    noise_var_r: float = 0.1
    kappa_a: float = 0.0
    kappa_b: float = 0.0
    kappa_r: float = 0.0
    seed: int = 0

    @classmethod
    def symmetric(cls, snr_db=None, *, sigma2=None, kappa=0.0, energy=1.0, seed=0):
        """Common noise variance and common kappa at every node.

        SNR is ``energy / sigma2``; give exactly one of ``snr_db`` or ``sigma2``.
        """
        if (snr_db is None) == (sigma2 is None):
            raise TypeError("give exactly one of snr_db or sigma2")
        if sigma2 is None:
            sigma2 = energy / db_to_linear(snr_db)
        return cls(
            energy_a=energy, energy_b=energy, energy_r=energy,
            noise_var_a=sigma2, noise_var_b=sigma2, noise_var_r=sigma2,
            kappa_a=kappa, kappa_b=kappa, kappa_r=kappa,
            seed=seed,
        )

    def replace(self, **changes) -> "SystemParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        unknown = set(changes) - set(values)
        if unknown:
            raise TypeError(f"unknown SystemParams field(s): {sorted(unknown)}")
        values.update(changes)
        return SystemParams(**values)

    def scaled(self, c: float) -> "SystemParams":
        """Multiply every energy and every noise variance by ``c``."""
        return self.replace(
            energy_a=self.energy_a * c, energy_b=self.energy_b * c, energy_r=self.energy_r * c,
            noise_var_a=self.noise_var_a * c, noise_var_b=self.noise_var_b * c,
            noise_var_r=self.noise_var_r * c,
        )

    @property
    def is_unit_energy(self) -> bool:
        return self.energy_a == self.energy_b == self.energy_r == 1.0


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged if every invariant holds.

    Raises
    ------
    ValidationError
        Carrying one entry per violated invariant.
    """
    problems = []
    for name in ("energy_a", "energy_b", "energy_r"):
        v = getattr(params, name)
        if not (math.isfinite(v) and v > 0):
            problems.append((NON_POSITIVE_ENERGY, f"{name}={v!r} must be > 0"))
    for name in ("noise_var_a", "noise_var_b", "noise_var_r"):
        v = getattr(params, name)
        if not (math.isfinite(v) and v >= 0):
            problems.append((NEGATIVE_NOISE, f"{name}={v!r} must be >= 0"))
    for name in ("kappa_a", "kappa_b", "kappa_r"):
        v = getattr(params, name)
        if not (math.isfinite(v) and v >= 0):
            problems.append((NEGATIVE_KAPPA, f"{name}={v!r} must be >= 0"))
    if not isinstance(params.seed, (int, np.integer)) or not 0 <= params.seed < 2**64:
        problems.append(("InvalidSeed", f"seed={params.seed!r} must be an integer in [0, 2**64)"))

    if not problems:
        # interference-plus-noise power at each receiver
        denominators = {
            "R": params.noise_var_r + params.kappa_r**2 * params.energy_r,
            "A": params.noise_var_a + params.kappa_a**2 * params.energy_a,
            "B": params.noise_var_b + params.kappa_b**2 * params.energy_b,
        }
        for node, d in denominators.items():
            if d <= 0:
                problems.append(
                    (DEGENERATE_SINR_DENOMINATOR,
                     f"noise plus residual SI power at node {node} is zero")
                )
    if problems:
        raise ValidationError(problems)
    return params


def db_to_linear(x_db):
    """``10 ** (x_db / 10)``; works elementwise on arrays."""
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)[()]


def linear_to_db(x):
    """Inverse of :func:`db_to_linear`; input must be strictly positive."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("NonPositiveLinearValue: linear_to_db needs a value > 0")
    return (10.0 * np.log10(x))[()]


def substream(seed: int, *labels: int) -> np.random.Generator:
    """Independent generator addressed by ``(seed, *labels)``.

    Identical arguments give bit-identical sequences.  Different labels map to
    distinct ``SeedSequence`` spawn keys, which numpy guarantees to be
    statistically independent.  Use one generator per owner; never share one
    across threads.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(x) for x in labels))
    return np.random.Generator(np.random.PCG64(ss))
