"""Scenario types and exact Gaussian conditioning for the relay setup.

The whole package works in a normalized geometry: the source emits a
unit-variance Gaussian sample S1, the relay observes a correlated
unit-variance sample S2 (correlation ``rho``), and one channel use is
spent per source sample.  Channel gains are folded into the powers so
the only free quantities are

    p1     received source power at the destination (S-D link SNR),
    alpha  S-R gain relative to the direct link (relay sees alpha*p1),
    p2     relay transmit power,
    beta   R-D gain (destination sees beta*p2 from the relay),

with unit noise variance at both receivers.

``mmse_variance`` is the single source of truth for conditional
variances: every closed-form distortion elsewhere in the package is
checked against it on an explicitly constructed covariance matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SYMMETRY_TOL = 1e-9
PSD_TOL = -1e-9
PINV_CUTOFF = 1e-12


class DegenerateScenarioError(ValueError):
    """Raised when link parameters cannot define a usable scenario."""


class InvalidCovarianceError(ValueError):
    """Raised when a matrix is not a symmetric PSD covariance."""


def db_to_linear(x_db: float) -> float:
    """Convert a decibel value to a linear power ratio."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a positive linear power ratio to decibels."""
    if x <= 0.0:
        raise ValueError(f"dB undefined for non-positive ratio {x!r}")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class GaussScenario:
    """Normalized parameters of one relay-with-side-information instance.

    Implicit normalization: unit source variance, unit direct-link gain,
    unit receiver noise, one channel use per sample (b = 1).
    """

    p1: float
    p2: float
    alpha: float
    beta: float
    rho: float
    b: float = 1.0

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "alpha", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")
        if not (math.isfinite(self.rho) and -1.0 <= self.rho <= 1.0):
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho!r}")
        if self.b != 1.0:
            raise ValueError("only one channel use per source sample is supported")


@dataclass(frozen=True)
class LinkSnrs:
    """Per-link SNRs in dB: source-destination, source-relay, relay-destination."""

    sd_db: float
    sr_db: float
    rd_db: float

    def __post_init__(self) -> None:
        for name in ("sd_db", "sr_db", "rd_db"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")


def scenario_from_snrs(snrs: LinkSnrs, rho: float) -> GaussScenario:
    """Build a scenario from per-link SNRs.

    The relay power is normalized to p2 = 1, so beta carries the whole
    R-D budget; p1 carries the S-D budget and alpha the S-R/S-D ratio.
    """
    p1 = db_to_linear(snrs.sd_db)
    if p1 <= 0.0:
        raise DegenerateScenarioError("source power is zero; relay gain undefined")
    alpha = db_to_linear(snrs.sr_db) / p1
    beta = db_to_linear(snrs.rd_db)
    return GaussScenario(p1=p1, p2=1.0, alpha=alpha, beta=beta, rho=rho)


@dataclass(frozen=True)
class GaussianLinearModel:
    """A zero-mean jointly Gaussian vector with one estimation target.

    cov must be symmetric (tolerance 1e-9) and PSD up to eigenvalue
    round-off of -1e-9.  ``observed`` is the index set conditioned on;
    it may be empty, in which case the prior variance is the answer.
    """

    cov: np.ndarray
    target: int
    observed: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        c = np.asarray(self.cov, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise InvalidCovarianceError(f"covariance must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidCovarianceError("covariance has non-finite entries")
        if np.max(np.abs(c - c.T), initial=0.0) > SYMMETRY_TOL:
            raise InvalidCovarianceError("covariance is not symmetric")
        if np.linalg.eigvalsh(c).min() < PSD_TOL:
            raise InvalidCovarianceError("covariance is not positive semidefinite")
        object.__setattr__(self, "cov", c)
        n = c.shape[0]
        if not 0 <= self.target < n:
            raise ValueError(f"target index {self.target} out of range for dim {n}")
        obs = tuple(sorted(set(int(i) for i in self.observed)))
        for i in obs:
            if not 0 <= i < n:
                raise ValueError(f"observed index {i} out of range for dim {n}")
        if self.target in obs:
            raise ValueError("target cannot be among the observed components")
        object.__setattr__(self, "observed", obs)

    @property
    def dim(self) -> int:
        return self.cov.shape[0]


def mmse_variance(model: GaussianLinearModel) -> float:
    """Exact error variance of the MMSE estimate of the target component.

    Schur complement of the observed block, with a pseudo-inverse so
    singular observation covariances (duplicated or deterministic
    observations) are handled; singular values below 1e-12 times the
    largest are treated as zero.
    """
    c = model.cov
    t = model.target
    obs = list(model.observed)
    prior = float(c[t, t])
    if not obs:
        return prior
    coo = c[np.ix_(obs, obs)]
    cto = c[t, obs]
    inv = np.linalg.pinv(coo, rcond=PINV_CUTOFF)
    v = prior - float(cto @ inv @ cto)
    # round-off guard: a conditional variance lies in [0, prior]
    return min(max(v, 0.0), prior)


def conditional_variance_given_sideinfo(rho: float, noise_var: float) -> float:
    """Var(S1 | S2 + V) for unit-variance (S1, S2) with correlation rho
    and independent noise V of variance ``noise_var`` (may be +inf)."""
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho!r}")
    if math.isnan(noise_var) or noise_var < 0.0:
        raise ValueError(f"noise variance must be >= 0, got {noise_var!r}")
    if math.isinf(noise_var):
        return 1.0
    return 1.0 - rho * rho / (1.0 + noise_var)
