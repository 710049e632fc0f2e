"""Distortion of relay transmission schemes for a correlated Gaussian source.

Setup (see gauss.py for the normalization): the source spends one
channel use per unit-variance sample S1; the relay knows a correlated
sample S2 (correlation rho) and both terminals transmit over a Gaussian
relay channel with powers p1 and p2, link gains alpha (S-R) and beta
(R-D), unit direct gain and unit noise.  Squared error distortion of
the destination's estimate of S1 is the figure of merit; every scheme
reports the best distortion its feasibility conditions allow.

Schemes
-------
``dt``          source alone, analog scaling of S1 (no relay).
``df``          decode-and-forward that ignores the relay's side
                information (evaluated by running ``jdf`` at rho = 0).
``cf``          compress-and-forward: the relay vector-quantizes its
                channel output with Wyner-Ziv binning against the
                destination's own observation, side information unused.
``uncoded_sc``  the relay transmits a scaled copy of S2 in analog form,
                coherently adding to the source's analog transmission.
``jdf``         joint decode-and-forward: the source codeword carries a
                quantized description S1 + W of the sample; the relay
                decodes it (helped by S2) and re-encodes, giving the
                coherent-combining gain xi at the destination.
``hjdf``        jdf plus a relay power split: a fraction gamma powers
                the jdf re-encoding, the rest carries a quantized copy
                S2 + V of the relay's side information which the
                destination uses as a second observation.
``pjdf``        jdf plus a source power split: a fraction theta powers
                the relay-decoded description S1 + W1 + W2, the rest a
                direct refinement layer the destination decodes after
                subtracting the cooperative part, tightening W1+W2 to W1.
``hpjdf``       both splits at once.
``cutset``      max-flow min-cut lower bound on the distortion of any
                scheme; an optimizer over the input correlation xi.

Quantization noise levels are pinned by the decoding constraints, e.g.
for jdf: the relay needs I(S1; S1+W | S2) at most I(X1;Y1|X2) and the
destination needs I(S1; S1+W) at most I(X1,X2;Y), which in the Gaussian
geometry give

    sigma_w2(xi) = max( (1-rho^2) / ((1-xi^2) alpha p1),
                        1 / (p1 + beta p2 + 2 xi sqrt(beta p1 p2)) ).

When the destination holds two observations S1+W1 and S2+V, the exact
estimate error follows the information form

    1/D = (1 + sv2) / (1 + sv2 - rho^2) + 1 / sw1_2,

i.e. the side-information term enters through the conditional-variance
ratio (1+sv2)/(1+sv2-rho^2), not its reciprocal; tests pin this against
covariance conditioning (gauss.mmse_variance) on the explicit model.

All evaluators are deterministic; internal parameter searches use the
coarse-to-fine grid of boxmin with lexicographic tie-breaks.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .boxmin import BoxSearchConfig, minimize_box
from .gauss import GaussianLinearModel, GaussScenario, mmse_variance

PARAM_KEYS = ("xi", "gamma", "theta", "sigma_w2", "sigma_w1_2", "sigma_v2", "sigma_t2")


class SchemeId(enum.Enum):
    CUTSET = "cutset"
    DIRECT_TX = "dt"
    CLASSIC_DF = "df"
    CLASSIC_CF = "cf"
    UNCODED_SOURCE_COOP = "uncoded_sc"
    JDF = "jdf"
    HJDF = "hjdf"
    PJDF = "pjdf"
    HPJDF = "hpjdf"

    @classmethod
    def from_token(cls, token: str) -> "SchemeId":
        for member in cls:
            if member.value == token:
                return member
        raise ValueError(f"unknown scheme token {token!r}")


@dataclass(frozen=True)
class EvalResult:
    """Distortion of one scheme on one scenario.

    params holds the optimized internal parameters (subset of
    PARAM_KEYS); degeneracy names the reason when a scheme cannot
    operate and reports distortion 1.
    """

    scheme: SchemeId
    distortion: float
    params: dict[str, float] = field(default_factory=dict)
    degeneracy: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.distortion <= 1.0:
            raise ValueError(f"distortion must lie in (0, 1], got {self.distortion!r}")
        for k, v in self.params.items():
            if k not in PARAM_KEYS:
                raise ValueError(f"unknown parameter key {k!r}")
            if math.isnan(v):
                raise ValueError(f"parameter {k} is NaN")


def _safe_div(num, den):
    """num/den with the degenerate-rate conventions: a zero numerator
    means the constraint is vacuous (0), a zero denominator with a
    positive numerator means it can never be met (+inf)."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(num == 0.0, 0.0, np.where(den > 0.0, num / den, np.inf))


def _d_single(sw2):
    """D = Var(S1 | S1 + W) = sw2/(1+sw2), with sw2 = +inf giving 1."""
    sw2 = np.asarray(sw2, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(sw2), 1.0, sw2 / (1.0 + sw2))


def _d_pair(rho: float, sw1_2, sv2):
    """D = Var(S1 | S1 + W1, S2 + V) in the information form
    1/D = (1+sv2)/(1+sv2-rho^2) + 1/sw1_2, tolerant of +inf noise."""
    sw1_2 = np.asarray(sw1_2, dtype=float)
    sv2 = np.asarray(sv2, dtype=float)
    r2 = rho * rho
    with np.errstate(invalid="ignore", divide="ignore"):
        t1 = np.where(np.isinf(sv2), 1.0, (1.0 + sv2) / (1.0 + sv2 - r2))
        t2 = np.where(np.isinf(sw1_2), 0.0, 1.0 / sw1_2)
    return 1.0 / (t1 + t2)


def _sideinfo_quantizer_noise(s: GaussScenario, gamma, xi, jdf_power):
    """Noise sv2 of the relay's analog side-information layer S2 + V.

    The destination decodes this layer first, treating everything else
    as noise: the source signal, the jdf re-encoding (power gamma p2 at
    the relay) and the coherent cross-power between that re-encoding
    and the source's jdf layer (power ``jdf_power``).  Counting the
    cross-power here is what makes the three decoding stages add up to
    exactly the channel mutual information, never more."""
    gamma = np.asarray(gamma, dtype=float)
    xi = np.asarray(xi, dtype=float)
    coherent = 2.0 * xi * np.sqrt(jdf_power * s.beta * gamma * s.p2)
    num = 1.0 + s.p1 + s.beta * gamma * s.p2 + coherent
    den = s.beta * (1.0 - gamma) * s.p2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0.0, num / den, np.inf)


def _sideinfo_prefactor(rho: float, sv2):
    """(1 - rho^2 + sv2)/(1 + sv2): the shrink factor the decoded layer
    S2 + V applies to the destination's remaining uncertainty."""
    sv2 = np.asarray(sv2, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(sv2), 1.0, (1.0 - rho * rho + sv2) / (1.0 + sv2))


# --- per-scheme noise levels (vectorized over the search parameters) ---


def _jdf_sigma_w2(s: GaussScenario, xi):
    xi = np.asarray(xi, dtype=float)
    relay = _safe_div(1.0 - s.rho**2, (1.0 - xi * xi) * s.alpha * s.p1)
    mac = s.p1 + s.beta * s.p2 + 2.0 * xi * np.sqrt(s.beta * s.p1 * s.p2)
    dest = _safe_div(1.0, mac)
    return np.maximum(relay, dest)


def _hjdf_noises(s: GaussScenario, gamma, xi):
    gamma = np.asarray(gamma, dtype=float)
    xi = np.asarray(xi, dtype=float)
    sv2 = _sideinfo_quantizer_noise(s, gamma, xi, s.p1)
    pre = _sideinfo_prefactor(s.rho, sv2)
    relay = _safe_div(1.0 - s.rho**2, (1.0 - xi * xi) * s.alpha * s.p1)
    mac = s.p1 + s.beta * gamma * s.p2 + 2.0 * xi * np.sqrt(s.beta * gamma * s.p1 * s.p2)
    dest = _safe_div(pre, mac)
    return np.maximum(relay, dest), sv2


def _refine_layer_noise(s: GaussScenario, theta, sigma_t2):
    """Tighten the total description noise sigma_t2 = Var(W1) + Var(W2)
    to sw1_2 = Var(W1) using the direct refinement layer of power
    (1 - theta) p1, decoded interference-free after subtraction."""
    theta = np.asarray(theta, dtype=float)
    sigma_t2 = np.asarray(sigma_t2, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_t = np.where(np.isinf(sigma_t2), 0.0, 1.0 / sigma_t2)
        den = (1.0 + (1.0 - theta) * s.p1) * (1.0 + inv_t) - 1.0
        return np.where(den > 0.0, 1.0 / den, np.inf)


def _pjdf_noises(s: GaussScenario, theta, xi):
    theta = np.asarray(theta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    relay_num = (1.0 - s.rho**2) * (1.0 + s.alpha * (1.0 - theta) * s.p1)
    relay = _safe_div(relay_num, (1.0 - xi * xi) * s.alpha * theta * s.p1)
    # only the jdf layer's share theta p1 combines coherently with the
    # relay signal; the direct layer is independent of both
    jdf_power = theta * s.p1
    mac = jdf_power + s.beta * s.p2 + 2.0 * xi * np.sqrt(jdf_power * s.beta * s.p2)
    dest = _safe_div(1.0 + (1.0 - theta) * s.p1, mac)
    sigma_t2 = np.maximum(relay, dest)
    return _refine_layer_noise(s, theta, sigma_t2), sigma_t2


def _hpjdf_noises(s: GaussScenario, theta, gamma, xi):
    theta = np.asarray(theta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    xi = np.asarray(xi, dtype=float)
    jdf_power = theta * s.p1
    sv2 = _sideinfo_quantizer_noise(s, gamma, xi, jdf_power)
    pre = _sideinfo_prefactor(s.rho, sv2)
    relay_num = (1.0 - s.rho**2) * (1.0 + s.alpha * (1.0 - theta) * s.p1)
    relay = _safe_div(relay_num, (1.0 - xi * xi) * s.alpha * theta * s.p1)
    mac = jdf_power + s.beta * gamma * s.p2 + 2.0 * xi * np.sqrt(jdf_power * s.beta * gamma * s.p2)
    dest = _safe_div(pre * (1.0 + (1.0 - theta) * s.p1), mac)
    sigma_t2 = np.maximum(relay, dest)
    return _refine_layer_noise(s, theta, sigma_t2), sigma_t2, sv2


def _cutset_at(s: GaussScenario, xi):
    xi = np.asarray(xi, dtype=float)
    broadcast = (1.0 - s.rho**2) / (1.0 + (1.0 - xi * xi) * (1.0 + s.alpha) * s.p1)
    mac = 1.0 + s.p1 + s.beta * s.p2 + 2.0 * xi * np.sqrt(s.beta * s.p1 * s.p2)
    return np.maximum(broadcast, 1.0 / mac)


# --- fixed-parameter evaluators ---


def jdf_at(s: GaussScenario, xi: float) -> float:
    """jdf distortion at a given input correlation xi in [0, 1]."""
    _check_unit(xi, "xi")
    return float(_d_single(_jdf_sigma_w2(s, xi)))


def hjdf_at(s: GaussScenario, gamma: float, xi: float) -> float:
    """hjdf distortion at a given relay power split gamma and xi."""
    _check_unit(gamma, "gamma")
    _check_unit(xi, "xi")
    sw1_2, sv2 = _hjdf_noises(s, gamma, xi)
    return float(_d_pair(s.rho, sw1_2, sv2))


def pjdf_at(s: GaussScenario, theta: float, xi: float) -> float:
    """pjdf distortion at a given source power split theta and xi."""
    _check_unit(theta, "theta")
    _check_unit(xi, "xi")
    sw1_2, _ = _pjdf_noises(s, theta, xi)
    return float(_d_single(sw1_2))


def hpjdf_at(s: GaussScenario, theta: float, gamma: float, xi: float) -> float:
    """hpjdf distortion at given source/relay power splits and xi."""
    _check_unit(theta, "theta")
    _check_unit(gamma, "gamma")
    _check_unit(xi, "xi")
    sw1_2, _, sv2 = _hpjdf_noises(s, theta, gamma, xi)
    return float(_d_pair(s.rho, sw1_2, sv2))


def _check_unit(v: float, name: str) -> None:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


# --- optimized evaluators ---


def _config(config: BoxSearchConfig | None, dim: int) -> BoxSearchConfig:
    if config is None:
        return BoxSearchConfig(dim=dim)
    if config.dim != dim:
        raise ValueError(f"search config has dim {config.dim}, scheme needs {dim}")
    return config


def direct_transmission(s: GaussScenario) -> EvalResult:
    return EvalResult(SchemeId.DIRECT_TX, 1.0 / (1.0 + s.p1))


def cutset_lower_bound(s: GaussScenario, config: BoxSearchConfig | None = None) -> EvalResult:
    cfg = _config(config, 1)
    pt, val = minimize_box(lambda p: _cutset_at(s, p[:, 0]), cfg, vectorized=True)
    return EvalResult(SchemeId.CUTSET, float(val), {"xi": float(pt[0])})


def jdf(s: GaussScenario, config: BoxSearchConfig | None = None) -> EvalResult:
    return _jdf_like(s, SchemeId.JDF, config)


def classic_df(s: GaussScenario, config: BoxSearchConfig | None = None) -> EvalResult:
    """Decode-and-forward without side information: jdf at rho = 0."""
    blind = dataclasses.replace(s, rho=0.0)
    return _jdf_like(blind, SchemeId.CLASSIC_DF, config)


def _jdf_like(s: GaussScenario, scheme: SchemeId, config: BoxSearchConfig | None) -> EvalResult:
    cfg = _config(config, 1)
    if s.alpha * s.p1 == 0.0 and s.rho**2 < 1.0:
        # the relay cannot decode anything, so the scheme never starts
        return EvalResult(
            scheme, 1.0, {"xi": 0.0, "sigma_w2": math.inf}, degeneracy="relay-link-dead"
        )
    pt, val = minimize_box(lambda p: _d_single(_jdf_sigma_w2(s, p[:, 0])), cfg, vectorized=True)
    xi = float(pt[0])
    return EvalResult(scheme, float(val), {"xi": xi, "sigma_w2": float(_jdf_sigma_w2(s, xi))})


def classic_cf(s: GaussScenario) -> EvalResult:
    """Compress-and-forward with a Gaussian quantizer on the relay's
    channel output, binned against the destination's observation.

    The binning rate balance pins the quantizer noise at
    sq2 = (1 + p1 + alpha p1)/(beta p2); the end-to-end channel rate
    then prices a description of S1 at distortion
    1/(1 + p1 + alpha p1/(1 + sq2)).  Side information is unused."""
    bp2 = s.beta * s.p2
    if bp2 > 0.0:
        sq2 = (1.0 + s.p1 + s.alpha * s.p1) / bp2
        relay_term = s.alpha * s.p1 / (1.0 + sq2)
    else:
        relay_term = 0.0
    return EvalResult(SchemeId.CLASSIC_CF, 1.0 / (1.0 + s.p1 + relay_term))


def uncoded_source_coop(s: GaussScenario) -> EvalResult:
    """Analog transmission of S1 by the source and S2 by the relay.

    The destination sees sqrt(p1) S1 + sqrt(beta p2) S2 + Z; the
    distortion is the exact conditional variance of S1 given that
    single observation, computed by covariance conditioning."""
    c = math.sqrt(s.p1) + s.rho * math.sqrt(s.beta * s.p2)
    v = s.p1 + s.beta * s.p2 + 2.0 * s.rho * math.sqrt(s.p1 * s.beta * s.p2) + 1.0
    model = GaussianLinearModel(np.array([[1.0, c], [c, v]]), target=0, observed=(1,))
    return EvalResult(SchemeId.UNCODED_SOURCE_COOP, mmse_variance(model))


def hjdf(s: GaussScenario, config: BoxSearchConfig | None = None) -> EvalResult:
    cfg = _config(config, 2)

    def objective(p):
        sw1_2, sv2 = _hjdf_noises(s, p[:, 0], p[:, 1])
        return _d_pair(s.rho, sw1_2, sv2)

    pt, val = minimize_box(objective, cfg, vectorized=True)
    gamma, xi = float(pt[0]), float(pt[1])
    sw1_2, sv2 = _hjdf_noises(s, gamma, xi)
    return EvalResult(
        SchemeId.HJDF,
        float(val),
        {"gamma": gamma, "xi": xi, "sigma_v2": float(sv2), "sigma_w1_2": float(sw1_2)},
    )


def pjdf(s: GaussScenario, config: BoxSearchConfig | None = None) -> EvalResult:
    cfg = _config(config, 2)

    def objective(p):
        sw1_2, _ = _pjdf_noises(s, p[:, 0], p[:, 1])
        return _d_single(sw1_2)

    pt, val = minimize_box(objective, cfg, vectorized=True)
    theta, xi = float(pt[0]), float(pt[1])
    sw1_2, sigma_t2 = _pjdf_noises(s, theta, xi)
    return EvalResult(
        SchemeId.PJDF,
        float(val),
        {"theta": theta, "xi": xi, "sigma_t2": float(sigma_t2), "sigma_w1_2": float(sw1_2)},
    )


def hpjdf(s: GaussScenario, config: BoxSearchConfig | None = None) -> EvalResult:
    cfg = _config(config, 3)

    def objective(p):
        sw1_2, _, sv2 = _hpjdf_noises(s, p[:, 0], p[:, 1], p[:, 2])
        return _d_pair(s.rho, sw1_2, sv2)

    pt, val = minimize_box(objective, cfg, vectorized=True)
    theta, gamma, xi = float(pt[0]), float(pt[1]), float(pt[2])
    sw1_2, sigma_t2, sv2 = _hpjdf_noises(s, theta, gamma, xi)
    return EvalResult(
        SchemeId.HPJDF,
        float(val),
        {
            "theta": theta,
            "gamma": gamma,
            "xi": xi,
            "sigma_v2": float(sv2),
            "sigma_t2": float(sigma_t2),
            "sigma_w1_2": float(sw1_2),
        },
    )


_NO_SEARCH = {
    SchemeId.DIRECT_TX: direct_transmission,
    SchemeId.CLASSIC_CF: classic_cf,
    SchemeId.UNCODED_SOURCE_COOP: uncoded_source_coop,
}

_SEARCHED = {
    SchemeId.CUTSET: (cutset_lower_bound, 1),
    SchemeId.JDF: (jdf, 1),
    SchemeId.CLASSIC_DF: (classic_df, 1),
    SchemeId.HJDF: (hjdf, 2),
    SchemeId.PJDF: (pjdf, 2),
    SchemeId.HPJDF: (hpjdf, 3),
}


def evaluate(
    scheme: SchemeId,
    s: GaussScenario,
    coarse_points: int | None = None,
    refine_rounds: int | None = None,
) -> EvalResult:
    """Run one scheme on one scenario, with optional search-budget
    overrides for the schemes that optimize internal parameters."""
    if scheme in _NO_SEARCH:
        return _NO_SEARCH[scheme](s)
    fn, dim = _SEARCHED[scheme]
    kwargs = {}
    if coarse_points is not None:
        kwargs["coarse_points"] = coarse_points
    if refine_rounds is not None:
        kwargs["refine_rounds"] = refine_rounds
    config = BoxSearchConfig(dim=dim, **kwargs) if kwargs else None
    return fn(s, config)
