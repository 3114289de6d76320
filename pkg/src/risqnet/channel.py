"""Terahertz link model.

Deterministic attenuation, turbulence-induced fading with shape parameters
derived from the Rytov variance, power-law pointing gain from the
aperture/jitter geometry, and the resulting composite-gain distribution.
The success probability P(h > threshold) is exposed three ways: the Meijer-G
closed form (fast path), adaptive quadrature over the assembled density, and
Monte Carlo over the physical factor model.  The latter two exist so the
first can be distrusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import (
    QuadratureSpec,
    digamma,
    erf,
    gg_pdf_kernel,
    gg_sf,
    integrate,
)

# Table-style absorption figures come in dB/km; gains are assembled in nepers
_DB_PER_KM_TO_NEPERS_PER_M = math.log(10.0) / 1e4


def kappa_from_db_per_km(kappa_db_km: float) -> float:
    return kappa_db_km * _DB_PER_KM_TO_NEPERS_PER_M


@dataclass(frozen=True)
class ThzLinkParams:
    """Carrier and detection figures for one scenario.

    kappa is stored in nepers/meter; use from_db_per_km for the usual
    configuration unit.
    """

    wavelength: float
    kappa: float
    detection_efficiency: float
    gain_threshold: float

    def __post_init__(self) -> None:
        if self.wavelength <= 0.0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if self.kappa < 0.0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if not 0.0 < self.detection_efficiency <= 1.0:
            raise ValueError(
                f"detection_efficiency must be in (0, 1], got {self.detection_efficiency}"
            )
        if self.gain_threshold <= 0.0:
            raise ValueError(f"gain_threshold must be > 0, got {self.gain_threshold}")

    @classmethod
    def from_db_per_km(
        cls,
        wavelength: float,
        kappa_db_km: float,
        detection_efficiency: float,
        gain_threshold: float,
    ) -> "ThzLinkParams":
        return cls(
            wavelength,
            kappa_from_db_per_km(kappa_db_km),
            detection_efficiency,
            gain_threshold,
        )

    @property
    def chi_th(self) -> float:
        """Detection-side gain threshold chi = zeta_th / eta."""
        return self.gain_threshold / self.detection_efficiency


@dataclass(frozen=True)
class TurbulenceParams:
    cn2: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.cn2 <= 0.0:
            raise ValueError(f"cn2 must be > 0, got {self.cn2}")
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise ValueError(
                f"fading shapes must be > 0, got alpha={self.alpha}, beta={self.beta}"
            )

    @classmethod
    def from_cn2(cls, cn2: float, wavelength: float, d: float) -> "TurbulenceParams":
        sigma_r2 = 1.23 * cn2 * (2.0 * math.pi / wavelength) ** (7.0 / 6.0) * d ** (
            11.0 / 6.0
        )
        alpha, beta = gamma_gamma_from_rytov(sigma_r2)
        return cls(cn2, alpha, beta)


@dataclass(frozen=True)
class PointingParams:
    """Power-law pointing gain: h^p = A0 * U^(1/vartheta), U uniform.

    The geometry fields are retained for provenance; vartheta and a0 alone
    define the distribution, so they may also be set directly.
    """

    vartheta: float
    a0: float
    aperture_radius: float | None = None
    divergence: float | None = None
    jitter_sigma: float | None = None

    def __post_init__(self) -> None:
        if self.vartheta <= 0.0:
            raise ValueError(f"vartheta must be > 0, got {self.vartheta}")
        if not 0.0 < self.a0 <= 1.0:
            raise ValueError(f"a0 must be in (0, 1], got {self.a0}")


@dataclass(frozen=True)
class CompositeGainModel:
    h_pl: float
    turbulence: TurbulenceParams
    pointing: PointingParams

    def __post_init__(self) -> None:
        if not 0.0 < self.h_pl <= 1.0:
            raise ValueError(f"h_pl must be in (0, 1], got {self.h_pl}")

    @property
    def gain_scale(self) -> float:
        """Normalization A0 * h_pl mapping physical gain to the unitless z."""
        return self.pointing.a0 * self.h_pl

    def z_of(self, h: float) -> float:
        t = self.turbulence
        return t.alpha * t.beta * h / self.gain_scale


def path_loss(d: float, link: ThzLinkParams) -> float:
    """Spreading plus molecular absorption: (lambda/(4 pi d))^2 e^(-kappa d)."""
    if d <= 0.0:
        raise ValueError(f"distance must be > 0, got {d}")
    spreading = (link.wavelength / (4.0 * math.pi * d)) ** 2
    return spreading * math.exp(-link.kappa * d)


def atmospheric_transmittance(d: float, link: ThzLinkParams) -> float:
    """Absorption-only deterministic gain e^(-kappa d).

    This is the h_pl used in composite-gain assembly: the spreading term of
    path_loss is treated as compensated by the antenna gains of the link
    budget, so the detection threshold acts on the normalized gain.
    """
    if d <= 0.0:
        raise ValueError(f"distance must be > 0, got {d}")
    return math.exp(-link.kappa * d)


def rytov_variance(t: TurbulenceParams, wavelength: float, d: float) -> float:
    if d < 0.0:
        raise ValueError(f"distance must be >= 0, got {d}")
    k = 2.0 * math.pi / wavelength
    return 1.23 * t.cn2 * k ** (7.0 / 6.0) * d ** (11.0 / 6.0)


def phase_damping_prob(sigma_r2: float) -> float:
    if sigma_r2 < 0.0:
        raise ValueError(f"sigma_r2 must be >= 0, got {sigma_r2}")
    return erf(sigma_r2)


def gamma_gamma_from_rytov(sigma_r2: float) -> tuple[float, float]:
    """Plane-wave fading shape parameters (alpha, beta) from Rytov variance."""
    if sigma_r2 <= 0.0:
        raise ValueError(f"sigma_r2 must be > 0, got {sigma_r2}")
    s125 = sigma_r2 ** (6.0 / 5.0)
    ea = 0.49 * sigma_r2 / (1.0 + 1.11 * s125) ** (7.0 / 6.0)
    eb = 0.51 * sigma_r2 / (1.0 + 0.69 * s125) ** (5.0 / 6.0)
    # expm1 keeps the weak-turbulence limit (alpha, beta -> inf) exact
    return 1.0 / math.expm1(ea), 1.0 / math.expm1(eb)


def pointing_params_from_geometry(
    r_a: float, phi_d: float, sigma_theta: float, d: float
) -> PointingParams:
    """Severity ratio and collection ceiling from aperture/jitter geometry."""
    if min(r_a, phi_d, sigma_theta, d) <= 0.0:
        raise ValueError("aperture, divergence, jitter, and distance must be > 0")
    w_z = 0.5 * phi_d * d
    v = math.sqrt(math.pi / 2.0) * r_a / w_z
    erf_v = erf(v)
    a0 = erf_v * erf_v
    sigma_s = sigma_theta * d
    # vartheta = w_z^2 sqrt(pi) erf(v) e^(v^2) / (2 v * 4 sigma_s^2); the
    # e^(v^2) factor overflows for wide apertures, so assemble in log space
    # and cap: beyond ~1e18 the pointing gain is deterministic anyway
    log_vt = (
        2.0 * math.log(w_z)
        + 0.5 * math.log(math.pi)
        + math.log(erf_v)
        + v * v
        - math.log(2.0 * v)
        - math.log(4.0 * sigma_s * sigma_s)
    )
    vartheta = math.exp(min(log_vt, math.log(1e18)))
    return PointingParams(
        vartheta=vartheta,
        a0=a0,
        aperture_radius=r_a,
        divergence=phi_d,
        jitter_sigma=sigma_theta,
    )


def composite_model_at_distance(
    d: float,
    link: ThzLinkParams,
    cn2: float,
    r_a: float,
    phi_d: float,
    sigma_theta: float,
) -> CompositeGainModel:
    """Assemble the full gain model for one end-to-end path length."""
    return CompositeGainModel(
        h_pl=atmospheric_transmittance(d, link),
        turbulence=TurbulenceParams.from_cn2(cn2, link.wavelength, d),
        pointing=pointing_params_from_geometry(r_a, phi_d, sigma_theta, d),
    )


def composite_gain_pdf(model: CompositeGainModel, h: float) -> float:
    """Density of the composite gain h = h_pl * h_a * h_p at h > 0."""
    if h <= 0.0:
        raise ValueError(f"gain must be > 0, got {h}")
    t = model.turbulence
    jac = t.alpha * t.beta / model.gain_scale
    return jac * gg_pdf_kernel(t.alpha, t.beta, model.pointing.vartheta, model.z_of(h))


def sample_composite_gain(model: CompositeGainModel, rng: np.random.Generator) -> float:
    t, p = model.turbulence, model.pointing
    h_a = float(rng.gamma(t.alpha, 1.0 / t.alpha)) * float(rng.gamma(t.beta, 1.0 / t.beta))
    h_p = p.a0 * float(rng.uniform(0.0, 1.0)) ** (1.0 / p.vartheta)
    return model.h_pl * h_a * h_p


def sample_rician_gain(k_factor: float, rng: np.random.Generator) -> float:
    """Unit-mean Rician power gain, for sensitivity studies only.

    The closed-form success probability assumes the Gamma-Gamma fading
    model; this sampler is deliberately not wired into it.
    """
    if k_factor < 0.0:
        raise ValueError(f"k_factor must be >= 0, got {k_factor}")
    nu = math.sqrt(k_factor / (k_factor + 1.0))
    sigma = math.sqrt(0.5 / (k_factor + 1.0))
    re = nu + sigma * float(rng.normal())
    im = sigma * float(rng.normal())
    return re * re + im * im


def _clamp_probability(v: float) -> float:
    if v < 0.0:
        if v >= -1e-9:
            return 0.0
        raise ValueError(f"probability {v} out of [0, 1] beyond tolerance")
    if v > 1.0:
        if v <= 1.0 + 1e-9:
            return 1.0
        raise ValueError(f"probability {v} out of [0, 1] beyond tolerance")
    return v


def success_probability(model: CompositeGainModel, link: ThzLinkParams) -> float:
    """P(h > chi_th) by the closed-form survival function."""
    t = model.turbulence
    z_th = model.z_of(link.chi_th)
    return _clamp_probability(gg_sf(t.alpha, t.beta, model.pointing.vartheta, z_th))


def _log_z_window(alpha: float, beta: float, vt: float) -> tuple[float, float]:
    # location/scale of ln Z from the factor decomposition; 45 sigma covers
    # the distribution body at any shape
    def trig(x: float) -> float:
        h = 1e-5 * max(1.0, abs(x))
        return (digamma(x + h) - digamma(x - h)) / (2.0 * h)

    mu = digamma(alpha) + digamma(beta) - 1.0 / vt
    sig = math.sqrt(trig(alpha) + trig(beta) + 1.0 / vt**2)
    return mu - 45.0 * sig - 5.0, mu + 45.0 * sig + 5.0


def success_probability_quadrature(
    model: CompositeGainModel,
    link: ThzLinkParams,
    spec: QuadratureSpec | None = None,
) -> float:
    """Oracle: 1 - integral of the gain density below the threshold.

    Integrates in log space, sliced across the distribution body, so narrow
    weak-turbulence densities cannot slip between quadrature nodes.
    """
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=2000)
    t = model.turbulence
    vt = model.pointing.vartheta
    z_th = model.z_of(link.chi_th)
    if z_th <= 0.0:
        return 1.0
    x_lo, x_hi_body = _log_z_window(t.alpha, t.beta, vt)
    x_th = math.log(z_th)
    x_lo = min(x_lo, x_th - 60.0)
    x_hi = min(x_th, x_hi_body)
    if x_hi <= x_lo:
        # threshold sits below the entire distribution body
        return 1.0

    def f(x: float) -> float:
        if abs(x) > 700.0:
            return 0.0
        z = math.exp(x)
        return gg_pdf_kernel(t.alpha, t.beta, vt, z) * z

    edges = np.linspace(x_lo, x_hi, 41)
    cdf = sum(integrate(f, float(a), float(b), spec)[0] for a, b in zip(edges, edges[1:]))
    return _clamp_probability(1.0 - cdf)


def success_probability_mc(
    model: CompositeGainModel,
    link: ThzLinkParams,
    n: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Oracle: empirical exceedance fraction with its binomial standard error."""
    if n < 1000:
        raise ValueError(f"need n >= 1000 samples for a usable error bar, got {n}")
    t, p = model.turbulence, model.pointing
    h_a = rng.gamma(t.alpha, 1.0 / t.alpha, size=n) * rng.gamma(t.beta, 1.0 / t.beta, size=n)
    h_p = p.a0 * rng.uniform(0.0, 1.0, size=n) ** (1.0 / p.vartheta)
    h = model.h_pl * h_a * h_p
    hits = int(np.count_nonzero(h > link.chi_th))
    p_hat = hits / n
    se = math.sqrt(p_hat * (1.0 - p_hat) / n)
    return p_hat, se


def transmissivity(varsigma: float, h_pl: float, h_f: float, h_p: float) -> float:
    """End-to-end photonic transmissivity: reflection efficiency times gains."""
    for name, v in (("varsigma", varsigma), ("h_pl", h_pl), ("h_f", h_f), ("h_p", h_p)):
        if v < 0.0:
            raise ValueError(f"{name} must be >= 0, got {v}")
    return varsigma * h_pl * h_f * h_p
