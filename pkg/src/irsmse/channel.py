"""Geometry, large-scale fading, and channel generation for an
IRS-assisted single-user MISO downlink.

The layout is two dimensional: an access point (AP) with ``m`` antennas,
an intelligent reflecting surface (IRS) with ``n`` passive elements and a
single-antenna user. Three links exist:

* AP -> IRS, matrix ``G`` of shape ``(n, m)`` (Rician),
* IRS -> user, vector ``h_r`` of shape ``(n,)`` (Rician),
* AP -> user, vector ``h_d`` of shape ``(m,)`` (Rayleigh).

Large-scale attenuation follows ``L(d) = l0 * d**(-alpha)``. Channel state
information is imperfect: the true channel is the estimate plus an i.i.d.
zero-mean complex Gaussian error whose per-entry variance is specified
*relative* to the link attenuation, i.e. an error setting ``sigma2``
realizes per-entry variance ``sigma2 * L(link)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SystemDims:
    """Antenna count ``m`` at the AP and element count ``n`` at the IRS."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"need at least one AP antenna, got m={self.m}")
        if self.n < 0:
            raise ValueError(f"IRS element count must be >= 0, got n={self.n}")


@dataclass(frozen=True)
class Geometry:
    """2-D positions (metres) of the AP, the IRS and the user."""

    ap: tuple[float, float]
    irs: tuple[float, float]
    user: tuple[float, float]

    def __post_init__(self) -> None:
        for a, b, name in (
            (self.ap, self.irs, "AP/IRS"),
            (self.irs, self.user, "IRS/user"),
            (self.ap, self.user, "AP/user"),
        ):
            if math.dist(a, b) <= 0.0:
                raise ValueError(f"{name} positions coincide; distances must be positive")

    @property
    def d_ap_irs(self) -> float:
        return math.dist(self.ap, self.irs)

    @property
    def d_irs_user(self) -> float:
        return math.dist(self.irs, self.user)

    @property
    def d_ap_user(self) -> float:
        return math.dist(self.ap, self.user)


@dataclass(frozen=True)
class FadingParams:
    """Large- and small-scale fading parameters.

    ``l0`` is the (linear) attenuation at unit distance. The line-of-sight
    links (AP-IRS, IRS-user) use exponent ``alpha_los`` and a Rician factor
    ``ricean_k``; the direct AP-user link uses ``alpha_nlos`` and Rayleigh
    fading.
    """

    l0: float
    alpha_los: float
    alpha_nlos: float
    ricean_k: float

    def __post_init__(self) -> None:
        if self.l0 <= 0.0:
            raise ValueError(f"unit-distance attenuation must be positive, got {self.l0}")
        if self.alpha_los < 0.0 or self.alpha_nlos < 0.0:
            raise ValueError("path-loss exponents must be non-negative")
        if self.ricean_k < 0.0:
            raise ValueError(f"Rician factor must be >= 0, got {self.ricean_k}")


def path_loss(d: float, alpha: float, l0: float) -> float:
    """Distance-based attenuation ``l0 * d**(-alpha)`` (linear power gain)."""
    if d <= 0.0:
        raise ValueError(f"distance must be positive, got {d}")
    if l0 <= 0.0:
        raise ValueError(f"unit-distance attenuation must be positive, got {l0}")
    return l0 * d ** (-alpha)


@dataclass(frozen=True)
class LinkGains:
    """Per-link large-scale power gains ``L(d)``."""

    ap_irs: float
    irs_user: float
    ap_user: float

    @classmethod
    def from_geometry(cls, geometry: Geometry, fading: FadingParams) -> "LinkGains":
        return cls(
            ap_irs=path_loss(geometry.d_ap_irs, fading.alpha_los, fading.l0),
            irs_user=path_loss(geometry.d_irs_user, fading.alpha_los, fading.l0),
            ap_user=path_loss(geometry.d_ap_user, fading.alpha_nlos, fading.l0),
        )

    @classmethod
    def unit(cls) -> "LinkGains":
        """Gains of one; useful when variances are already absolute."""
        return cls(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class ErrorStats:
    """Variances of the complex Gaussian CSI errors on the three links.

    ``sigma_g2``, ``sigma_r2`` and ``sigma_d2`` apply to the AP-IRS,
    IRS-user and AP-user links. Values are per-entry variances on whatever
    scale the caller works in: configuration-level values are relative to
    the link attenuation and become absolute through :meth:`scaled_by`.
    """

    sigma_g2: float
    sigma_r2: float
    sigma_d2: float

    def __post_init__(self) -> None:
        for v in (self.sigma_g2, self.sigma_r2, self.sigma_d2):
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValueError(f"error variances must be finite and >= 0, got {v}")

    @classmethod
    def zero(cls) -> "ErrorStats":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def relative(cls, sigma2: float) -> "ErrorStats":
        """Same relative error power ``sigma2`` on all three links."""
        return cls(sigma2, sigma2, sigma2)

    @property
    def is_zero(self) -> bool:
        return self.sigma_g2 == 0.0 and self.sigma_r2 == 0.0 and self.sigma_d2 == 0.0

    def scaled_by(self, gains: LinkGains) -> "ErrorStats":
        """Absolute per-entry variances ``sigma2 * L(link)``."""
        return ErrorStats(
            sigma_g2=self.sigma_g2 * gains.ap_irs,
            sigma_r2=self.sigma_r2 * gains.irs_user,
            sigma_d2=self.sigma_d2 * gains.ap_user,
        )


@dataclass
class ChannelEstimate:
    """Estimated channels ``G`` (n, m), ``h_r`` (n,), ``h_d`` (m,)."""

    G: np.ndarray
    h_r: np.ndarray
    h_d: np.ndarray

    def __post_init__(self) -> None:
        self.G = np.asarray(self.G, dtype=complex)
        self.h_r = np.asarray(self.h_r, dtype=complex)
        self.h_d = np.asarray(self.h_d, dtype=complex)
        if self.G.shape != (self.h_r.shape[0], self.h_d.shape[0]):
            raise ValueError(
                f"shape mismatch: G {self.G.shape}, h_r {self.h_r.shape}, h_d {self.h_d.shape}"
            )
        for arr, name in ((self.G, "G"), (self.h_r, "h_r"), (self.h_d, "h_d")):
            if not np.all(np.isfinite(arr.view(float))):
                raise ValueError(f"non-finite entries in {name}")

    @property
    def m(self) -> int:
        return self.h_d.shape[0]

    @property
    def n(self) -> int:
        return self.h_r.shape[0]

    def without_irs(self) -> "ChannelEstimate":
        """The same link with the reflecting surface removed (n = 0)."""
        return ChannelEstimate(
            G=np.zeros((0, self.m), dtype=complex),
            h_r=np.zeros(0, dtype=complex),
            h_d=self.h_d.copy(),
        )


def ula_response(n: int, angle: float) -> np.ndarray:
    """Uniform-linear-array response at half-wavelength spacing.

    Entry ``k`` is ``exp(1j * pi * k * sin(angle))`` for ``k = 0..n-1``; all
    entries have unit modulus.
    """
    k = np.arange(n)
    return np.exp(1j * np.pi * np.sin(angle) * k)


def _bearing(src: tuple[float, float], dst: tuple[float, float]) -> float:
    return math.atan2(dst[1] - src[1], dst[0] - src[0])


def los_components(dims: SystemDims, geometry: Geometry) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic line-of-sight factors for the two IRS links.

    Returns the rank-one LoS matrix for AP->IRS (outer product of the IRS
    arrival response and the AP departure response) and the LoS vector for
    IRS->user. Every entry has unit modulus, so the LoS parts carry unit
    average power before link-gain scaling.
    """
    a_irs_arrival = ula_response(dims.n, _bearing(geometry.irs, geometry.ap))
    a_ap_departure = ula_response(dims.m, _bearing(geometry.ap, geometry.irs))
    g_los = np.outer(a_irs_arrival, a_ap_departure.conj())
    h_r_los = ula_response(dims.n, _bearing(geometry.irs, geometry.user))
    return g_los, h_r_los


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian: independent real/imag parts, variance 1/2 each."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def draw_channels(
    dims: SystemDims,
    geometry: Geometry,
    fading: FadingParams,
    rng: int | np.random.Generator | np.random.SeedSequence,
) -> ChannelEstimate:
    """Draw one set of estimated channels.

    Each link is generated from its own child stream of ``rng`` (in the
    fixed order G, h_r, h_d), so the direct-link draw for a given seed does
    not depend on the IRS element count. Per-entry average power equals the
    link attenuation; with ``n == 0`` the IRS arrays are empty.
    """
    root = np.random.default_rng(rng)
    rng_g, rng_r, rng_d = root.spawn(3)
    gains = LinkGains.from_geometry(geometry, fading)
    k = fading.ricean_k
    los_w = math.sqrt(k / (k + 1.0))
    nlos_w = math.sqrt(1.0 / (k + 1.0))
    g_los, h_r_los = los_components(dims, geometry)
    g = math.sqrt(gains.ap_irs) * (
        los_w * g_los + nlos_w * _complex_normal(rng_g, (dims.n, dims.m))
    )
    h_r = math.sqrt(gains.irs_user) * (
        los_w * h_r_los + nlos_w * _complex_normal(rng_r, dims.n)
    )
    h_d = math.sqrt(gains.ap_user) * _complex_normal(rng_d, dims.m)
    return ChannelEstimate(G=g, h_r=h_r, h_d=h_d)


def draw_errors(
    dims: SystemDims,
    errs: ErrorStats,
    gains: LinkGains,
    rng: int | np.random.Generator | np.random.SeedSequence,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw one CSI error realization ``(dG, dh_r, dh_d)``.

    Entries are i.i.d. zero-mean complex Gaussian with per-entry variance
    ``sigma2 * L(link)``; pass :meth:`LinkGains.unit` when ``errs`` already
    holds absolute variances. Zero variance yields exact zeros.
    """
    gen = np.random.default_rng(rng)
    scaled = errs.scaled_by(gains)
    dg = math.sqrt(scaled.sigma_g2) * _complex_normal(gen, (dims.n, dims.m))
    dh_r = math.sqrt(scaled.sigma_r2) * _complex_normal(gen, dims.n)
    dh_d = math.sqrt(scaled.sigma_d2) * _complex_normal(gen, dims.m)
    return dg, dh_r, dh_d
