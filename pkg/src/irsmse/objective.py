"""Average mean-square-error objective for the IRS-assisted link.

With transmit beamformer ``w``, scalar receive equalizer ``c`` and IRS
phase shifts ``theta`` (reflection matrix ``Theta = diag(exp(1j*theta))``),
the received symbol estimate is ``c * ((h_r^H Theta G + h_d^H) w s + n0)``.
Averaging the squared error over the unit-power symbol, the noise and the
CSI errors gives the quadratic form

    e(w, c) = |c|^2 (w^H A w + sigma_n2) - 2 Re(c alpha^H w) + 1

with ``alpha = G^H Theta^H h_r + h_d`` built from the channel estimates and

    A = alpha alpha^H + sigma_g2 ||h_r||^2 I + sigma_r2 G^H G
        + (n sigma_r2 sigma_g2 + sigma_d2) I,

where the variances are the absolute per-entry CSI error variances. This
module builds and evaluates that quadratic and provides a Monte Carlo
estimator of the same expectation for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import TWO_PI, ChannelEstimate, ErrorStats, _complex_normal


@dataclass(frozen=True)
class PhaseVector:
    """IRS phase shifts ``theta``, stored canonically in ``[0, 2*pi)``.

    The optimization works with the unit-modulus vector ``v`` whose entries
    are ``conj(exp(1j*theta_i)) = exp(-1j*theta_i)``; with that convention
    ``h_r^H Theta G w c == v^H Phi`` for the cascade vector ``Phi`` used by
    the phase subproblem. ``v`` is derived on demand so every iterate keeps
    unit modulus by construction.
    """

    theta: np.ndarray

    def __post_init__(self) -> None:
        t = np.mod(np.asarray(self.theta, dtype=float), TWO_PI)
        # mod can round values just below 2*pi up to 2*pi itself
        t[t >= TWO_PI] = 0.0
        t.setflags(write=False)
        object.__setattr__(self, "theta", t)

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def v(self) -> np.ndarray:
        return np.exp(-1j * self.theta)

    @classmethod
    def from_v(cls, v: np.ndarray) -> "PhaseVector":
        return cls(-np.angle(np.asarray(v, dtype=complex)))

    @classmethod
    def zeros(cls, n: int) -> "PhaseVector":
        return cls(np.zeros(n))

    @classmethod
    def random(cls, n: int, rng: int | np.random.Generator) -> "PhaseVector":
        gen = np.random.default_rng(rng)
        return cls(gen.uniform(0.0, TWO_PI, size=n))

    def quantize(self, bits: int) -> "PhaseVector":
        """Snap each phase to the nearest point of the ``2**bits`` level grid.

        Grid points are ``2*pi*k / 2**bits``. Distances wrap around the
        circle; an exact tie between the two neighbouring grid points is
        resolved towards the smaller canonical angle (so a tie between the
        top grid point and ``2*pi == 0`` snaps to ``0``).
        """
        if bits < 1:
            raise ValueError(f"need at least one bit, got {bits}")
        levels = 2**bits
        step = TWO_PI / levels
        x = self.theta / step
        k = np.floor(x)
        frac = x - k
        up = frac > 0.5
        # ties: round down, except against the wrap point whose angle is 0
        tie = frac == 0.5
        up |= tie & (k == levels - 1)
        k = (k + up) % levels
        return PhaseVector(k * step)


@dataclass(frozen=True)
class MseQuadratic:
    """The averaged-MSE quadratic ``(A, alpha, sigma_n2)``."""

    A: np.ndarray
    alpha: np.ndarray
    sigma_n2: float


@dataclass
class Design:
    """One complete design: beamformer, equalizer, phases and its MSE."""

    w: np.ndarray
    c: complex
    phases: PhaseVector
    mse: float


def build_quadratic(
    est: ChannelEstimate,
    errs: ErrorStats,
    phases: PhaseVector,
    sigma_n2: float,
) -> MseQuadratic:
    """Assemble ``A`` and ``alpha`` for given phases and error variances.

    ``errs`` holds absolute per-entry variances. ``A`` is Hermitian by
    construction: the rank-one term ``alpha alpha^H`` plus positive
    semidefinite regularizers, so its smallest eigenvalue is at least
    ``n * sigma_r2 * sigma_g2 + sigma_d2``.
    """
    if phases.n != est.n:
        raise ValueError(f"phase count {phases.n} does not match element count {est.n}")
    if sigma_n2 < 0.0:
        raise ValueError(f"noise variance must be >= 0, got {sigma_n2}")
    v = phases.v
    # G^H Theta^H h_r: Theta^H applies exp(-1j*theta) = v elementwise.
    alpha = est.G.conj().T @ (v * est.h_r) + est.h_d
    eye = np.eye(est.m)
    a = (
        np.outer(alpha, alpha.conj())
        + (errs.sigma_g2 * np.vdot(est.h_r, est.h_r).real) * eye
        + errs.sigma_r2 * (est.G.conj().T @ est.G)
        + (est.n * errs.sigma_r2 * errs.sigma_g2 + errs.sigma_d2) * eye
    )
    # symmetrize so A == A^H holds exactly: complex products round with a
    # residual that need not be conjugate-symmetric (nor zero on the diagonal)
    a = (a + a.conj().T) / 2.0
    return MseQuadratic(A=a, alpha=alpha, sigma_n2=float(sigma_n2))


def evaluate_mse(q: MseQuadratic, w: np.ndarray, c: complex) -> float:
    """Average MSE ``|c|^2 (w^H A w + sigma_n2) - 2 Re(c alpha^H w) + 1``."""
    quad = np.vdot(w, q.A @ w).real
    cross = (c * np.vdot(q.alpha, w)).real
    return float(abs(c) ** 2 * (quad + q.sigma_n2) - 2.0 * cross + 1.0)


def mc_mse_stats(
    est: ChannelEstimate,
    errs: ErrorStats,
    phases: PhaseVector,
    w: np.ndarray,
    c: complex,
    sigma_n2: float,
    trials: int,
    rng: int | np.random.Generator,
    batch: int = 20000,
) -> tuple[float, float]:
    """Monte Carlo estimate of the average MSE and its standard error.

    Each draw realizes the symbol, the receiver noise and the CSI errors
    (``errs`` taken as absolute per-entry variances), forms the true
    channels as estimate plus error, and measures ``|c*y - s|^2``.
    """
    if trials < 1:
        raise ValueError(f"need at least one draw, got {trials}")
    if sigma_n2 < 0.0:
        raise ValueError(f"noise variance must be >= 0, got {sigma_n2}")
    gen = np.random.default_rng(rng)
    m, n = est.m, est.n
    v = phases.v
    w = np.asarray(w, dtype=complex)
    base_gw = est.G @ w
    sd_g = np.sqrt(errs.sigma_g2)
    sd_r = np.sqrt(errs.sigma_r2)
    sd_d = np.sqrt(errs.sigma_d2)
    sd_n = np.sqrt(sigma_n2)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        t = min(batch, trials - done)
        gw = base_gw[None, :] + (sd_g * _complex_normal(gen, (t, n, m))) @ w
        h_r_true = est.h_r[None, :] + sd_r * _complex_normal(gen, (t, n))
        h_d_true = est.h_d[None, :] + sd_d * _complex_normal(gen, (t, m))
        # effective gain (h_r^H Theta G + h_d^H) w per draw; Theta rows carry
        # exp(1j*theta) = conj(v)
        gain = np.sum(np.conj(v[None, :] * h_r_true) * gw, axis=1)
        gain += h_d_true.conj() @ w
        s = _complex_normal(gen, t)
        y = gain * s + sd_n * _complex_normal(gen, t)
        err = np.abs(c * y - s) ** 2
        total += float(err.sum())
        total_sq += float((err**2).sum())
        done += t
    mean = total / trials
    if trials > 1:
        var = max(total_sq - trials * mean**2, 0.0) / (trials - 1)
        stderr = np.sqrt(var / trials)
    else:
        stderr = float("inf")
    return mean, float(stderr)


def mc_mse_oracle(
    est: ChannelEstimate,
    errs: ErrorStats,
    phases: PhaseVector,
    w: np.ndarray,
    c: complex,
    sigma_n2: float,
    trials: int,
    rng: int | np.random.Generator,
) -> float:
    """Plain Monte Carlo estimate of the average MSE (see :func:`mc_mse_stats`)."""
    return mc_mse_stats(est, errs, phases, w, c, sigma_n2, trials, rng)[0]
