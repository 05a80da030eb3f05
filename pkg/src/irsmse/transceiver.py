"""Transceiver updates for the averaged-MSE objective.

For a fixed quadratic ``(A, alpha, sigma_n2)`` the optimal scalar equalizer
has the Wiener form ``c = w^H alpha / (w^H A w + sigma_n2)``. For a fixed
equalizer the beamformer minimizing the objective under the transmit power
constraint ``||w||^2 <= p0`` is

    w(lam) = (|c|^2 A + lam I)^{-1} alpha conj(c),

with the multiplier ``lam >= 0`` chosen by bisection so the KKT conditions
hold: either ``lam = 0`` with ``w(0)`` feasible, or ``||w(lam)||^2 = p0``.
``||w(lam)||^2`` is strictly decreasing in ``lam``, and
``lam = |c| ||alpha|| / sqrt(p0)`` always brackets the constrained root.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .objective import MseQuadratic


@dataclass(frozen=True)
class BisectionConfig:
    """Controls for the multiplier search.

    ``power_tol`` is relative: the search stops once
    ``| ||w||^2 - p0 | <= power_tol * p0``. ``bracket_growth`` is the factor
    by which the upper bracket is enlarged in the (theoretically never
    needed) event that the analytic bracket comes out infeasible.
    """

    power_tol: float = 1e-10
    max_iters: int = 200
    bracket_growth: float = 2.0


@dataclass
class BeamformerResult:
    w: np.ndarray
    lam: float
    converged: bool
    iterations: int


def wiener_equalizer(q: MseQuadratic, w: np.ndarray) -> complex:
    """MSE-optimal scalar equalizer ``w^H alpha / (w^H A w + sigma_n2)``."""
    denom = np.vdot(w, q.A @ w).real + q.sigma_n2
    if denom <= 0.0:
        raise ValueError("w^H A w + sigma_n2 must be positive; is the noise variance zero?")
    return complex(np.vdot(w, q.alpha) / denom)


def _solve_shifted(b: np.ndarray, lam: float, rhs: np.ndarray) -> np.ndarray | None:
    """Solve ``(b + lam I) x = rhs`` via Cholesky; None if not positive definite."""
    mat = b + lam * np.eye(b.shape[0])
    try:
        factor = cho_factor(mat, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return None
    return cho_solve(factor, rhs, check_finite=False)


def _min_norm_stationary(b: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Minimum-norm solution of ``b x = rhs`` for Hermitian PSD ``b``."""
    evals, evecs = np.linalg.eigh(b)
    cutoff = max(evals[-1], 0.0) * 1e-12
    coeffs = evecs.conj().T @ rhs
    inv = np.where(evals > cutoff, 1.0 / np.where(evals > cutoff, evals, 1.0), 0.0)
    return evecs @ (coeffs * inv)


def update_beamformer(
    q: MseQuadratic,
    c: complex,
    p0: float,
    cfg: BisectionConfig | None = None,
) -> BeamformerResult:
    """Power-constrained beamformer update for a fixed equalizer.

    Degenerate cases keep the surrounding alternation total: with
    ``alpha = 0`` the objective has no linear term and the zero vector is
    returned; with ``c = 0`` (objective constant in ``w``) the full-power
    matched filter ``sqrt(p0) alpha / ||alpha||`` is returned so the next
    equalizer update can restart from a useful point.
    """
    if cfg is None:
        cfg = BisectionConfig()
    if p0 <= 0.0:
        raise ValueError(f"transmit power budget must be positive, got {p0}")
    m = q.alpha.shape[0]
    alpha_norm = float(np.linalg.norm(q.alpha))
    if alpha_norm == 0.0:
        return BeamformerResult(w=np.zeros(m, dtype=complex), lam=0.0, converged=True, iterations=0)
    if c == 0:
        w = np.sqrt(p0) * q.alpha / alpha_norm
        return BeamformerResult(w=w, lam=0.0, converged=True, iterations=0)

    b = (abs(c) ** 2) * q.A
    rhs = q.alpha * np.conj(c)
    tol = cfg.power_tol * p0

    # Unconstrained stationary point: if it is feasible, lam = 0 is optimal.
    w0 = _solve_shifted(b, 0.0, rhs)
    if w0 is None:
        w0 = _min_norm_stationary(b, rhs)
    p = float(np.vdot(w0, w0).real)
    if p <= p0 + tol:
        return BeamformerResult(w=w0, lam=0.0, converged=True, iterations=0)

    # ||w(lam)|| <= |c| ||alpha|| / lam, so this upper bracket is feasible.
    hi = abs(c) * alpha_norm / np.sqrt(p0)
    w_hi = _solve_shifted(b, hi, rhs)
    for _ in range(64):
        if w_hi is not None and float(np.vdot(w_hi, w_hi).real) <= p0 + tol:
            break
        hi *= cfg.bracket_growth
        w_hi = _solve_shifted(b, hi, rhs)

    lo = 0.0
    for it in range(1, cfg.max_iters + 1):
        mid = 0.5 * (lo + hi)
        w_mid = _solve_shifted(b, mid, rhs)
        if w_mid is None:
            # numerically indefinite only near lam ~ 0 with singular A
            lo = mid
            continue
        p = float(np.vdot(w_mid, w_mid).real)
        if abs(p - p0) <= tol:
            return BeamformerResult(w=w_mid, lam=mid, converged=True, iterations=it)
        if p > p0:
            lo = mid
        else:
            hi = mid
            w_hi = w_mid
    # Exhausted: report the feasible endpoint and flag non-convergence.
    return BeamformerResult(w=w_hi, lam=hi, converged=False, iterations=cfg.max_iters)
