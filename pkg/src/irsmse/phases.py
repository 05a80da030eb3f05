"""Unit-modulus phase optimization by majorization-minimization.

For fixed ``w`` and ``c`` the phase-dependent part of the average MSE is

    f(v) = v^H Q v - 2 Re(v^H q),    |v_i| = 1,

with ``Q = Phi Phi^H`` (rank one), ``q = Phi (1 - conj(d))``,
``Phi = diag(h_r^H) G w c`` and ``d = h_d^H w c``; ``v`` follows the
convention ``v_i = exp(-1j*theta_i)`` so that ``h_r^H Theta G w c = v^H Phi``.
``f`` differs from the full MSE at the same ``(w, c)`` only by a
phase-independent constant, so descent in ``f`` is descent in MSE.

Each iteration majorizes ``v^H Q v`` at the current iterate ``v_k`` with
``H = lambda_max(Q) I`` and minimizes the surrogate in closed form:
``u = (Q - lambda_max(Q) I) v_k - q`` and ``v_{k+1,i} = -exp(1j*arg(u_i))``,
which minimizes ``Re(v^H u)`` coordinatewise. Coordinates with ``u_i = 0``
keep their previous value. The surrogate touches ``f`` at ``v_k``, so the
sequence ``f(v_k)`` never increases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelEstimate
from .objective import PhaseVector

_DESCENT_SLACK = 1e-12


@dataclass(frozen=True)
class PhaseSubproblem:
    """Data ``(Phi, d)`` of the phase quadratic; ``Q`` and ``q`` derive from it."""

    phi: np.ndarray
    d: complex

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @property
    def Q(self) -> np.ndarray:
        return np.outer(self.phi, self.phi.conj())

    @property
    def q(self) -> np.ndarray:
        return self.phi * (1.0 - np.conj(self.d))

    def objective(self, v: np.ndarray) -> float:
        """``f(v)`` evaluated through the rank-one structure in O(n)."""
        t = np.vdot(v, self.phi)
        return float(abs(t) ** 2 - 2.0 * (t * (1.0 - np.conj(self.d))).real)


def build_subproblem(est: ChannelEstimate, w: np.ndarray, c: complex) -> PhaseSubproblem:
    """Cascade vector and direct-path scalar for fixed ``(w, c)``."""
    phi = est.h_r.conj() * (est.G @ w) * c
    d = complex(np.vdot(est.h_d, w) * c)
    return PhaseSubproblem(phi=np.asarray(phi, dtype=complex), d=d)


def lambda_max_rank1(sub: PhaseSubproblem) -> float:
    """Largest eigenvalue of ``Q = Phi Phi^H``, i.e. ``||Phi||^2``."""
    return float(np.vdot(sub.phi, sub.phi).real)


def majorizer(sub: PhaseSubproblem, v: np.ndarray, v0: np.ndarray) -> float:
    """The surrogate ``g(v, v0)`` with ``H = lambda_max(Q) I``.

    ``g(v, v0) = v^H H v + 2 Re(v^H (Q - H) v0) + v0^H (H - Q) v0
    - 2 Re(v^H q)``; it dominates ``f`` everywhere and equals it at ``v0``.
    """
    lam = lambda_max_rank1(sub)
    n = sub.n
    t0 = np.vdot(v0, sub.phi)
    qv0_minus_hv0 = sub.phi * t0.conjugate() - lam * v0
    vhv = float(np.vdot(v, v).real)
    cross = 2.0 * float(np.vdot(v, qv0_minus_hv0).real)
    const = lam * float(np.vdot(v0, v0).real) - abs(t0) ** 2
    lin = -2.0 * float(np.vdot(v, sub.q).real)
    return lam * vhv + cross + const + lin


@dataclass
class MmResult:
    phases: PhaseVector
    objective: float
    iterations: int
    converged: bool


def mm_iterate(
    sub: PhaseSubproblem,
    v0: PhaseVector,
    eps: float = 1e-8,
    max_iters: int = 1000,
) -> MmResult:
    """Run the MM fixed-point iteration from ``v0``.

    Stops once the decrease of ``f`` falls below ``eps`` or after
    ``max_iters`` iterations (the latter is flagged as non-convergence).
    The objective sequence is checked to be non-increasing at every step.
    """
    if v0.n != sub.n:
        raise ValueError(f"initial phases have {v0.n} entries, subproblem has {sub.n}")
    if sub.n == 0:
        return MmResult(phases=v0, objective=0.0, iterations=0, converged=True)
    lam = lambda_max_rank1(sub)
    q = sub.q
    v = v0.v
    f_prev = sub.objective(v)
    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        u = sub.phi * np.vdot(sub.phi, v) - lam * v - q
        zero = u == 0
        v_new = -np.exp(1j * np.angle(u))
        if zero.any():
            v_new[zero] = v[zero]
        f_new = sub.objective(v_new)
        slack = _DESCENT_SLACK * max(1.0, abs(f_prev))
        if f_new > f_prev + slack:
            raise AssertionError(
                f"majorization step increased the objective: {f_prev} -> {f_new}"
            )
        v = v_new
        decrease = f_prev - f_new
        f_prev = f_new
        if decrease < eps:
            converged = True
            break
    return MmResult(
        phases=PhaseVector.from_v(v),
        objective=f_prev,
        iterations=iters,
        converged=converged,
    )
