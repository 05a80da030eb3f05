"""Alternating optimization of beamformer, equalizer and IRS phases.

One outer iteration updates, in order: the beamformer (bisection on the
power multiplier), the phases (majorization-minimization) and finally the
equalizer (Wiener form). Each step minimizes the average MSE with the other
blocks fixed, so the recorded MSE sequence is non-increasing; the loop stops
once the absolute decrease falls below ``eps`` (or at the iteration cap).

The trace checkpoints sit after the equalizer refresh, so every recorded
value - including the final design - carries a Wiener-optimal equalizer for
its beamformer/phase pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelEstimate, ErrorStats, SystemDims
from .objective import Design, PhaseVector, build_quadratic, evaluate_mse
from .phases import build_subproblem, mm_iterate
from .transceiver import BisectionConfig, update_beamformer, wiener_equalizer


@dataclass(frozen=True)
class SchemeKind:
    """Which design strategy to run.

    ``robust`` optimizes against the true error statistics; ``nonrobust``
    designs as if the estimates were perfect and is then scored against the
    true statistics; ``discrete`` is the robust design followed by b-bit
    phase quantization and one transceiver refresh; ``noirs`` removes the
    surface and optimizes the direct link only.
    """

    name: str
    bits: int = 0

    _NAMES = ("robust", "nonrobust", "discrete", "noirs")

    def __post_init__(self) -> None:
        if self.name not in self._NAMES:
            raise ValueError(f"unknown scheme {self.name!r}; expected one of {self._NAMES}")
        if self.name == "discrete" and self.bits < 1:
            raise ValueError(f"discrete phases need at least one bit, got {self.bits}")
        if self.name != "discrete" and self.bits != 0:
            raise ValueError(f"bits only apply to the discrete scheme, got {self.bits}")

    @classmethod
    def robust(cls) -> "SchemeKind":
        return cls("robust")

    @classmethod
    def nonrobust(cls) -> "SchemeKind":
        return cls("nonrobust")

    @classmethod
    def discrete(cls, bits: int) -> "SchemeKind":
        return cls("discrete", bits=bits)

    @classmethod
    def no_irs(cls) -> "SchemeKind":
        return cls("noirs")

    @classmethod
    def parse(cls, label: str) -> "SchemeKind":
        """Inverse of :meth:`label` (e.g. ``"discrete3"`` -> 3-bit discrete)."""
        if label.startswith("discrete") and label != "discrete":
            return cls("discrete", bits=int(label[len("discrete"):]))
        return cls(label)

    def label(self) -> str:
        if self.name == "discrete":
            return f"discrete{self.bits}"
        return self.name


@dataclass(frozen=True)
class AoConfig:
    """Solver settings shared by all schemes."""

    p0: float
    sigma_n2: float
    eps: float = 1e-4
    eps_mm: float = 1e-8
    max_outer_iters: int = 500
    mm_max_iters: int = 1000
    bisection: BisectionConfig = field(default_factory=BisectionConfig)

    def __post_init__(self) -> None:
        if self.p0 <= 0.0:
            raise ValueError(f"power budget must be positive, got {self.p0}")
        if self.sigma_n2 <= 0.0:
            raise ValueError(f"noise variance must be positive, got {self.sigma_n2}")
        if not self.eps > 0.0:
            raise ValueError(f"outer tolerance must be positive, got {self.eps}")
        if self.max_outer_iters < 1:
            raise ValueError("need at least one outer iteration")


@dataclass
class AoTrace:
    """Result of one alternating-optimization run.

    ``mse[0]`` is the objective after the first equalizer fit to the random
    initial phases and uniform full-power beamformer; ``mse[t]`` follows
    iteration ``t``. ``chain`` holds the two intermediate objective values
    of each iteration (after the beamformer update, after the phase update),
    so ``mse[t-1] >= chain[t-1][0] >= chain[t-1][1] >= mse[t]`` up to
    rounding. ``subsolvers_converged`` is False if any beamformer bisection
    or MM call hit its iteration cap.
    """

    mse: np.ndarray
    design: Design
    iterations: int
    converged: bool
    chain: np.ndarray
    subsolvers_converged: bool


def initial_beamformer(m: int, p0: float) -> np.ndarray:
    """Uniform full-power start: ``sqrt(p0/m)`` on every antenna."""
    return np.full(m, math.sqrt(p0 / m), dtype=complex)


def run_ao(
    est: ChannelEstimate,
    errs: ErrorStats,
    dims: SystemDims,
    cfg: AoConfig,
    rng: int | np.random.Generator,
) -> AoTrace:
    """Alternating optimization with random initial phases.

    ``errs`` are the absolute per-entry CSI error variances the design
    should be robust against (zeros reproduce the perfect-CSI design).
    """
    if dims.n < 1:
        raise ValueError("need at least one reflecting element; use the no-IRS scheme otherwise")
    if (est.m, est.n) != (dims.m, dims.n):
        raise ValueError(f"channel dims ({est.n}, {est.m}) do not match {dims}")
    gen = np.random.default_rng(rng)
    phases = PhaseVector.random(dims.n, gen)
    w = initial_beamformer(dims.m, cfg.p0)
    quad = build_quadratic(est, errs, phases, cfg.sigma_n2)
    c = wiener_equalizer(quad, w)
    trace = [evaluate_mse(quad, w, c)]
    chain: list[tuple[float, float]] = []
    converged = False
    solvers_ok = True
    for _ in range(cfg.max_outer_iters):
        bf = update_beamformer(quad, c, cfg.p0, cfg.bisection)
        w = bf.w
        solvers_ok &= bf.converged
        after_w = evaluate_mse(quad, w, c)
        sub = build_subproblem(est, w, c)
        mm = mm_iterate(sub, phases, cfg.eps_mm, cfg.mm_max_iters)
        phases = mm.phases
        solvers_ok &= mm.converged
        quad = build_quadratic(est, errs, phases, cfg.sigma_n2)
        after_theta = evaluate_mse(quad, w, c)
        c = wiener_equalizer(quad, w)
        trace.append(evaluate_mse(quad, w, c))
        chain.append((after_w, after_theta))
        if trace[-2] - trace[-1] < cfg.eps:
            converged = True
            break
    design = Design(w=w, c=c, phases=phases, mse=trace[-1])
    return AoTrace(
        mse=np.asarray(trace),
        design=design,
        iterations=len(trace) - 1,
        converged=converged,
        chain=np.asarray(chain).reshape(-1, 2),
        subsolvers_converged=solvers_ok,
    )


def run_transceiver_only(
    est: ChannelEstimate,
    errs: ErrorStats,
    cfg: AoConfig,
) -> AoTrace:
    """Beamformer/equalizer alternation with no reflecting surface.

    Uses the direct-link quadratic ``A = h_d h_d^H + sigma_d2 I``,
    ``alpha = h_d`` (the n = 0 degeneration of the general quadratic).
    """
    reduced = est.without_irs()
    phases = PhaseVector.zeros(0)
    quad = build_quadratic(reduced, errs, phases, cfg.sigma_n2)
    w = initial_beamformer(reduced.m, cfg.p0)
    c = wiener_equalizer(quad, w)
    trace = [evaluate_mse(quad, w, c)]
    converged = False
    solvers_ok = True
    for _ in range(cfg.max_outer_iters):
        bf = update_beamformer(quad, c, cfg.p0, cfg.bisection)
        w = bf.w
        solvers_ok &= bf.converged
        c = wiener_equalizer(quad, w)
        trace.append(evaluate_mse(quad, w, c))
        if trace[-2] - trace[-1] < cfg.eps:
            converged = True
            break
    design = Design(w=w, c=c, phases=phases, mse=trace[-1])
    return AoTrace(
        mse=np.asarray(trace),
        design=design,
        iterations=len(trace) - 1,
        converged=converged,
        chain=np.zeros((0, 2)),
        subsolvers_converged=solvers_ok,
    )


@dataclass
class SchemeResult:
    """A scored design plus the bookkeeping the sweep records need."""

    design: Design
    iterations: int
    converged: bool


def run_scheme(
    kind: SchemeKind,
    est: ChannelEstimate,
    errs: ErrorStats,
    dims: SystemDims,
    cfg: AoConfig,
    rng: int | np.random.Generator,
    *,
    discrete_refresh: bool = True,
) -> SchemeResult:
    """Design under ``kind`` and score it against the true statistics ``errs``.

    The non-robust scheme designs with zero error variances; the discrete
    scheme quantizes the robust phases to ``2**bits`` levels and, when the
    quantization moved any phase, refreshes the equalizer and then the
    beamformer once before scoring (``discrete_refresh=False`` skips the
    refresh entirely).
    """
    if kind.name == "robust":
        tr = run_ao(est, errs, dims, cfg, rng)
        return SchemeResult(design=tr.design, iterations=tr.iterations, converged=tr.converged)

    if kind.name == "nonrobust":
        tr = run_ao(est, ErrorStats.zero(), dims, cfg, rng)
        quad = build_quadratic(est, errs, tr.design.phases, cfg.sigma_n2)
        scored = replace(tr.design, mse=evaluate_mse(quad, tr.design.w, tr.design.c))
        return SchemeResult(design=scored, iterations=tr.iterations, converged=tr.converged)

    if kind.name == "discrete":
        tr = run_ao(est, errs, dims, cfg, rng)
        design = discretize_design(
            tr.design, kind.bits, est, errs, cfg, refresh=discrete_refresh
        )
        return SchemeResult(design=design, iterations=tr.iterations, converged=tr.converged)

    if kind.name == "noirs":
        tr = run_transceiver_only(est, errs, cfg)
        return SchemeResult(design=tr.design, iterations=tr.iterations, converged=tr.converged)

    raise ValueError(f"unhandled scheme {kind}")


def discretize_design(
    design: Design,
    bits: int,
    est: ChannelEstimate,
    errs: ErrorStats,
    cfg: AoConfig,
    *,
    refresh: bool = True,
) -> Design:
    """Quantize a design's phases to the b-bit grid and rescore.

    When quantization changes nothing the design is returned with its MSE
    untouched. Otherwise the equalizer is refit to the quantized phases and
    the beamformer is updated once for that equalizer before scoring.
    """
    snapped = design.phases.quantize(bits)
    if np.array_equal(snapped.theta, design.phases.theta):
        return replace(design, phases=snapped)
    quad = build_quadratic(est, errs, snapped, cfg.sigma_n2)
    if not refresh:
        return replace(
            design, phases=snapped, mse=evaluate_mse(quad, design.w, design.c)
        )
    c = wiener_equalizer(quad, design.w)
    bf = update_beamformer(quad, c, cfg.p0, cfg.bisection)
    return Design(w=bf.w, c=c, phases=snapped, mse=evaluate_mse(quad, bf.w, c))
