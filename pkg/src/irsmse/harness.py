"""Monte Carlo sweep harness.

Runs the design schemes over a grid of transmit powers or element counts
and a list of CSI error levels, with a fixed number of independent channel
trials per grid point, and serializes the per-trial scores to CSV.

Reproducibility contract: every random draw comes from a substream keyed by
the master seed and the coordinates of the work item (trial index, scheme,
axis value where relevant), never by loop position. Adding grid points or
trials therefore never changes existing records, results do not depend on
worker scheduling, and reruns with the same config and seed are identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ao import AoConfig, SchemeKind, run_ao, run_scheme
from .channel import (
    ErrorStats,
    FadingParams,
    Geometry,
    LinkGains,
    SystemDims,
    draw_channels,
)
from .objective import build_quadratic, evaluate_mse

CSV_HEADER = ("scheme", "axis_name", "axis_value", "sigma2", "trial", "mse", "iters", "converged", "millis")

# substream domain tags, so channel and phase draws can never collide
_CHANNEL_TAG = 0x11
_PHASE_TAG = 0x22

_SCHEME_CODES = {"robust": 1, "nonrobust": 2, "discrete": 3, "noirs": 4}


class ConfigError(ValueError):
    """Raised when an experiment configuration cannot be used."""


def dbm_to_watts(p_dbm: float) -> float:
    """Linear power in watts: ``10 ** ((p_dbm - 30) / 10)``."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p: float) -> float:
    if p <= 0.0:
        raise ValueError(f"power must be positive, got {p}")
    return 10.0 * math.log10(p) + 30.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; see ``paper-defaults.json`` for the shape."""

    dims: SystemDims
    geometry: Geometry
    fading: FadingParams
    noise_dbm: float
    schemes: tuple[SchemeKind, ...]
    sigma2: tuple[float, ...]
    trials: int
    seed: int
    power_dbm: tuple[float, ...] = ()
    elements: tuple[int, ...] = ()
    p0_dbm: float = 10.0
    eps: float = 1e-4
    eps_mm: float = 1e-8
    max_outer_iters: int = 500
    mm_max_iters: int = 1000
    share_phase_init: bool = False
    discrete_refresh: bool = True

    @property
    def sigma_n2(self) -> float:
        return dbm_to_watts(self.noise_dbm)

    def ao_config(self, p0: float) -> AoConfig:
        return AoConfig(
            p0=p0,
            sigma_n2=self.sigma_n2,
            eps=self.eps,
            eps_mm=self.eps_mm,
            max_outer_iters=self.max_outer_iters,
            mm_max_iters=self.mm_max_iters,
        )


_CONFIG_KEYS = {
    "dims", "geometry", "fading", "noise_dbm", "schemes", "sigma2", "trials",
    "seed", "power_dbm", "elements", "p0_dbm", "eps", "eps_mm",
    "max_outer_iters", "mm_max_iters", "share_phase_init", "discrete_refresh",
}


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from parsed JSON; raises :class:`ConfigError` on bad input."""
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"dims", "geometry", "fading", "noise_dbm", "schemes", "sigma2", "trials", "seed"} - set(raw)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    try:
        dims = SystemDims(m=int(raw["dims"]["m"]), n=int(raw["dims"]["n"]))
        geo = raw["geometry"]
        geometry = Geometry(
            ap=tuple(float(x) for x in geo["ap"]),
            irs=tuple(float(x) for x in geo["irs"]),
            user=tuple(float(x) for x in geo["user"]),
        )
        fad = raw["fading"]
        fading = FadingParams(
            l0=10.0 ** (float(fad["l0_db"]) / 10.0),
            alpha_los=float(fad["alpha_los"]),
            alpha_nlos=float(fad["alpha_nlos"]),
            ricean_k=float(fad["ricean_k"]),
        )
        schemes = tuple(SchemeKind.parse(str(s)) for s in raw["schemes"])
        cfg = ExperimentConfig(
            dims=dims,
            geometry=geometry,
            fading=fading,
            noise_dbm=float(raw["noise_dbm"]),
            schemes=schemes,
            sigma2=tuple(float(s) for s in raw["sigma2"]),
            trials=int(raw["trials"]),
            seed=int(raw["seed"]),
            power_dbm=tuple(float(p) for p in raw.get("power_dbm", ())),
            elements=tuple(int(n) for n in raw.get("elements", ())),
            p0_dbm=float(raw.get("p0_dbm", 10.0)),
            eps=float(raw.get("eps", 1e-4)),
            eps_mm=float(raw.get("eps_mm", 1e-8)),
            max_outer_iters=int(raw.get("max_outer_iters", 500)),
            mm_max_iters=int(raw.get("mm_max_iters", 1000)),
            share_phase_init=bool(raw.get("share_phase_init", False)),
            discrete_refresh=bool(raw.get("discrete_refresh", True)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    problems = validate_config(cfg)
    if problems:
        raise ConfigError("; ".join(problems))
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return config_from_dict(raw)


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """All structural problems with ``cfg`` (empty list when usable)."""
    problems: list[str] = []
    if cfg.trials < 1:
        problems.append(f"trials must be >= 1, got {cfg.trials}")
    if cfg.seed < 0:
        problems.append(f"seed must be >= 0, got {cfg.seed}")
    if not cfg.schemes:
        problems.append("at least one scheme is required")
    if not cfg.sigma2:
        problems.append("at least one error level is required")
    if any(not (s >= 0.0 and math.isfinite(s)) for s in cfg.sigma2):
        problems.append(f"error levels must be finite and >= 0, got {cfg.sigma2}")
    if any(not math.isfinite(p) for p in cfg.power_dbm):
        problems.append(f"power grid must be finite, got {cfg.power_dbm}")
    if any(n < 0 for n in cfg.elements):
        problems.append(f"element counts must be >= 0, got {cfg.elements}")
    if not math.isfinite(cfg.noise_dbm):
        problems.append(f"noise level must be finite, got {cfg.noise_dbm}")
    if not math.isfinite(cfg.p0_dbm):
        problems.append(f"fixed power must be finite, got {cfg.p0_dbm}")
    if cfg.eps <= 0.0 or cfg.eps_mm <= 0.0:
        problems.append("tolerances must be positive")
    if cfg.max_outer_iters < 1 or cfg.mm_max_iters < 1:
        problems.append("iteration caps must be >= 1")
    needs_irs = [k for k in cfg.schemes if k.name != "noirs"]
    if needs_irs and cfg.power_dbm and cfg.dims.n < 1:
        problems.append("power sweeps with IRS schemes need dims.n >= 1")
    if needs_irs and any(n < 1 for n in cfg.elements):
        problems.append("element sweeps with IRS schemes need every element count >= 1")
    seen: set[str] = set()
    for k in cfg.schemes:
        if k.label() in seen:
            problems.append(f"duplicate scheme {k.label()}")
        seen.add(k.label())
    return problems


@dataclass(frozen=True)
class SweepRecord:
    """One (scheme, grid point, error level, trial) score."""

    scheme: str
    axis_name: str
    axis_value: float
    sigma2: float
    trial: int
    mse: float
    iters: int
    converged: bool
    millis: float

    @property
    def key(self) -> tuple[str, float, float, int]:
        return (self.scheme, self.axis_value, self.sigma2, self.trial)


def _substream(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(key)))


def _float_key(x: float) -> int:
    """Stable integer key for a float (its IEEE-754 bit pattern)."""
    return int(np.float64(x).view(np.uint64))


def channel_rng(seed: int, trial: int) -> np.random.Generator:
    """Channel substream for one trial; shared by every scheme and grid cell."""
    return _substream(seed, _CHANNEL_TAG, trial)


def phase_rng(seed: int, kind: SchemeKind, trial: int, shared: bool) -> np.random.Generator:
    """Initial-phase substream; independent of the error level, so a cell's
    design can be compared across error levels with identical starts."""
    if shared:
        return _substream(seed, _PHASE_TAG, 0, 0, trial)
    return _substream(seed, _PHASE_TAG, _SCHEME_CODES[kind.name], kind.bits, trial)


def _trial_records(
    cfg: ExperimentConfig, axis_name: str, axis_value: float, trial: int
) -> list[SweepRecord]:
    if axis_name == "power":
        dims = cfg.dims
        p0 = dbm_to_watts(axis_value)
    elif axis_name == "elements":
        dims = SystemDims(m=cfg.dims.m, n=int(axis_value))
        p0 = dbm_to_watts(cfg.p0_dbm)
    else:
        raise ValueError(f"unknown axis {axis_name!r}")
    est = draw_channels(dims, cfg.geometry, cfg.fading, channel_rng(cfg.seed, trial))
    gains = LinkGains.from_geometry(cfg.geometry, cfg.fading)
    ao_cfg = cfg.ao_config(p0)
    records: list[SweepRecord] = []
    for kind in cfg.schemes:
        if kind.name == "nonrobust":
            # the design ignores the error level, so build it once per trial
            start = time.perf_counter()
            tr = run_ao(
                est, ErrorStats.zero(), dims, ao_cfg,
                phase_rng(cfg.seed, kind, trial, cfg.share_phase_init),
            )
            design_ms = (time.perf_counter() - start) * 1e3
            for s2 in cfg.sigma2:
                start = time.perf_counter()
                errs = ErrorStats.relative(s2).scaled_by(gains)
                quad = build_quadratic(est, errs, tr.design.phases, ao_cfg.sigma_n2)
                mse = evaluate_mse(quad, tr.design.w, tr.design.c)
                score_ms = (time.perf_counter() - start) * 1e3
                records.append(SweepRecord(
                    scheme=kind.label(), axis_name=axis_name, axis_value=float(axis_value),
                    sigma2=s2, trial=trial, mse=mse, iters=tr.iterations,
                    converged=tr.converged, millis=design_ms + score_ms,
                ))
            continue
        for s2 in cfg.sigma2:
            errs = ErrorStats.relative(s2).scaled_by(gains)
            rng = phase_rng(cfg.seed, kind, trial, cfg.share_phase_init)
            start = time.perf_counter()
            res = run_scheme(
                kind, est, errs, dims, ao_cfg, rng,
                discrete_refresh=cfg.discrete_refresh,
            )
            ms = (time.perf_counter() - start) * 1e3
            records.append(SweepRecord(
                scheme=kind.label(), axis_name=axis_name, axis_value=float(axis_value),
                sigma2=s2, trial=trial, mse=res.design.mse, iters=res.iterations,
                converged=res.converged, millis=ms,
            ))
    return records


def _trial_job(args: tuple[ExperimentConfig, str, float, int]) -> list[SweepRecord]:
    return _trial_records(*args)


def _run_sweep(
    cfg: ExperimentConfig, axis_name: str, axis_values, workers: int
) -> list[SweepRecord]:
    problems = validate_config(cfg)
    if problems:
        raise ConfigError("; ".join(problems))
    if not axis_values:
        raise ConfigError(f"config has no grid for the {axis_name} experiment")
    jobs = [
        (cfg, axis_name, float(axis_value), trial)
        for axis_value in axis_values
        for trial in range(cfg.trials)
    ]
    records: list[SweepRecord] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(_trial_job, jobs, chunksize=8):
                records.extend(chunk)
    else:
        for job in jobs:
            records.extend(_trial_job(job))
    records.sort(key=lambda r: r.key)
    return records


def run_power_sweep(cfg: ExperimentConfig, workers: int = 1) -> list[SweepRecord]:
    """Scores over the transmit-power grid at fixed element count ``dims.n``."""
    return _run_sweep(cfg, "power", cfg.power_dbm, workers)


def run_element_sweep(cfg: ExperimentConfig, workers: int = 1) -> list[SweepRecord]:
    """Scores over the element-count grid at fixed power ``p0_dbm``."""
    return _run_sweep(cfg, "elements", cfg.elements, workers)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_results(
    records: list[SweepRecord], path: str | Path, *, with_timing: bool = True
) -> None:
    """Serialize records (UTF-8, LF, 17 significant digits for floats).

    Records are sorted by their key, which must be unique. ``with_timing``
    writes the measured wall time per record; disabling it zeroes the
    ``millis`` column so reruns of the same config and seed are
    byte-identical.
    """
    rows = sorted(records, key=lambda r: r.key)
    for a, b in zip(rows, rows[1:]):
        if a.key == b.key:
            raise ValueError(f"duplicate record key {a.key}")
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for r in rows:
        millis = r.millis if with_timing else 0.0
        buf.write(
            f"{r.scheme},{r.axis_name},{_fmt(r.axis_value)},{_fmt(r.sigma2)},"
            f"{r.trial},{_fmt(r.mse)},{r.iters},{str(r.converged).lower()},{_fmt(millis)}\n"
        )
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise IOError(f"cannot write results to {path}: {exc}") from exc


def read_results(path: str | Path) -> list[SweepRecord]:
    """Parse a results CSV back into records (inverse of :func:`write_results`)."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = tuple(next(reader))
            except StopIteration as exc:
                raise ValueError(f"{path} is empty; expected a header row") from exc
            if header != CSV_HEADER:
                raise ValueError(
                    f"unexpected header {header}; expected {CSV_HEADER}"
                )
            records = []
            for row in reader:
                if len(row) != len(CSV_HEADER):
                    raise ValueError(f"row has {len(row)} fields, expected {len(CSV_HEADER)}: {row}")
                records.append(SweepRecord(
                    scheme=row[0],
                    axis_name=row[1],
                    axis_value=float(row[2]),
                    sigma2=float(row[3]),
                    trial=int(row[4]),
                    mse=float(row[5]),
                    iters=int(row[6]),
                    converged={"true": True, "false": False}[row[7]],
                    millis=float(row[8]),
                ))
            return records
    except OSError as exc:
        raise IOError(f"cannot read results from {path}: {exc}") from exc


@dataclass(frozen=True)
class SummaryRow:
    """Mean and standard error of the MSE over trials of one grid cell."""

    scheme: str
    sigma2: float
    axis_value: float
    mean: float
    stderr: float
    count: int


def summarize(records: list[SweepRecord]) -> list[SummaryRow]:
    """Per-cell trial statistics, sorted by (scheme, sigma2, axis value).

    The standard error is the ddof=1 sample standard deviation divided by
    ``sqrt(count)``; a single-trial cell reports 0.
    """
    cells: dict[tuple[str, float, float], list[float]] = {}
    for r in records:
        cells.setdefault((r.scheme, r.sigma2, r.axis_value), []).append(r.mse)
    out = []
    for (scheme, sigma2, axis_value), values in sorted(cells.items()):
        arr = np.asarray(values)
        if arr.size > 1:
            stderr = float(arr.std(ddof=1) / math.sqrt(arr.size))
        else:
            stderr = 0.0
        out.append(SummaryRow(
            scheme=scheme, sigma2=sigma2, axis_value=axis_value,
            mean=float(arr.mean()), stderr=stderr, count=int(arr.size),
        ))
    return out
