"""Euler-Maruyama path simulation of a DiffusionSpec.

Paths are split into fixed-size chunks. Chunk ``k`` draws from a Philox
stream keyed by ``SeedSequence(seed, spawn_key=(k,))``, and normals come from
the inverse normal CDF applied to open-interval uniforms. A path's variates
therefore depend only on the seed and its index, not on how many threads run
the chunks.

Near a finite endpoint the volatility is evaluated at the state clipped into
the closed domain ("full truncation"). Absorption uses the first grid time at
which a path is at or beyond an endpoint, so hitting times carry the usual
O(sqrt(dt)) bias.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
import math
import os

import numpy as np
from scipy.special import ndtri

from .errors import InvalidParameter, NumericBlowup, OutOfDomain, TooFewSamples

CHUNK = 4096
BLOWUP = 1e12
_U53 = 2.0 ** -53


class BoundaryPolicy(str, Enum):
    ABSORB = "AbsorbAtBoundary"
    REFLECT_NEVER = "ReflectNever"


@dataclass(frozen=True)
class SimConfig:
    """Run parameters.

    With ``ReflectNever`` paths are never stopped: a state that steps past a
    finite endpoint is kept and only the volatility sees the clipped value.
    ``noise_substeps = k`` makes every step consume k normals and use their
    normalized sum, so a run at (dt, k=2) is driven by the same Brownian path
    as a run at (dt/2, k=1) with the same seed.
    """
    dt: float
    n_paths: int
    horizon: float
    seed: int = 0
    boundary_policy: BoundaryPolicy = BoundaryPolicy.ABSORB
    noise_substeps: int = 1

    def __post_init__(self):
        if not (self.dt > 0 and self.horizon > 0 and self.dt < self.horizon):
            raise InvalidParameter("need 0 < dt < horizon")
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise InvalidParameter("n_paths must be a positive integer")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidParameter("seed must fit in 64 unsigned bits")
        if int(self.noise_substeps) != self.noise_substeps or self.noise_substeps < 1:
            raise InvalidParameter("noise_substeps must be a positive integer")
        object.__setattr__(self, "n_paths", int(self.n_paths))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "boundary_policy", BoundaryPolicy(self.boundary_policy))

    @property
    def steps(self):
        """Step lengths: full dt steps, the last one shortened to land on the horizon."""
        n = math.ceil(self.horizon / self.dt - 1e-9)
        out = np.full(n, self.dt)
        out[-1] = self.horizon - self.dt * (n - 1)
        return out

    @property
    def times(self):
        """Grid times after each step, ending exactly at the horizon."""
        n = len(self.steps)
        out = self.dt * np.arange(1, n + 1)
        out[-1] = self.horizon
        return out


@dataclass(frozen=True)
class HitSummary:
    count: int
    mean: float
    std: float
    min: float
    max: float

    @classmethod
    def of(cls, times):
        if len(times) == 0:
            return cls(0, math.nan, math.nan, math.nan, math.nan)
        return cls(len(times), float(np.mean(times)), float(np.std(times)), float(np.min(times)),
                   float(np.max(times)))


@dataclass(frozen=True, eq=False)
class SimResult:
    terminal_values: np.ndarray
    absorbed_fraction: dict
    absorption_times: dict
    n_paths: int
    hit_times: dict = field(repr=False, default_factory=dict)

    @property
    def alive_fraction(self):
        return len(self.terminal_values) / self.n_paths

    def summary(self):
        return {"n_paths": self.n_paths, "alive_fraction": self.alive_fraction,
                "absorbed_fraction": dict(self.absorbed_fraction),
                "absorption_times": {k: vars(v) for k, v in self.absorption_times.items()}}


def _threads():
    try:
        n = int(os.environ.get("SOLVDIFF_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _normals(rng, n, k=1):
    # uniforms strictly inside (0, 1) so the inverse CDF stays finite
    u = (rng.integers(0, 1 << 53, size=(k, n), dtype=np.uint64).astype(float) + 0.5) * _U53
    z = ndtri(u)
    return z[0] if k == 1 else z.sum(axis=0) / math.sqrt(k)


def _run_chunk(spec, x0, cfg, k, n):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed, spawn_key=(k,))))
    lo, hi = spec.domain.lo, spec.domain.hi
    absorb = cfg.boundary_policy is BoundaryPolicy.ABSORB
    x = np.full(n, float(x0))
    idx = np.arange(n)
    fate = np.zeros(n, dtype=np.int8)  # 0 alive, -1 absorbed at lo, +1 at hi
    hit = np.full(n, math.nan)
    for step, t in zip(cfg.steps, cfg.times):
        if idx.size == 0:
            break
        xs = x[idx]
        # a full chunk of variates every step keeps each path's stream independent of n_paths
        dw = _normals(rng, CHUNK, cfg.noise_substeps)[idx] * math.sqrt(step)
        xn = xs + spec.drift(xs) * step + spec.vol(np.clip(xs, lo, hi)) * dw
        bad = ~np.isfinite(xn) | (np.abs(xn) > BLOWUP)
        if bad.any():
            j = idx[np.argmax(bad)]
            raise NumericBlowup(f"path {k * CHUNK + j} exploded near t = {t:.6g} (|x| > {BLOWUP:g})")
        x[idx] = xn
        if absorb:
            below, above = xn <= lo, xn >= hi
            if below.any() or above.any():
                fate[idx[below]], fate[idx[above]] = -1, 1
                hit[idx[below | above]] = t
                x[idx[below]], x[idx[above]] = lo, hi
                idx = idx[~(below | above)]
    return x, fate, hit


def simulate(spec, x0, cfg):
    """Simulate ``cfg.n_paths`` Euler-Maruyama paths of ``spec`` from ``x0`` up to ``cfg.horizon``."""
    if not spec.domain.contains(x0):
        raise OutOfDomain(f"x0 = {x0} is not an interior point of ({spec.domain.lo}, {spec.domain.hi})")
    sizes = [min(CHUNK, cfg.n_paths - s) for s in range(0, cfg.n_paths, CHUNK)]
    jobs = list(enumerate(sizes))
    workers = min(_threads(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda kn: _run_chunk(spec, x0, cfg, *kn), jobs))
    else:
        parts = [_run_chunk(spec, x0, cfg, k, n) for k, n in jobs]
    x = np.concatenate([p[0] for p in parts])
    fate = np.concatenate([p[1] for p in parts])
    hit = np.concatenate([p[2] for p in parts])
    times = {"lo": hit[fate == -1], "hi": hit[fate == 1]}
    return SimResult(
        terminal_values=x[fate == 0],
        absorbed_fraction={"lo": float(np.mean(fate == -1)), "hi": float(np.mean(fate == 1))},
        absorption_times={k: HitSummary.of(v) for k, v in times.items()},
        n_paths=cfg.n_paths,
        hit_times=times,
    )


def simulate_transformed(t, y0, cfg, grid=None):
    """Paths of Y = Y(X^h) from Y_0 = y0, reported in Y coordinates.

    X^h is simulated with its drift tabulated on ``grid`` (default
    :func:`~solvdiff.transform.drift_grid`); absorption at a base endpoint is
    credited to the Y endpoint it maps to.
    """
    from . import transform as tr

    x0 = tr.invert_y(t, y0)
    grid = tr.drift_grid(t.base) if grid is None else grid
    r = simulate(t.h_spec(grid), x0, cfg)
    frac, times = dict(r.absorbed_fraction), dict(r.hit_times)
    if not t.increasing:
        frac = {"lo": frac["hi"], "hi": frac["lo"]}
        times = {"lo": times["hi"], "hi": times["lo"]}
    return SimResult(terminal_values=np.asarray(t.y(r.terminal_values), dtype=float), absorbed_fraction=frac,
                     absorption_times={k: HitSummary.of(v) for k, v in times.items()}, n_paths=r.n_paths,
                     hit_times=times)


def ks_statistic(samples, cdf):
    """sup |F_n - F| between the empirical CDF of ``samples`` and the vectorized ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 100:
        raise TooFewSamples(f"need at least 100 samples, got {n}")
    if not np.all(np.isfinite(x)):
        raise InvalidParameter("samples must be finite")
    f = np.clip(np.asarray(cdf(x), dtype=float), 0.0, 1.0)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_threshold(n):
    """Soft 99% acceptance level for the KS statistic of n samples."""
    return 1.63 / math.sqrt(n)
