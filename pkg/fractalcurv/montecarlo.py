"""Monte Carlo estimates of mean curvatures over seeded replicas.

Replica m of a run uses the seed ``mix64(master_seed, m)``; in homogeneous mode
that seed addresses the per-level IFS draws, in recursive mode it is the root
hash of the code tree. Replicas are evaluated on a thread pool and reduced in
replica order, so a run is reproducible regardless of worker count.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import DomainError, InsufficientDataError, ModelConfigError, ResolutionError, UnsupportedOrderError
from .grid_geometry import CurvatureVector, GridSpec, curvature_vector, distance_field, rasterize_polygons
from .ifs_core import (
    DEFAULT_MAX_DEPTH,
    Environment,
    RandomIfsModel,
    Realization,
    RecursiveTree,
    gamma_bound,
    neighbor_overlap_count,
    prefractal_pieces,
)
from .renewal import SampledCurve, solve_dimension
from .seeding import replica_seed

logger = logging.getLogger("fractalcurv")

MODES = ("homogeneous", "recursive")
MIN_CELLS_PER_EPS = 8

Progress = Callable[[int, int], None]


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: Optional[float]
    n: int

    @classmethod
    def from_samples(cls, values) -> "Estimate":
        v = np.asarray(values, dtype=np.float64)
        stderr = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) >= 2 else None
        return cls(float(v.mean()), stderr, len(v))

    def scaled(self, factor: float) -> "Estimate":
        return Estimate(self.mean * factor, None if self.stderr is None else self.stderr * abs(factor), self.n)

    def combined_stderr(self, other: "Estimate") -> Optional[float]:
        if self.stderr is None or other.stderr is None:
            return None
        return math.hypot(self.stderr, other.stderr)


@dataclass(frozen=True)
class Schedule:
    """Geometric radii eps_start * ratio**m, m = 0..count-1."""
    eps_start: float
    ratio: float
    count: int

    def __post_init__(self):
        if not self.eps_start > 0:
            raise DomainError("schedule start must be positive")
        if not 0.0 < self.ratio < 1.0:
            raise DomainError("schedule ratio must lie in (0, 1)")
        if self.count < 1:
            raise DomainError("schedule needs at least one radius")

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """``START:RATIO:COUNT``; RATIO may be a power such as ``2^-0.25``."""
        try:
            start, ratio, count = text.split(":")
            if "^" in ratio:
                base, exponent = ratio.split("^")
                ratio_value = float(base) ** float(exponent)
            else:
                ratio_value = float(ratio)
            return cls(float(start), ratio_value, int(count))
        except ValueError as e:
            raise ModelConfigError(f"schedule must look like START:RATIO:COUNT, got {text!r}") from e

    @property
    def radii(self) -> np.ndarray:
        return self.eps_start * self.ratio ** np.arange(self.count)

    def check(self, min_eps: float):
        smallest = float(self.radii[-1])
        if smallest < min_eps:
            raise ResolutionError(f"schedule reaches eps={smallest:.6g} below the minimum {min_eps:.6g}")


@dataclass(frozen=True, eq=False)
class RunConfig:
    model: RandomIfsModel
    mode: str = "homogeneous"
    samples: int = 200
    master_seed: int = 0
    cells_per_eps: int = 32
    k_set: Tuple[int, ...] = (0, 1, 2)
    max_depth: int = DEFAULT_MAX_DEPTH
    min_eps: float = 1e-3
    threads: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModelConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.samples < 1:
            raise ModelConfigError("samples must be at least 1")
        if self.cells_per_eps < MIN_CELLS_PER_EPS:
            raise ModelConfigError(f"cells_per_eps must be at least {MIN_CELLS_PER_EPS}")
        k_set = tuple(sorted(set(int(k) for k in self.k_set)))
        if not k_set or any(k not in (0, 1, 2) for k in k_set):
            raise UnsupportedOrderError(f"k-set must be a nonempty subset of {{0, 1, 2}}, got {self.k_set}")
        object.__setattr__(self, "k_set", k_set)

    @property
    def workers(self) -> int:
        if self.threads:
            return max(1, int(self.threads))
        return min(4, os.cpu_count() or 1)

    def check_radius(self, eps: float):
        if eps < self.min_eps:
            raise ResolutionError(f"eps={eps:.6g} is below the minimum resolvable radius {self.min_eps:.6g}")


def realization(config: RunConfig, replica: int) -> Realization:
    seed = replica_seed(config.master_seed, replica)
    if config.mode == "homogeneous":
        return Environment(config.model, seed, ())
    return RecursiveTree(config.model, seed)


def curvature_of(real: Realization, eps: float, cells_per_eps: int, max_depth: int = DEFAULT_MAX_DEPTH) -> CurvatureVector:
    """Prefractal at piece diameter h = eps / cells_per_eps, rasterized, measured at eps."""
    model = real.model
    h = eps / cells_per_eps
    polys = prefractal_pieces(real, h, max_depth).apply(model.vertices)
    grid = GridSpec.covering(model.vertices, eps, h)
    mask = rasterize_polygons(polys, grid, mark_centroids=True)
    return curvature_vector(distance_field(mask, grid), eps, grid)


def _run_replicas(config: RunConfig, fn: Callable[[int], np.ndarray], progress: Optional[Progress] = None) -> np.ndarray:
    """Evaluate ``fn`` for replicas 0..M-1 and stack the results in replica order."""
    total = config.samples
    results: List[Optional[np.ndarray]] = [None] * total
    done = 0
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = {executor.submit(fn, m): m for m in range(total)}
        for future in as_completed(futures):
            m = futures[future]
            try:
                results[m] = np.asarray(future.result(), dtype=np.float64)
            except Exception as e:
                logger.error(f"replica failed | replica={m} | error={e}")
                for other in futures:
                    other.cancel()
                raise
            done += 1
            if progress is not None:
                progress(done, total)
    return np.stack(results)


def sample_curvature(config: RunConfig, replica: int, eps: float) -> CurvatureVector:
    config.check_radius(eps)
    cv = curvature_of(realization(config, replica), eps, config.cells_per_eps, config.max_depth)
    logger.debug(f"replica done | replica={replica} | eps={eps:.6g} | c0={cv.c0}")
    return cv


def expected_curvature(config: RunConfig, eps: float, progress: Optional[Progress] = None) -> Dict[int, Estimate]:
    config.check_radius(eps)
    samples = _run_replicas(config, lambda m: sample_curvature(config, m, eps).as_array(), progress)
    return {k: Estimate.from_samples(samples[:, k]) for k in config.k_set}


@dataclass(frozen=True)
class TableRow:
    eps: float
    raw: Dict[int, Estimate]
    rescaled: Dict[int, Estimate]


def rescaled_table(
    config: RunConfig, schedule: Schedule, D: Optional[float] = None, progress: Optional[Progress] = None
) -> List[TableRow]:
    """One row per schedule radius with eps^(D-k) times the raw estimates."""
    schedule.check(config.min_eps)
    D = solve_dimension(config.model) if D is None else D
    rows = []
    for eps in schedule.radii:
        raw = expected_curvature(config, float(eps), progress)
        rescaled = {k: est.scaled(float(eps) ** (D - k)) for k, est in raw.items()}
        rows.append(TableRow(float(eps), raw, rescaled))
        logger.info(f"radius done | eps={eps:.6g} | samples={config.samples} | mode={config.mode}")
    return rows


def cesaro_average(rows: Sequence[TableRow], skip: int = 0) -> Dict[int, float]:
    """Trapezoidal mean of the rescaled values over ln(eps), divided by the log-span.

    ``skip`` drops that many of the largest radii first; the averaged limit does
    not depend on any finite stretch of large radii.
    """
    if skip < 0:
        raise DomainError(f"skip must be non-negative, got {skip}")
    ordered = sorted(rows, key=lambda row: row.eps)[: len(rows) - skip]
    if len(ordered) < 3:
        raise InsufficientDataError("Cesaro average needs at least 3 radii")
    x = np.log([row.eps for row in ordered])
    span = x[-1] - x[0]
    out = {}
    for k in ordered[0].rescaled:
        y = np.array([row.rescaled[k].mean for row in ordered])
        out[k] = float(integrate.trapezoid(y, x) / span)
    return out


def expectation_bound_constant(rows: Sequence[TableRow], D: float, big_R: float) -> Dict[int, float]:
    """Smallest d'_k with |E C_k(F(eps))| <= d'_k eps^(k-D) |ln(eps/R)| on every row."""
    out: Dict[int, float] = {}
    for row in rows:
        log_term = abs(math.log(row.eps / big_R))
        if log_term == 0.0:
            continue
        for k, est in row.raw.items():
            ratio = abs(est.mean) / (row.eps ** (k - D) * log_term)
            out[k] = max(out.get(k, 0.0), ratio)
    return out


def _xi(config: RunConfig, replica: int, L: float, r: float) -> np.ndarray:
    """C(F(r)) minus the scaled child terms for first-level pieces with r <= L r_i, all k."""
    real = realization(config, replica)
    xi = curvature_of(real, r, config.cells_per_eps, config.max_depth).as_array()
    powers = np.arange(3)
    cache: Dict[float, np.ndarray] = {}
    for i, g in enumerate(real.atom(1).maps):
        if r > L * g.scale:
            continue
        if isinstance(real, Environment):
            if g.scale not in cache:
                cache[g.scale] = curvature_of(real.shifted(1), r / g.scale, config.cells_per_eps, config.max_depth).as_array()
            child = cache[g.scale]
        else:
            child = curvature_of(real.child(i), r / g.scale, config.cells_per_eps, config.max_depth).as_array()
        xi -= g.scale ** powers * child
    return xi


def _xi_samples(config: RunConfig, L: float, r: float, progress: Optional[Progress]) -> np.ndarray:
    if not 0.0 < r < L:
        raise DomainError(f"r must lie in (0, L={L}), got {r}")
    config.check_radius(r)
    return _run_replicas(config, lambda m: _xi(config, m, L, r), progress)


def empirical_R_all(config: RunConfig, L: float, r: float, progress: Optional[Progress] = None) -> Dict[int, Estimate]:
    samples = _xi_samples(config, L, r, progress)
    return {k: Estimate.from_samples(samples[:, k]) for k in config.k_set}


def empirical_R(config: RunConfig, k: int, L: float, r: float, progress: Optional[Progress] = None) -> Estimate:
    """Estimate of R_{k,L}(r) = E C_k(F(r)) - E sum_i 1{r <= L r_i} C_k(F_i(r))."""
    if k not in (0, 1, 2):
        raise UnsupportedOrderError(f"k must be 0, 1 or 2, got {k}")
    return Estimate.from_samples(_xi_samples(config, L, r, progress)[:, k])


def empirical_curve(
    config: RunConfig, k: int, L: float, radii: Sequence[float], progress: Optional[Progress] = None
) -> SampledCurve:
    estimates = [empirical_R(config, k, L, float(r), progress) for r in radii]
    return SampledCurve(
        r=np.asarray(radii, dtype=np.float64),
        values=np.array([e.mean for e in estimates]),
        L=L,
        stderr=np.array([np.nan if e.stderr is None else e.stderr for e in estimates]),
        order=k,
    )


@dataclass(frozen=True)
class ModeRow:
    r: float
    homogeneous: Estimate
    recursive: Estimate

    @property
    def difference(self) -> float:
        return self.homogeneous.mean - self.recursive.mean

    @property
    def combined_stderr(self) -> Optional[float]:
        return self.homogeneous.combined_stderr(self.recursive)


def mode_comparison(
    homogeneous: RunConfig,
    recursive: RunConfig,
    k: int,
    L: float,
    radii: Sequence[float],
    progress: Optional[Progress] = None,
) -> List[ModeRow]:
    """Paired empirical R estimates of the two constructions on one radius grid."""
    if homogeneous.model is not recursive.model and homogeneous.model.to_dict() != recursive.model.to_dict():
        raise DomainError("mode comparison needs one model for both runs")
    if homogeneous.mode != "homogeneous" or recursive.mode != "recursive":
        raise DomainError("mode comparison pairs a homogeneous run with a recursive run")
    rows = []
    for r in radii:
        rows.append(ModeRow(
            float(r),
            empirical_R(homogeneous, k, L, float(r), progress),
            empirical_R(recursive, k, L, float(r), progress),
        ))
    return rows


@dataclass(frozen=True)
class GammaAudit:
    radii: Tuple[float, ...]
    observed: Tuple[int, ...]
    bound: float

    @property
    def observed_max(self) -> int:
        return max(self.observed) if self.observed else 0

    @property
    def within_bound(self) -> bool:
        return self.observed_max <= self.bound


def gamma_audit(config: RunConfig, schedule: Schedule, progress: Optional[Progress] = None) -> GammaAudit:
    """Largest neighbor count per radius over all replicas, against the constant bound."""
    radii = tuple(float(r) for r in schedule.radii)

    def counts(m: int) -> np.ndarray:
        real = realization(config, m)
        return np.array([neighbor_overlap_count(real, r, config.max_depth) for r in radii])

    table = _run_replicas(config, counts, progress)
    observed = tuple(int(v) for v in table.max(axis=0))
    bound = gamma_bound(config.model)
    logger.info(f"gamma audit | observed_max={max(observed)} | bound={bound:.6g}")
    return GammaAudit(radii, observed, bound)
