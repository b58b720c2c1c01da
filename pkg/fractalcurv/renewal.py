"""Scaling exponents and the renewal-theorem limit formulas.

D solves E sum_i r_i^D = 1, D_H solves E ln sum_i r_i^s = 0 and
eta = E sum_i |ln r_i| r_i^D is the mean of the associated distribution.
The mean fractal curvatures are (1/eta) int_0^L r^(D-k-1) R_{k,L}(r) dr, or a
lattice series in s when the log-ratios are commensurable.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate, optimize

from .errors import DivergenceError, DomainError, NonSummableError
from .exact_gasket import PiecewiseCurve
from .ifs_core import RandomIfsModel

logger = logging.getLogger("fractalcurv")

BRACKET = (0.0, 40.0)
LATTICE_TOL = 1e-9
LATTICE_MAX_MULTIPLE = 1_000_000
SERIES_TOL = 1e-10
QUAD_RTOL = 1e-8
# smallest rtol scipy.optimize.bisect accepts
BISECT_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class ScalingData:
    D: float
    D_H: float
    eta: float
    lattice_span: Optional[float] = None

    @property
    def is_lattice(self) -> bool:
        return self.lattice_span is not None

    def to_dict(self):
        return {"D": self.D, "D_H": self.D_H, "eta": self.eta, "lattice_span": self.lattice_span}


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """R_{k,L} known at sample radii, e.g. from Monte Carlo estimates.

    Between samples the curve is linear in r; below the first sample it continues
    as ``R(r0) * (r / r0) ** order``; above the last sample it is held constant up to L.
    """
    r: np.ndarray
    values: np.ndarray
    L: float
    stderr: Optional[np.ndarray] = None
    order: int = 0

    def __post_init__(self):
        r = np.asarray(self.r, dtype=np.float64)
        if len(r) < 2 or np.any(np.diff(r) <= 0) or r[0] <= 0 or r[-1] >= self.L:
            raise DomainError("sample radii must increase strictly inside (0, L)")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    @property
    def order_at_zero(self) -> int:
        return self.order

    def __call__(self, r):
        r = np.asarray(r, dtype=np.float64)
        out = np.interp(r, self.r, self.values)
        below = r < self.r[0]
        out = np.where(below, self.values[0] * (np.clip(r, 0.0, None) / self.r[0]) ** self.order, out)
        return out if out.ndim else float(out)


Curve = Union[PiecewiseCurve, SampledCurve]


def _per_atom_sums(model: RandomIfsModel, s: float) -> np.ndarray:
    return np.array([np.sum(a.scales ** s) for a in model.atoms])


def _bisect(fn: Callable[[float], float], what: str) -> float:
    lo, hi = BRACKET
    if not (fn(lo) > 0 > fn(hi)):
        raise DivergenceError(f"{what}: root not bracketed by {BRACKET}")
    return optimize.bisect(fn, lo, hi, xtol=1e-15, rtol=BISECT_RTOL, maxiter=200)


def solve_dimension(model: RandomIfsModel) -> float:
    """Root of E sum_i r_i^D = 1."""
    probs = np.asarray(model.probabilities)
    D = _bisect(lambda s: float(probs @ _per_atom_sums(model, s)) - 1.0, "dimension")
    logger.debug(f"dimension solved | D={D!r}")
    return D


def hausdorff_dimension(model: RandomIfsModel) -> float:
    probs = np.asarray(model.probabilities)
    return _bisect(lambda s: float(probs @ np.log(_per_atom_sums(model, s))), "hausdorff dimension")


def compute_eta(model: RandomIfsModel, D: float) -> float:
    total = 0.0
    for atom, p in zip(model.atoms, model.probabilities):
        total += p * float(np.sum(np.abs(np.log(atom.scales)) * atom.scales ** D))
    return total


def lattice_span(model: RandomIfsModel) -> Optional[float]:
    """Largest c with every |ln r| in the support an integer multiple of c, else None.

    Commensurability is decided on the ratios to the smallest log-ratio: q * ratio
    must lie within LATTICE_TOL of an integer for some q <= LATTICE_MAX_MULTIPLE.
    """
    logs = np.unique(np.concatenate([np.abs(np.log(a.scales)) for a in model.atoms]))
    keep = np.concatenate([[True], np.diff(logs) > 1e-12 * logs[1:]])
    logs = logs[keep]
    base = float(logs[0])
    if len(logs) == 1:
        return base
    ratios = logs[1:] / base
    q = np.arange(1, LATTICE_MAX_MULTIPLE + 1, dtype=np.float64)
    ok = np.ones(len(q), dtype=bool)
    for x in ratios:
        qx = q * x
        ok &= np.abs(qx - np.rint(qx)) <= LATTICE_TOL
    hits = np.nonzero(ok)[0]
    if not len(hits):
        return None
    qmin = int(q[hits[0]])
    multiples = [qmin] + [int(round(qmin * x)) for x in ratios]
    g = 0
    for m in multiples:
        g = math.gcd(g, m)
    return base * g / qmin


def scaling_data(model: RandomIfsModel) -> ScalingData:
    D = solve_dimension(model)
    return ScalingData(D=D, D_H=hausdorff_dimension(model), eta=compute_eta(model, D), lattice_span=lattice_span(model))


def _exact_integral(curve: PiecewiseCurve, e: float, L: float) -> float:
    """int_0^L r^(e-1) curve(r) dr, term by term."""
    total = 0.0
    for i, coeffs in enumerate(curve.coefficients):
        a, b = curve.breakpoints[i], min(curve.breakpoints[i + 1], L)
        if a >= b:
            break
        for m, c in enumerate(coeffs):
            if c == 0.0:
                continue
            power = e + m
            if a == 0.0 and power <= 0:
                raise DivergenceError(f"integrand ~ r^{power - 1:g} at 0 is not integrable")
            if power == 0:
                total += c * math.log(b / a)
            else:
                total += c * (b ** power - a ** power) / power
    return total


def _quadrature_integral(curve: Curve, e: float, L: float) -> float:
    """Same integral after r = exp(-t): int_{-ln L}^inf exp(-e t) R(exp(-t)) dt."""
    if e + curve.order_at_zero <= 0:
        raise DivergenceError(f"integrand ~ r^{e + curve.order_at_zero - 1:g} at 0 is not integrable")

    r_cap = math.nextafter(curve.L, 0.0)

    def f(t):
        r = math.exp(-t)
        if r == 0.0:
            # exp(-e t) has already vanished here
            return 0.0
        return math.exp(-e * t) * float(curve(min(r, r_cap)))

    if isinstance(curve, PiecewiseCurve):
        edges = [0.0] + [b for b in curve.breakpoints[1:-1] if b < L] + [L]
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            t_lo = -math.log(b)
            t_hi = math.inf if a == 0.0 else -math.log(a)
            value, _ = integrate.quad(f, t_lo, t_hi, epsrel=QUAD_RTOL, epsabs=0.0, limit=200)
            total += value
        return total

    r0 = float(curve.r[0])
    tail = float(curve.values[0]) * r0 ** e / (e + curve.order)
    t_samples = -np.log(curve.r[curve.r < L])
    t_lo, t_hi = -math.log(L), -math.log(r0)
    value, _ = integrate.quad(
        f, t_lo, t_hi, epsrel=QUAD_RTOL, epsabs=0.0, limit=max(200, 4 * len(t_samples)),
        points=t_samples[(t_samples > t_lo) & (t_samples < t_hi)],
    )
    return value + tail


def curvature_integral(curve: Curve, scaling: ScalingData, k: int, L: Optional[float] = None,
                       method: str = "exact") -> float:
    """int_0^L r^(D-k-1) R_{k,L}(r) dr."""
    L = curve.L if L is None else L
    if not 0 < L <= curve.L:
        raise DomainError(f"L must lie in (0, {curve.L}]")
    e = scaling.D - k
    if method == "exact":
        if not isinstance(curve, PiecewiseCurve):
            raise DomainError("exact integration needs a piecewise polynomial curve")
        return _exact_integral(curve, e, L)
    if method == "quadrature":
        return _quadrature_integral(curve, e, L)
    raise DomainError(f"unknown integration method {method!r}")


def frac_limit(curve: Curve, scaling: ScalingData, k: int, L: Optional[float] = None,
               method: Optional[str] = None) -> float:
    """(1/eta) int_0^L r^(D-k-1) R_{k,L}(r) dr.

    Piecewise curves are integrated exactly unless ``method="quadrature"``;
    sampled curves always use quadrature.
    """
    if method is None:
        method = "exact" if isinstance(curve, PiecewiseCurve) else "quadrature"
    return curvature_integral(curve, scaling, k, L, method) / scaling.eta


def integral_stderr(curve: SampledCurve, scaling: ScalingData, k: int) -> float:
    """Standard error of the sampled-curve integral from independent sample stderrs.

    Uses the trapezoid weights of the samples in r; the power-law tail carries
    the first sample's error.
    """
    if curve.stderr is None:
        return 0.0
    e = scaling.D - k
    r = curve.r
    w = np.zeros(len(r))
    dr = np.diff(r)
    w[:-1] += 0.5 * dr
    w[1:] += 0.5 * dr
    w[-1] += curve.L - r[-1]
    w[0] += r[0] / (e + curve.order)
    contrib = w * r ** (e - 1.0) * np.asarray(curve.stderr)
    return float(np.sqrt(np.sum(contrib ** 2)))


def _sup_abs(curve: Curve) -> float:
    if isinstance(curve, PiecewiseCurve):
        return max(sum(abs(c) * curve.breakpoints[i + 1] ** m for m, c in enumerate(coeffs))
                   for i, coeffs in enumerate(curve.coefficients))
    return float(np.abs(curve.values).max())


def lattice_series(curve: Curve, scaling: ScalingData, k: int, s: float) -> float:
    """(c/eta) sum_m exp((k-D)(s+mc)) R(exp(-(s+mc))), R taken as 0 for r >= L."""
    c = scaling.lattice_span
    if c is None:
        raise DomainError("lattice series needs a lattice model")
    if not 0.0 <= s < c:
        raise DomainError(f"s must lie in [0, {c})")
    rate = k - scaling.D
    if rate >= 0:
        raise NonSummableError(f"series terms do not decay for k={k} >= D={scaling.D:.6g}")
    bound = _sup_abs(curve)
    decay = math.exp(rate * c)
    m = math.floor((-math.log(curve.L) - s) / c) + 1
    total = 0.0
    while True:
        t = s + m * c
        weight = math.exp(rate * t)
        total += weight * float(curve(math.exp(-t)))
        m += 1
        if bound * weight * decay / (1.0 - decay) < SERIES_TOL:
            break
    return c * total / scaling.eta


def check_L_invariance(
    model: RandomIfsModel,
    k: int,
    L1: float,
    L2: float,
    curve_source: Callable[[float], Curve],
    scaling: Optional[ScalingData] = None,
) -> Tuple[float, float]:
    """The integrals int_0^L r^(D-k-1) R_{k,L}(r) dr for L1 and L2; equal in theory."""
    if not (L1 > 0 and L2 > 0):
        raise DomainError("L1 and L2 must be positive")
    scaling = scaling or scaling_data(model)
    values = []
    for L in (L1, L2):
        curve = curve_source(L)
        method = "exact" if isinstance(curve, PiecewiseCurve) else "quadrature"
        values.append(curvature_integral(curve, scaling, k, min(L, curve.L), method))
    logger.info(f"L invariance | k={k} | L1={L1:.6g} | L2={L2:.6g} | I1={values[0]:.6g} | I2={values[1]:.6g}")
    return values[0], values[1]
