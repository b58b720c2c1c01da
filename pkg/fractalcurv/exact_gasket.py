"""Closed forms for the random gasket family.

The family mixes two IFSs on the unit triangle T: G (three maps of ratio 1/2,
the Sierpinski gasket) with probability p and H (six maps of ratio 1/3) with
probability 1 - p. With L = sqrt(3)/6 the curvature integrands R_{k,L} are
piecewise polynomial in r and the mean fractal curvatures have closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Tuple

import numpy as np

from .errors import DomainError, NotGasketFamilyError, UnsupportedOrderError
from .grid_geometry import CurvatureVector
from .ifs_core import IfsAtom, RandomIfsModel, Similarity

if TYPE_CHECKING:
    from .renewal import ScalingData

SQRT3 = math.sqrt(3.0)
GASKET_L = SQRT3 / 6.0
TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2.0))
GASKET_BIG_R = 1.5

G_TRANSLATIONS = ((0.0, 0.0), (0.5, 0.0), (0.25, SQRT3 / 4.0))
H_TRANSLATIONS = (
    (0.0, 0.0), (1.0 / 3.0, 0.0), (2.0 / 3.0, 0.0),
    (1.0 / 6.0, SQRT3 / 6.0), (0.5, SQRT3 / 6.0), (1.0 / 3.0, SQRT3 / 3.0),
)


@dataclass(frozen=True)
class GasketParams:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class PiecewiseCurve:
    """Polynomial pieces on [b_{i-1}, b_i); ``coefficients[i][m]`` multiplies r**m."""
    breakpoints: Tuple[float, ...]
    coefficients: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=np.float64)
        if len(b) != len(self.coefficients) + 1 or b[0] != 0.0 or np.any(np.diff(b) <= 0):
            raise DomainError("breakpoints must increase from 0 and bound every piece")

    @property
    def L(self) -> float:
        return self.breakpoints[-1]

    @property
    def order_at_zero(self) -> int:
        """Lowest power with a nonzero coefficient on the first piece."""
        for m, a in enumerate(self.coefficients[0]):
            if a != 0.0:
                return m
        return len(self.coefficients[0])

    def __call__(self, r):
        r = np.asarray(r, dtype=np.float64)
        if np.any((r <= 0) | (r >= self.L)):
            raise DomainError("piecewise curve evaluated outside (0, L)")
        idx = np.searchsorted(self.breakpoints, r, side="right") - 1
        out = np.zeros_like(r)
        for i, coeffs in enumerate(self.coefficients):
            sel = idx == i
            out[sel] = np.polynomial.polynomial.polyval(r[sel], coeffs)
        return out if out.ndim else float(out)


def steiner_triangle(r: float) -> CurvatureVector:
    """Curvatures of the parallel set of the unit equilateral triangle."""
    if r < 0:
        raise DomainError("r must be nonnegative")
    return CurvatureVector(1, 1.5 + math.pi * r, SQRT3 / 4.0 + 3.0 * r + math.pi * r * r)


def intersection_C1(kind: str, r: float) -> float:
    """C1 of the intersection of the parallel sets of two or three touching pieces."""
    if not r > 0:
        raise DomainError("r must be positive")
    if kind == "pair":
        return (2.0 * math.pi / 3.0 + SQRT3) * r
    if kind == "triple":
        return math.pi * r
    raise DomainError(f"unknown intersection kind {kind!r}")


def _c(p: float) -> float:
    return 3.0 * p * (math.pi + 2.0 * SQRT3) - (9.0 * SQRT3 + 5.0 * math.pi)


def _c_tilde(p: float) -> float:
    return math.pi - 3.0 * p * (math.pi + SQRT3)


def r_curve(k: int, params: GasketParams) -> PiecewiseCurve:
    L = GASKET_L
    breaks = (0.0, L / 3.0, L / 2.0, L)
    p = params.p
    if k == 0:
        return PiecewiseCurve(breaks, ((5.0 * p - 8.0,), (1.0 - 4.0 * p,), (1.0,)))
    if k == 1:
        return PiecewiseCurve(breaks, (
            (0.0, _c(p)),
            (1.5 * (1.0 - p), _c_tilde(p)),
            (1.5, math.pi),
        ))
    raise UnsupportedOrderError(f"no closed-form curve for k={k}; only k in {{0, 1}}")


def closed_form_frac(k: int, params: GasketParams, scaling: "ScalingData") -> float:
    """Mean fractal curvature of order k (averaged limit in the lattice cases)."""
    if k not in (0, 1, 2):
        raise UnsupportedOrderError(f"k must be 0, 1 or 2, got {k}")
    p, L = params.p, GASKET_L
    D, eta = scaling.D, scaling.eta
    if k == 0:
        return L ** D / (D * eta) * (1.0 - (1.0 - p) * 3.0 ** (2.0 - D) - p * 2.0 ** (2.0 - D))
    if D == 1.0:
        raise DomainError("D = 1 makes the constant-piece term degenerate")
    c, ct = _c(p), _c_tilde(p)
    c1 = (
        L ** D / (D * eta) * (3.0 ** -D * (c - ct) + 2.0 ** -D * (ct - math.pi) + math.pi)
        + 3.0 * L ** (D - 1.0) / (2.0 * (D - 1.0) * eta) * (1.0 - (1.0 - p) * 3.0 ** (1.0 - D) - p * 2.0 ** (1.0 - D))
    )
    if k == 1:
        return c1
    return 2.0 / (2.0 - D) * c1


def _atom(scale: float, translations: Sequence[Tuple[float, float]]) -> IfsAtom:
    return IfsAtom(tuple(Similarity(scale, translation=t) for t in translations))


def gasket_model(p: float) -> RandomIfsModel:
    """The gasket family at mixing probability p (atoms of probability 0 are dropped)."""
    GasketParams(p)
    return RandomIfsModel(
        atoms=(_atom(0.5, G_TRANSLATIONS), _atom(1.0 / 3.0, H_TRANSLATIONS)),
        probabilities=(p, 1.0 - p),
        open_set=TRIANGLE,
        big_R=GASKET_BIG_R,
    )


def _same_atom(atom: IfsAtom, scale: float, translations, tol: float) -> bool:
    if atom.N != len(translations):
        return False
    want = sorted(translations)
    have = sorted(m.translation for m in atom.maps)
    for m in atom.maps:
        if abs(m.scale - scale) > tol or m.reflect or abs(math.remainder(m.rotation, 2 * math.pi)) > tol:
            return False
    return all(abs(a - b) <= tol for u, v in zip(want, have) for a, b in zip(u, v))


def match_gasket(model: RandomIfsModel, tol: float = 1e-9) -> GasketParams:
    """Recover p for a model of the gasket family."""
    verts = sorted(tuple(v) for v in model.open_set)
    if any(abs(a - b) > tol for u, w in zip(verts, sorted(TRIANGLE)) for a, b in zip(u, w)) or len(verts) != 3:
        raise NotGasketFamilyError("open set is not the unit triangle")
    if abs(model.big_R - GASKET_BIG_R) > tol:
        raise NotGasketFamilyError(f"big_R must be {GASKET_BIG_R} for the gasket family")
    p = 0.0
    for atom, prob in zip(model.atoms, model.probabilities):
        if _same_atom(atom, 0.5, G_TRANSLATIONS, tol):
            p += prob
        elif not _same_atom(atom, 1.0 / 3.0, H_TRANSLATIONS, tol):
            raise NotGasketFamilyError("model contains an atom outside the gasket family")
    return GasketParams(min(max(p, 0.0), 1.0))
