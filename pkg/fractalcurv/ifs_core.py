"""Random iterated function systems, environments, code words and prefractals.

A model is a finitely supported distribution over IFSs sharing one convex open
set O. A realization decides which IFS acts at every node of the code tree:
``Environment`` uses one IFS per level (homogeneous random fractal),
``RecursiveTree`` lets every node draw its own (random recursive set).

Similarities act on the plane through complex arithmetic,
``z -> a * z + b`` or ``z -> a * conj(z) + b`` when reflecting, with
``a = scale * exp(i * rotation)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from . import polygons
from .errors import DepthLimitError, DomainError, InvalidCodeError, ModelConfigError
from .seeding import mix64, mix64_array, to_unit, to_unit_array

logger = logging.getLogger("fractalcurv")

DEFAULT_MAX_DEPTH = 64
UOSC_TOL = 1e-9
PROB_TOL = 1e-12
# relative slack on the stopping inequalities
SLACK = 1e-12


@dataclass(frozen=True)
class Similarity:
    scale: float
    rotation: float = 0.0
    reflect: bool = False
    translation: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not 0.0 < self.scale < 1.0:
            raise ModelConfigError(f"similarity scale must lie in (0, 1), got {self.scale}")
        object.__setattr__(self, "translation", (float(self.translation[0]), float(self.translation[1])))

    @property
    def linear(self) -> complex:
        return self.scale * complex(math.cos(self.rotation), math.sin(self.rotation))

    @property
    def shift(self) -> complex:
        return complex(*self.translation)

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        z = pts[..., 0] + 1j * pts[..., 1]
        if self.reflect:
            z = np.conj(z)
        w = self.linear * z + self.shift
        return np.stack([w.real, w.imag], axis=-1)

    def compose(self, inner: "Similarity") -> "Similarity":
        """``self o inner``."""
        a_in, b_in = inner.linear, inner.shift
        if self.reflect:
            a_in, b_in = a_in.conjugate(), b_in.conjugate()
        a = self.linear * a_in
        b = self.linear * b_in + self.shift
        return Similarity(
            scale=self.scale * inner.scale,
            rotation=math.atan2(a.imag, a.real),
            reflect=self.reflect != inner.reflect,
            translation=(b.real, b.imag),
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Similarity":
        try:
            tx, ty = data.get("translate", (0.0, 0.0))
            return cls(
                scale=float(data["scale"]),
                rotation=math.radians(float(data.get("rotation_deg", 0.0))),
                reflect=bool(data.get("reflect", False)),
                translation=(float(tx), float(ty)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ModelConfigError(f"invalid map entry {data!r}: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scale": self.scale,
            "rotation_deg": math.degrees(self.rotation),
            "reflect": self.reflect,
            "translate": list(self.translation),
        }


@dataclass(frozen=True)
class IfsAtom:
    maps: Tuple[Similarity, ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) < 2:
            raise ModelConfigError("an IFS needs at least two maps")

    @property
    def N(self) -> int:
        return len(self.maps)

    @property
    def scales(self) -> np.ndarray:
        return np.array([m.scale for m in self.maps])


@dataclass(frozen=True, eq=False)
class RandomIfsModel:
    atoms: Tuple[IfsAtom, ...]
    probabilities: Tuple[float, ...]
    open_set: Tuple[Tuple[float, float], ...]
    big_R: Optional[float] = None

    def __post_init__(self):
        if len(self.atoms) != len(self.probabilities):
            raise ModelConfigError("atoms and probabilities differ in length")
        probs = [float(p) for p in self.probabilities]
        if any(p < 0 for p in probs):
            raise ModelConfigError("probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > PROB_TOL:
            raise ModelConfigError(f"probabilities sum to {sum(probs)!r}, expected 1")
        kept = [(a, p) for a, p in zip(self.atoms, probs) if p > 0]
        object.__setattr__(self, "atoms", tuple(a for a, _ in kept))
        object.__setattr__(self, "probabilities", tuple(p for _, p in kept))

        verts = np.asarray(self.open_set, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
            raise ModelConfigError("open_set must list at least three [x, y] vertices")
        if polygons.area(verts) <= 0 or not polygons.is_convex(verts):
            raise ModelConfigError("open_set must be a nondegenerate convex polygon")
        object.__setattr__(self, "open_set", tuple((float(x), float(y)) for x, y in verts))

        diam = polygons.diameter(verts)
        if self.big_R is None:
            object.__setattr__(self, "big_R", 1.5 * diam)
        elif not self.big_R > math.sqrt(2.0) * diam:
            raise ModelConfigError(f"big_R must exceed sqrt(2)*diam(O) = {math.sqrt(2.0) * diam:.6g}")
        self._check_open_set_condition()

    # -- derived quantities -------------------------------------------------

    @property
    def vertices(self) -> np.ndarray:
        return polygons.counterclockwise(np.asarray(self.open_set, dtype=np.float64))

    @property
    def diameter(self) -> float:
        return polygons.diameter(self.vertices)

    @property
    def area(self) -> float:
        return float(polygons.area(self.vertices))

    @property
    def r_min(self) -> float:
        return min(float(a.scales.min()) for a in self.atoms)

    @property
    def r_max(self) -> float:
        return max(float(a.scales.max()) for a in self.atoms)

    @property
    def expected_count(self) -> float:
        return sum(p * a.N for a, p in zip(self.atoms, self.probabilities))

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.probabilities)

    def draw_atoms(self, u: np.ndarray) -> np.ndarray:
        """Inverse-CDF lookup of atom indices for uniforms in [0, 1)."""
        idx = np.searchsorted(self.cumulative, u, side="right")
        return np.minimum(idx, len(self.atoms) - 1)

    def draw_atom(self, u: float) -> int:
        return int(self.draw_atoms(np.array([u]))[0])

    def _check_open_set_condition(self):
        base = self.vertices
        for j, atom in enumerate(self.atoms):
            images = [polygons.counterclockwise(m(base)) for m in atom.maps]
            for i, img in enumerate(images):
                if polygons.edge_clearance(img, base).min() < -UOSC_TOL:
                    raise ModelConfigError(f"atom {j}: image of map {i} leaves the open set")
            for a in range(len(images)):
                for b in range(a + 1, len(images)):
                    gap = float(polygons.separation(images[a], images[b]))
                    if gap < -UOSC_TOL:
                        raise ModelConfigError(f"atom {j}: images of maps {a} and {b} overlap")
                    if gap < -1e-12:
                        logger.warning(f"near-tangent images | atom={j} | maps={a},{b} | gap={gap:.3e}")

    # -- documents ------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RandomIfsModel":
        try:
            atoms = [IfsAtom(tuple(Similarity.from_dict(m) for m in a["maps"])) for a in data["atoms"]]
            probs = [float(a["prob"]) for a in data["atoms"]]
            open_set = tuple((float(x), float(y)) for x, y in data["open_set"])
        except (KeyError, TypeError, ValueError) as e:
            raise ModelConfigError(f"invalid model document: {e}") from e
        big_R = data.get("big_R")
        return cls(tuple(atoms), tuple(probs), open_set, None if big_R is None else float(big_R))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "atoms": [
                {"prob": p, "maps": [m.to_dict() for m in a.maps]}
                for a, p in zip(self.atoms, self.probabilities)
            ],
            "open_set": [list(v) for v in self.open_set],
            "big_R": self.big_R,
        }


# -- realizations --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Environment:
    """One IFS per construction level; level n is drawn from mix64(seed, offset + n)."""
    model: RandomIfsModel
    master_seed: int
    prefix: Tuple[int, ...]
    offset: int = 0
    root_hash: int = 0

    def atom_index(self, level: int) -> int:
        if level < 1:
            raise DomainError("levels are numbered from 1")
        if level <= len(self.prefix):
            return self.prefix[level - 1]
        return self.model.draw_atom(to_unit(mix64(self.master_seed, self.offset + level)))

    def atom(self, level: int) -> IfsAtom:
        return self.model.atoms[self.atom_index(level)]

    def atoms_for(self, depths: np.ndarray, hashes: np.ndarray) -> np.ndarray:
        """Atom used to expand nodes at the given depths."""
        depths = np.asarray(depths)
        out = np.empty(depths.shape, dtype=np.int64)
        for d in np.unique(depths):
            out[depths == d] = self.atom_index(int(d) + 1)
        return out

    def shifted(self, n: int = 1) -> "Environment":
        return Environment(self.model, self.master_seed, self.prefix[n:], self.offset + n)

    def child(self, i: int) -> "Environment":
        return self.shifted(1)


@dataclass(frozen=True, eq=False)
class RecursiveTree:
    """Every node draws its own IFS from its path hash."""
    model: RandomIfsModel
    root_hash: int

    def atoms_for(self, depths: np.ndarray, hashes: np.ndarray) -> np.ndarray:
        return self.model.draw_atoms(to_unit_array(mix64_array(hashes, 0)))

    def atom(self, level: int = 1) -> IfsAtom:
        if level != 1:
            raise DomainError("a recursive tree has no per-level IFS beyond its root")
        return self.model.atoms[int(self.atoms_for(np.zeros(1), np.array([self.root_hash], dtype=np.uint64))[0])]

    def child(self, i: int) -> "RecursiveTree":
        return RecursiveTree(self.model, mix64(self.root_hash, i + 1))


Realization = Union[Environment, RecursiveTree]


def sample_environment(model: RandomIfsModel, master_seed: int, depth: int) -> Environment:
    if depth < 1:
        raise DomainError("depth must be at least 1")
    seed = int(master_seed) & ((1 << 64) - 1)
    prefix = tuple(model.draw_atom(to_unit(mix64(seed, n))) for n in range(1, depth + 1))
    return Environment(model, seed, prefix)


# -- code words -----------------------------------------------------------------


@dataclass(frozen=True)
class CodeWord:
    """A finite word sigma with its ratio r_sigma and map f_sigma.

    The empty word has ratio 1 and ``map`` None: it stands for the identity,
    which is not a Similarity since those are strict contractions.
    """
    entries: Tuple[int, ...]
    ratio: float
    map: Optional[Similarity]

    def __len__(self):
        return len(self.entries)

    def is_prefix_of(self, other: "CodeWord") -> bool:
        return other.entries[: len(self.entries)] == self.entries


def compose_word(env: Environment, entries: Sequence[int]) -> CodeWord:
    """f_sigma = f^1_{sigma_1} o f^2_{sigma_2} o ... with its ratio r_sigma."""
    entries = tuple(int(e) for e in entries)
    f: Optional[Similarity] = None
    ratio = 1.0
    for level, e in enumerate(entries, start=1):
        atom = env.atom(level)
        if not 1 <= e <= atom.N:
            raise InvalidCodeError(f"entry {e} at level {level} outside 1..{atom.N}")
        g = atom.maps[e - 1]
        f = g if f is None else f.compose(g)
        ratio *= g.scale
    return CodeWord(entries, ratio, f)


# -- vectorized tree growth --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PieceSet:
    """Nodes of the code tree as parallel arrays."""
    linear: np.ndarray
    shift: np.ndarray
    reflect: np.ndarray
    ratio: np.ndarray
    depth: np.ndarray
    hashes: np.ndarray
    words: Optional[List[Tuple[int, ...]]] = None

    @classmethod
    def root(cls, root_hash: int = 0, track_words: bool = False) -> "PieceSet":
        return cls(
            linear=np.ones(1, dtype=np.complex128),
            shift=np.zeros(1, dtype=np.complex128),
            reflect=np.zeros(1, dtype=bool),
            ratio=np.ones(1),
            depth=np.zeros(1, dtype=np.int64),
            hashes=np.array([root_hash], dtype=np.uint64),
            words=[()] if track_words else None,
        )

    def __len__(self):
        return len(self.ratio)

    def subset(self, sel: np.ndarray) -> "PieceSet":
        idx = np.nonzero(sel)[0] if sel.dtype == bool else sel
        return PieceSet(
            self.linear[idx], self.shift[idx], self.reflect[idx], self.ratio[idx],
            self.depth[idx], self.hashes[idx],
            None if self.words is None else [self.words[i] for i in idx],
        )

    @staticmethod
    def concat(parts: List["PieceSet"]) -> "PieceSet":
        words = None
        if parts and parts[0].words is not None:
            words = [w for p in parts for w in p.words]
        return PieceSet(
            np.concatenate([p.linear for p in parts]),
            np.concatenate([p.shift for p in parts]),
            np.concatenate([p.reflect for p in parts]),
            np.concatenate([p.ratio for p in parts]),
            np.concatenate([p.depth for p in parts]),
            np.concatenate([p.hashes for p in parts]),
            words,
        )

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Images of ``points`` (V, 2) under every piece map, shape (P, V, 2)."""
        z = points[:, 0] + 1j * points[:, 1]
        z = np.where(self.reflect[:, None], np.conj(z)[None, :], z[None, :])
        w = self.linear[:, None] * z + self.shift[:, None]
        return np.stack([w.real, w.imag], axis=-1)

    def code_words(self) -> List[CodeWord]:
        if self.words is None:
            raise ValueError("piece set was grown without word tracking")
        out = []
        for k, w in enumerate(self.words):
            if not w:
                out.append(CodeWord((), 1.0, None))
                continue
            a, b = self.linear[k], self.shift[k]
            out.append(CodeWord(w, float(self.ratio[k]), Similarity(
                scale=float(self.ratio[k]),
                rotation=math.atan2(a.imag, a.real),
                reflect=bool(self.reflect[k]),
                translation=(b.real, b.imag),
            )))
        return out


def expand(realization: Realization, pieces: PieceSet) -> PieceSet:
    """All children of all pieces, in lexicographic word order."""
    model = realization.model
    atoms = realization.atoms_for(pieces.depth, pieces.hashes)
    parent_parts, map_parts, lin_parts, shift_parts, refl_parts, scale_parts = [], [], [], [], [], []
    for j in np.unique(atoms):
        sel = np.nonzero(atoms == j)[0]
        for i, g in enumerate(model.atoms[j].maps):
            parent_parts.append(sel)
            map_parts.append(np.full(len(sel), i, dtype=np.int64))
            lin_parts.append(np.full(len(sel), g.linear))
            shift_parts.append(np.full(len(sel), g.shift))
            refl_parts.append(np.full(len(sel), g.reflect))
            scale_parts.append(np.full(len(sel), g.scale))
    parent = np.concatenate(parent_parts)
    map_idx = np.concatenate(map_parts)
    order = np.lexsort((map_idx, parent))
    parent, map_idx = parent[order], map_idx[order]
    g_lin = np.concatenate(lin_parts)[order]
    g_shift = np.concatenate(shift_parts)[order]
    g_refl = np.concatenate(refl_parts)[order]
    g_scale = np.concatenate(scale_parts)[order]

    p_lin = pieces.linear[parent]
    p_refl = pieces.reflect[parent]
    lin = p_lin * np.where(p_refl, np.conj(g_lin), g_lin)
    shift = p_lin * np.where(p_refl, np.conj(g_shift), g_shift) + pieces.shift[parent]
    words = None
    if pieces.words is not None:
        words = [pieces.words[p] + (int(i) + 1,) for p, i in zip(parent, map_idx)]
    return PieceSet(
        linear=lin,
        shift=shift,
        reflect=p_refl ^ g_refl,
        ratio=pieces.ratio[parent] * g_scale,
        depth=pieces.depth[parent] + 1,
        hashes=mix64_array(pieces.hashes[parent], map_idx.astype(np.uint64) + np.uint64(1)),
        words=words,
    )


def _worst_case_depth(model: RandomIfsModel, target_ratio: float) -> int:
    if target_ratio >= 1.0:
        return 0
    return int(math.ceil(math.log(target_ratio) / math.log(model.r_max) - SLACK))


def grow(
    realization: Realization,
    done: Callable[[PieceSet], np.ndarray],
    target_ratio: float,
    max_depth: int = DEFAULT_MAX_DEPTH,
    track_words: bool = False,
) -> PieceSet:
    """Expand the tree until every branch satisfies ``done``."""
    active = PieceSet.root(realization.root_hash, track_words)
    finished = []
    while len(active):
        stop = done(active)
        if stop.any():
            finished.append(active.subset(stop))
        active = active.subset(~stop)
        if not len(active):
            break
        if int(active.depth.max()) >= max_depth:
            raise DepthLimitError(max(_worst_case_depth(realization.model, target_ratio), max_depth + 1), max_depth)
        active = expand(realization, active)
    return PieceSet.concat(finished)


def stopping_pieces(
    realization: Realization, r: float, max_depth: int = DEFAULT_MAX_DEPTH, track_words: bool = False
) -> PieceSet:
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    R = realization.model.big_R
    limit = r * (1.0 + SLACK)
    return grow(realization, lambda p: R * p.ratio <= limit, r / R, max_depth, track_words)


def stopping_set(env: Realization, r: float, max_depth: int = DEFAULT_MAX_DEPTH) -> List[CodeWord]:
    """Sigma(r): words with R r_sigma <= r < R r_{sigma minus its last entry}."""
    return stopping_pieces(env, r, max_depth, track_words=True).code_words()


def boundary_codes(env: Realization, r: float, max_depth: int = DEFAULT_MAX_DEPTH) -> List[CodeWord]:
    """Members of Sigma(r) whose polygon lies within 2r of the complement of f(O)."""
    model = env.model
    pieces = stopping_pieces(env, r, max_depth, track_words=True)
    words = pieces.code_words()
    if len(pieces) == 1 and not pieces.words[0]:
        return words
    base = model.vertices
    polys = pieces.apply(base)
    first_maps = model.atoms[int(env.atoms_for(np.zeros(1, dtype=np.int64),
                                               np.array([env.root_hash], dtype=np.uint64))[0])].maps
    first = np.array([w[0] - 1 for w in pieces.words])
    keep = np.zeros(len(pieces), dtype=bool)
    for i, g in enumerate(first_maps):
        sel = np.nonzero(first == i)[0]
        if not len(sel):
            continue
        outer = polygons.counterclockwise(g(base))
        clearance = polygons.edge_clearance(polys[sel].reshape(-1, 2), outer).reshape(len(sel), -1).min(axis=1)
        keep[sel] = clearance <= 2.0 * r * (1.0 + SLACK)
    return [w for w, k in zip(words, keep) if k]


def uniform_depth(env: Environment, diameter_bound: float, max_depth: int = DEFAULT_MAX_DEPTH) -> int:
    """Smallest n with max_sigma r_sigma * diam(O) <= diameter_bound."""
    model = env.model
    limit = diameter_bound * (1.0 + SLACK)
    worst = _worst_case_depth(model, diameter_bound / model.diameter)
    ratio, n = model.diameter, 0
    while ratio > limit and n < worst:
        n += 1
        ratio *= float(env.atom(n).scales.max())
    if n > max_depth:
        raise DepthLimitError(n, max_depth)
    return n


def prefractal_pieces(
    realization: Realization, diameter_bound: float, max_depth: int = DEFAULT_MAX_DEPTH
) -> PieceSet:
    """Pieces of the prefractal K_n: uniform depth for environments, per branch otherwise."""
    if not diameter_bound > 0:
        raise DomainError("diameter_bound must be positive")
    diam = realization.model.diameter
    if isinstance(realization, Environment):
        n = uniform_depth(realization, diameter_bound, max_depth)
        return grow(realization, lambda p: p.depth >= n, diameter_bound / diam, max_depth)
    limit = diameter_bound * (1.0 + SLACK)
    return grow(realization, lambda p: p.ratio * diam <= limit, diameter_bound / diam, max_depth)


def prefractal_polygons(
    env: Realization, diameter_bound: float, max_depth: int = DEFAULT_MAX_DEPTH
) -> np.ndarray:
    """{f_sigma(closure O)} for the prefractal at the given piece diameter, shape (P, V, 2)."""
    return prefractal_pieces(env, diameter_bound, max_depth).apply(env.model.vertices)


def gamma_bound(model: RandomIfsModel) -> float:
    """kappa_2 * 4^2 * R^2 / (r_min^2 * area(O)), kappa_2 = pi."""
    return math.pi * 16.0 * model.big_R ** 2 / (model.r_min ** 2 * model.area)


def neighbor_overlap_count(env: Realization, r: float, max_depth: int = DEFAULT_MAX_DEPTH) -> int:
    """Max over Sigma(r) of the number of pieces (itself included) within 2r of a piece."""
    pieces = stopping_pieces(env, r, max_depth)
    if len(pieces) == 1:
        return 1
    polys = polygons.counterclockwise(pieces.apply(env.model.vertices))
    centers = polygons.centroid(polys)
    reach = float(np.linalg.norm(polys - centers[:, None, :], axis=-1).max())
    pairs = cKDTree(centers).query_pairs(2.0 * r + 2.0 * reach + 1e-12, output_type="ndarray")
    counts = np.ones(len(pieces), dtype=np.int64)
    limit = 2.0 * r * (1.0 + SLACK)
    for start in range(0, len(pairs), 50_000):
        chunk = pairs[start:start + 50_000]
        near = polygons.convex_distance(polys[chunk[:, 0]], polys[chunk[:, 1]]) <= limit
        np.add.at(counts, chunk[near, 0], 1)
        np.add.at(counts, chunk[near, 1], 1)
    return int(counts.max())
