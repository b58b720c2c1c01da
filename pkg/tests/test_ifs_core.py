"""
Tests for fractalcurv.ifs_core - models, environments, code words and prefractals.
"""
import math

import numpy as np
import pytest

from fractalcurv import polygons
from fractalcurv.errors import DepthLimitError, DomainError, InvalidCodeError, ModelConfigError
from fractalcurv.ifs_core import (
    Environment,
    IfsAtom,
    RandomIfsModel,
    RecursiveTree,
    Similarity,
    boundary_codes,
    compose_word,
    gamma_bound,
    neighbor_overlap_count,
    prefractal_polygons,
    sample_environment,
    stopping_set,
)

SQUARE = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
SQRT3 = math.sqrt(3.0)


def two_map_square(scale_a=0.5, scale_b=0.25):
    return IfsAtom((
        Similarity(scale_a, translation=(0.0, 0.0)),
        Similarity(scale_b, translation=(0.5, 0.5)),
    ))


class TestSimilarity:
    """Tests for Similarity maps and their composition."""

    @pytest.mark.parametrize("outer_reflect", [False, True])
    @pytest.mark.parametrize("inner_reflect", [False, True])
    def test_compose_matches_sequential_application(self, outer_reflect, inner_reflect):
        """(f o g)(x) must equal f(g(x)) for every reflection combination."""
        f = Similarity(0.5, rotation=0.7, reflect=outer_reflect, translation=(0.2, -0.1))
        g = Similarity(0.3, rotation=-1.9, reflect=inner_reflect, translation=(1.5, 0.4))
        pts = np.random.default_rng(1).normal(size=(20, 2))
        np.testing.assert_allclose(f.compose(g)(pts), f(g(pts)), atol=1e-12)

    def test_scale_must_contract(self):
        """Scales outside (0, 1) are rejected."""
        with pytest.raises(ModelConfigError):
            Similarity(1.0)
        with pytest.raises(ModelConfigError):
            Similarity(0.0)

    def test_dict_round_trip(self):
        """to_dict/from_dict preserve the map."""
        f = Similarity(0.4, rotation=math.radians(30), reflect=True, translation=(0.1, 0.2))
        g = Similarity.from_dict(f.to_dict())
        pts = np.array([[0.3, 0.9], [1.0, -2.0]])
        np.testing.assert_allclose(f(pts), g(pts), atol=1e-14)


class TestRandomIfsModel:
    """Tests for model validation."""

    def test_gasket_defaults(self, gasket_half):
        """The gasket family carries R = 3/2 and both atoms."""
        assert gasket_half.big_R == 1.5
        assert len(gasket_half.atoms) == 2
        assert gasket_half.r_min == pytest.approx(1 / 3)
        assert gasket_half.r_max == pytest.approx(1 / 2)

    def test_zero_probability_atoms_dropped(self, gasket_p1):
        """Atoms with probability 0 are removed at construction."""
        assert len(gasket_p1.atoms) == 1
        assert gasket_p1.probabilities == (1.0,)

    def test_probabilities_must_sum_to_one(self):
        """A probability vector off by more than 1e-12 is rejected."""
        with pytest.raises(ModelConfigError):
            RandomIfsModel((two_map_square(), two_map_square()), (0.5, 0.4), SQUARE)

    def test_negative_probability_rejected(self):
        with pytest.raises(ModelConfigError):
            RandomIfsModel((two_map_square(), two_map_square()), (1.5, -0.5), SQUARE)

    def test_overlapping_images_rejected(self):
        """Images whose interiors overlap violate the open set condition."""
        atom = IfsAtom((Similarity(0.6), Similarity(0.6, translation=(0.3, 0.3))))
        with pytest.raises(ModelConfigError):
            RandomIfsModel((atom,), (1.0,), SQUARE)

    def test_image_outside_open_set_rejected(self):
        atom = IfsAtom((Similarity(0.5), Similarity(0.5, translation=(0.8, 0.0))))
        with pytest.raises(ModelConfigError):
            RandomIfsModel((atom,), (1.0,), SQUARE)

    def test_big_R_default_and_lower_bound(self):
        """Default R is 1.5 diam(O); anything up to sqrt(2) diam(O) is rejected."""
        model = RandomIfsModel((two_map_square(),), (1.0,), SQUARE)
        assert model.big_R == pytest.approx(1.5 * math.sqrt(2.0))
        with pytest.raises(ModelConfigError):
            RandomIfsModel((two_map_square(),), (1.0,), SQUARE, big_R=1.4 * math.sqrt(2.0))

    def test_nonconvex_open_set_rejected(self):
        dart = ((0.0, 0.0), (1.0, 0.5), (0.0, 1.0), (0.3, 0.5))
        with pytest.raises(ModelConfigError):
            RandomIfsModel((two_map_square(0.1, 0.1),), (1.0,), dart)

    def test_document_round_trip(self, gasket_half):
        """from_dict(to_dict(model)) describes the same model."""
        again = RandomIfsModel.from_dict(gasket_half.to_dict())
        assert again.to_dict() == gasket_half.to_dict()

    def test_missing_field_is_config_error(self):
        with pytest.raises(ModelConfigError):
            RandomIfsModel.from_dict({"atoms": [{"maps": []}]})


class TestEnvironment:
    """Tests for sampling and shifting environments."""

    def test_degenerate_distributions(self, gasket_p1, gasket_p0):
        """p = 1 draws G at every level, p = 0 draws H."""
        for model in (gasket_p1, gasket_p0):
            env = sample_environment(model, 7, 12)
            assert all(model.atoms[i].N == model.atoms[0].N for i in env.prefix)
            assert env.atom(5).N == model.atoms[0].N

    def test_same_seed_same_prefix(self, gasket_half):
        assert sample_environment(gasket_half, 42, 20).prefix == sample_environment(gasket_half, 42, 20).prefix

    def test_both_atoms_appear(self, gasket_half):
        """A long prefix of the p = 0.5 model uses both IFSs."""
        assert set(sample_environment(gasket_half, 3, 200).prefix) == {0, 1}

    def test_extension_keeps_earlier_levels(self, gasket_half):
        """Levels beyond the prefix are drawn from the same keys."""
        short = sample_environment(gasket_half, 11, 3)
        long = sample_environment(gasket_half, 11, 10)
        assert long.prefix[:3] == short.prefix
        assert [short.atom_index(n) for n in range(1, 11)] == list(long.prefix)

    def test_shifted_environment(self, gasket_half):
        env = sample_environment(gasket_half, 5, 10)
        shifted = env.shifted(2)
        assert [shifted.atom_index(n) for n in range(1, 6)] == [env.atom_index(n) for n in range(3, 8)]

    def test_depth_must_be_positive(self, gasket_half):
        with pytest.raises(DomainError):
            sample_environment(gasket_half, 1, 0)


class TestComposeWord:
    """Tests for compose_word."""

    def test_single_entry_is_the_map(self, gasket_p1):
        env = sample_environment(gasket_p1, 0, 3)
        word = compose_word(env, (2,))
        np.testing.assert_allclose(word.map(np.array([[0.0, 0.0], [1.0, 0.0]])), [[0.5, 0.0], [1.0, 0.0]])

    def test_two_levels_of_g(self, gasket_p1):
        """sigma = (1, 2) under (G, G): scale 1/4, translation (1/4, 0)."""
        env = sample_environment(gasket_p1, 0, 2)
        word = compose_word(env, (1, 2))
        assert word.ratio == pytest.approx(0.25)
        np.testing.assert_allclose(word.map.translation, (0.25, 0.0), atol=1e-15)

    def test_mixed_levels_multiply_ratios(self, gasket_half):
        env = Environment(gasket_half, 0, (0, 1))
        assert compose_word(env, (1, 1)).ratio == pytest.approx(1 / 6, rel=1e-14)

    def test_composition_order(self, gasket_p1):
        """f_(2,3) = g_2 o g_3 sends the origin to (5/8, sqrt(3)/8)."""
        env = sample_environment(gasket_p1, 0, 2)
        word = compose_word(env, (2, 3))
        np.testing.assert_allclose(word.map(np.zeros((1, 2))), [[5 / 8, SQRT3 / 8]], atol=1e-15)

    def test_empty_word_is_identity_without_map(self, gasket_p1):
        word = compose_word(sample_environment(gasket_p1, 0, 2), ())
        assert (len(word), word.ratio, word.map) == (0, 1.0, None)

    def test_out_of_range_entry(self, gasket_p1):
        env = sample_environment(gasket_p1, 0, 2)
        with pytest.raises(InvalidCodeError):
            compose_word(env, (1, 4))
        with pytest.raises(InvalidCodeError):
            compose_word(env, (0,))


class TestStoppingSet:
    """Tests for the stopping set Sigma(r)."""

    def test_large_radius_gives_empty_word(self, gasket_half):
        env = sample_environment(gasket_half, 1, 4)
        words = stopping_set(env, 2.0)
        assert [w.entries for w in words] == [()]
        assert (words[0].ratio, words[0].map) == (1.0, None)

    def test_nonpositive_radius(self, gasket_half):
        env = sample_environment(gasket_half, 1, 4)
        with pytest.raises(DomainError):
            stopping_set(env, 0.0)

    def test_g_environment_half(self, gasket_p1):
        """(G, G, ...), r = 1/2: the 9 words of length 2."""
        words = stopping_set(sample_environment(gasket_p1, 0, 4), 0.5)
        assert len(words) == 9
        assert {len(w) for w in words} == {2}
        assert all(w.ratio == pytest.approx(0.25) for w in words)

    def test_h_environment_half(self, gasket_p0):
        """(H, ...), r = 1/2: the 6 words of length 1 (R/3 = r exactly)."""
        words = stopping_set(sample_environment(gasket_p0, 0, 4), 0.5)
        assert sorted(w.entries for w in words) == [(i,) for i in range(1, 7)]

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_antichain_and_cover(self, gasket_half, seed):
        """No word is a prefix of another, and the words carry full code-space mass."""
        env = sample_environment(gasket_half, seed, 30)
        words = stopping_set(env, 0.02)
        entries = [w.entries for w in words]
        assert len(set(entries)) == len(entries)
        as_set = set(entries)
        for e in entries:
            assert not any(e[:j] in as_set for j in range(len(e)))
        mass = sum(np.prod([1.0 / env.atom(n).N for n in range(1, len(e) + 1)]) for e in entries)
        assert mass == pytest.approx(1.0, abs=1e-12)

    def test_ratio_window(self, gasket_half):
        """r r_min / R < r_sigma <= r / R for every word."""
        env = sample_environment(gasket_half, 9, 30)
        model = gasket_half
        r = 0.03
        for w in stopping_set(env, r):
            assert w.ratio <= r / model.big_R * (1 + 1e-12)
            assert w.ratio > r * model.r_min / model.big_R

    def test_recursive_tree_words_valid(self, gasket_half):
        """Recursive realizations also give an antichain satisfying the window."""
        tree = RecursiveTree(gasket_half, 1234)
        words = stopping_set(tree, 0.05)
        entries = {w.entries for w in words}
        assert len(entries) == len(words)
        for w in words:
            assert w.ratio <= 0.05 / 1.5 * (1 + 1e-12)
            assert w.ratio > 0.05 * (1 / 3) / 1.5


class TestBoundaryCodes:
    """Tests for boundary_codes."""

    def test_near_R_keeps_everything(self, gasket_half):
        env = sample_environment(gasket_half, 4, 10)
        assert len(boundary_codes(env, 1.4)) == len(stopping_set(env, 1.4))

    def test_small_radius_drops_interior_pieces(self, gasket_p1):
        """At r = 0.03 pieces along the middle of inner hole edges sit deeper than 2r."""
        env = sample_environment(gasket_p1, 0, 10)
        all_words = {w.entries for w in stopping_set(env, 0.03)}
        kept = {w.entries for w in boundary_codes(env, 0.03)}
        assert kept < all_words

    def test_kept_words_are_close_to_complement(self, gasket_p1):
        env = sample_environment(gasket_p1, 0, 10)
        r = 0.03
        base = gasket_p1.vertices
        for w in boundary_codes(env, r):
            outer = polygons.counterclockwise(env.atom(1).maps[w.entries[0] - 1](base))
            piece = w.map(base)
            assert polygons.edge_clearance(piece, outer).min() <= 2 * r * (1 + 1e-12)


class TestPrefractal:
    """Tests for prefractal_polygons."""

    def test_large_bound_returns_open_set(self, gasket_half):
        env = sample_environment(gasket_half, 0, 3)
        polys = prefractal_polygons(env, 2.0)
        assert polys.shape == (1, 3, 2)

    def test_g_quarter(self, gasket_p1):
        polys = prefractal_polygons(sample_environment(gasket_p1, 0, 4), 0.25)
        assert polys.shape[0] == 9
        np.testing.assert_allclose(polygons.area(polys), SQRT3 / 4 / 16)

    def test_h_third(self, gasket_p0):
        polys = prefractal_polygons(sample_environment(gasket_p0, 0, 4), 1 / 3)
        assert polys.shape[0] == 6

    def test_depth_limit(self, gasket_p1):
        """Bound 1e-3 needs depth 10 for the halving gasket."""
        env = sample_environment(gasket_p1, 0, 4)
        with pytest.raises(DepthLimitError) as info:
            prefractal_polygons(env, 1e-3, max_depth=5)
        assert info.value.required_depth == 10
        assert info.value.exit_code == 4

    def test_nested_refinement(self, gasket_half):
        """Every piece at a finer bound lies inside some piece at a coarser one."""
        env = sample_environment(gasket_half, 21, 20)
        coarse = polygons.counterclockwise(prefractal_polygons(env, 0.2))
        fine = prefractal_polygons(env, 0.05)
        centers = polygons.centroid(fine)
        inside = np.zeros(len(centers), dtype=bool)
        for poly in coarse:
            inside |= polygons.contains_points(poly, centers, tol=1e-12)
        assert inside.all()

    def test_recursive_mode_pieces_meet_bound(self, gasket_half):
        tree = RecursiveTree(gasket_half, 77)
        polys = prefractal_polygons(tree, 0.05)
        diam = np.array([polygons.diameter(p) for p in polys])
        assert (diam <= 0.05 * (1 + 1e-12)).all()


class TestNeighborCount:
    """Tests for gamma_bound and neighbor_overlap_count."""

    def test_gamma_bound_value(self, gasket_half):
        assert gamma_bound(gasket_half) == pytest.approx(1296 * math.pi / SQRT3)

    def test_gamma_bound_without_third_ratio(self, gasket_p1):
        """p = 1 drops the ratio-1/3 IFS, so r_min is 1/2."""
        assert gasket_p1.r_min == 0.5
        assert gamma_bound(gasket_p1) == pytest.approx(576 * math.pi / SQRT3)

    def test_doubling_R_quadruples_gamma(self, gasket_half):
        doubled = RandomIfsModel(gasket_half.atoms, gasket_half.probabilities, gasket_half.open_set, big_R=3.0)
        assert gamma_bound(doubled) == pytest.approx(4 * gamma_bound(gasket_half))

    def test_g_half_is_nine(self, gasket_p1):
        assert neighbor_overlap_count(sample_environment(gasket_p1, 0, 4), 0.5) == 9

    def test_single_word_counts_itself(self, gasket_half):
        assert neighbor_overlap_count(sample_environment(gasket_half, 0, 4), 2.0) == 1

    @pytest.mark.parametrize("r", [0.3, 0.1, 0.03])
    def test_within_gamma(self, gasket_half, r):
        env = sample_environment(gasket_half, 8, 20)
        assert neighbor_overlap_count(env, r) <= gamma_bound(gasket_half)
