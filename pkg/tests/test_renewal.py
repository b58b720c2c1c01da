"""
Tests for fractalcurv.renewal - scaling exponents and limit formulas.
"""
import math

import numpy as np
import pytest

from fractalcurv.errors import DivergenceError, DomainError, NonSummableError
from fractalcurv.exact_gasket import GASKET_L, GasketParams, PiecewiseCurve, closed_form_frac, gasket_model, r_curve
from fractalcurv.ifs_core import IfsAtom, RandomIfsModel, Similarity
from fractalcurv.renewal import (
    SampledCurve,
    ScalingData,
    check_L_invariance,
    compute_eta,
    frac_limit,
    hausdorff_dimension,
    lattice_series,
    lattice_span,
    scaling_data,
    solve_dimension,
)

SQUARE = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
L = GASKET_L


def corner_atom(scales):
    """Maps of the given scales anchored at the corners of the unit square."""
    anchors = [lambda s: (0.0, 0.0), lambda s: (1.0 - s, 0.0), lambda s: (0.0, 1.0 - s), lambda s: (1.0 - s, 1.0 - s)]
    return IfsAtom(tuple(Similarity(s, translation=anchors[i](s)) for i, s in enumerate(scales)))


def random_square_models(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n_atoms = int(rng.integers(1, 4))
        atoms = tuple(corner_atom(rng.uniform(0.05, 0.5, size=int(rng.integers(2, 5)))) for _ in range(n_atoms))
        probs = rng.dirichlet(np.ones(n_atoms))
        probs[-1] = 1.0 - probs[:-1].sum()
        yield RandomIfsModel(atoms, tuple(probs), SQUARE)


def phi(model, D):
    return sum(p * float(np.sum(a.scales ** D)) for a, p in zip(model.atoms, model.probabilities)) - 1.0


class TestDimensions:
    """Tests for solve_dimension and hausdorff_dimension."""

    def test_p1(self):
        assert solve_dimension(gasket_model(1.0)) == pytest.approx(math.log2(3), abs=1e-10)

    def test_p0(self):
        assert solve_dimension(gasket_model(0.0)) == pytest.approx(math.log(6) / math.log(3), abs=1e-10)

    def test_half(self):
        D = solve_dimension(gasket_model(0.5))
        assert 1.5 * 2 ** -D + 3 * 3 ** -D == pytest.approx(1.0, abs=1e-12)
        assert math.log2(3) < D < math.log(6) / math.log(3)

    def test_residual_on_random_models(self):
        for model in random_square_models(50, seed=3):
            assert abs(phi(model, solve_dimension(model))) <= 1e-12

    def test_hausdorff_half(self):
        model = gasket_model(0.5)
        D_H = hausdorff_dimension(model)
        assert D_H == pytest.approx(math.log(18) / math.log(6), abs=1e-10)
        assert D_H < solve_dimension(model)

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_hausdorff_equals_D_when_deterministic(self, p):
        model = gasket_model(p)
        assert hausdorff_dimension(model) == pytest.approx(solve_dimension(model), abs=1e-12)

    def test_hausdorff_never_exceeds_D(self):
        for model in random_square_models(20, seed=4):
            assert hausdorff_dimension(model) <= solve_dimension(model) + 1e-12


class TestEtaAndLattice:
    """Tests for compute_eta and lattice_span."""

    def test_eta_p1(self):
        model = gasket_model(1.0)
        assert compute_eta(model, solve_dimension(model)) == pytest.approx(math.log(2))

    def test_eta_p0(self):
        model = gasket_model(0.0)
        assert compute_eta(model, solve_dimension(model)) == pytest.approx(math.log(3))

    @pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
    def test_eta_general(self, p):
        model = gasket_model(p)
        D = solve_dimension(model)
        expected = 3 * p / 2 ** D * math.log(2) + 6 * (1 - p) / 3 ** D * math.log(3)
        assert compute_eta(model, D) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("p", [0.01, 0.5, 0.99])
    def test_mixed_gasket_is_non_lattice(self, p):
        assert lattice_span(gasket_model(p)) is None

    def test_single_atom_spans(self):
        assert lattice_span(gasket_model(1.0)) == pytest.approx(math.log(2))
        assert lattice_span(gasket_model(0.0)) == pytest.approx(math.log(3))

    def test_quarter_and_half(self):
        model = RandomIfsModel((corner_atom([0.5, 0.25]),), (1.0,), SQUARE)
        assert lattice_span(model) == pytest.approx(math.log(2))

    def test_commensurable_across_atoms(self):
        """ln 4 and ln 8 share the span ln 2."""
        model = RandomIfsModel((corner_atom([0.25, 0.25]), corner_atom([0.125, 0.125])), (0.5, 0.5), SQUARE)
        assert lattice_span(model) == pytest.approx(math.log(2))

    def test_scaling_data(self):
        data = scaling_data(gasket_model(1.0))
        assert data.is_lattice
        assert data.to_dict()["lattice_span"] == pytest.approx(math.log(2))


class TestFracLimit:
    """Tests for frac_limit."""

    def test_constant_curve(self):
        scaling = ScalingData(D=1.3, D_H=1.3, eta=0.7)
        curve = PiecewiseCurve((0.0, 0.4), ((1.0,),))
        assert frac_limit(curve, scaling, 0) == pytest.approx(0.4 ** 1.3 / (1.3 * 0.7))

    def test_p1_euler_value(self):
        scaling = scaling_data(gasket_model(1.0))
        value = frac_limit(r_curve(0, GasketParams(1.0)), scaling, 0)
        assert value == pytest.approx(-L ** scaling.D / (3 * math.log(3)), rel=1e-12)

    @pytest.mark.parametrize("k", [0, 1])
    @pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_matches_closed_form(self, k, p):
        params = GasketParams(p)
        scaling = scaling_data(gasket_model(p))
        exact = frac_limit(r_curve(k, params), scaling, k)
        assert exact == pytest.approx(closed_form_frac(k, params, scaling), rel=1e-10)

    @pytest.mark.parametrize("k", [0, 1])
    @pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_quadrature_agrees_with_exact(self, k, p):
        params = GasketParams(p)
        scaling = scaling_data(gasket_model(p))
        curve = r_curve(k, params)
        exact = frac_limit(curve, scaling, k)
        quad = frac_limit(curve, scaling, k, method="quadrature")
        assert quad == pytest.approx(exact, rel=1e-7)

    def test_quadrature_survives_underflow(self):
        """A slowly decaying weight pushes the nodes past where exp(-t) underflows."""
        scaling = ScalingData(D=0.05, D_H=0.05, eta=1.0)
        curve = PiecewiseCurve((0.0, 0.2, 0.4), ((1.0,), (2.0,)))
        expected = (0.2 ** 0.05 + 2.0 * (0.4 ** 0.05 - 0.2 ** 0.05)) / 0.05
        assert frac_limit(curve, scaling, 0, method="quadrature") == pytest.approx(expected, rel=1e-7)

    def test_continuous_in_p(self):
        values = []
        for p in np.linspace(0.0, 1.0, 21):
            values.append(frac_limit(r_curve(0, GasketParams(p)), scaling_data(gasket_model(p)), 0))
        assert np.abs(np.diff(values)).max() < 0.01

    def test_divergent_integrand(self):
        scaling = ScalingData(D=1.5, D_H=1.5, eta=0.7)
        curve = PiecewiseCurve((0.0, 0.4), ((1.0,),))
        with pytest.raises(DivergenceError):
            frac_limit(curve, scaling, 2)
        with pytest.raises(DivergenceError):
            frac_limit(curve, scaling, 2, method="quadrature")

    def test_sampled_constant_curve(self):
        scaling = ScalingData(D=1.3, D_H=1.3, eta=0.7)
        r = np.linspace(0.02, 0.38, 10)
        curve = SampledCurve(r, np.ones_like(r), L=0.4)
        assert frac_limit(curve, scaling, 0) == pytest.approx(0.4 ** 1.3 / (1.3 * 0.7), rel=1e-7)

    def test_sampled_curve_radii_checked(self):
        with pytest.raises(DomainError):
            SampledCurve(np.array([0.1, 0.05]), np.zeros(2), L=0.4)


class TestLatticeSeries:
    """Tests for lattice_series."""

    def test_geometric_series(self):
        c = math.log(2)
        scaling = ScalingData(D=1.5, D_H=1.5, eta=0.9, lattice_span=c)
        curve = PiecewiseCurve((0.0, 2.0), ((1.0,),))
        expected = c / (0.9 * (1.0 - 2.0 ** -1.5))
        assert lattice_series(curve, scaling, 0, 0.0) == pytest.approx(expected, rel=1e-9)

    def test_average_over_s_recovers_limit(self):
        """Mean of the series over one period equals the essential limit."""
        scaling = scaling_data(gasket_model(1.0))
        curve = r_curve(0, GasketParams(1.0))
        c = scaling.lattice_span
        n = 4000
        s = (np.arange(n) + 0.5) * c / n
        average = np.mean([lattice_series(curve, scaling, 0, float(x)) for x in s])
        assert average == pytest.approx(frac_limit(curve, scaling, 0), rel=1e-3)

    def test_needs_lattice(self):
        scaling = scaling_data(gasket_model(0.5))
        with pytest.raises(DomainError):
            lattice_series(r_curve(0, GasketParams(0.5)), scaling, 0, 0.0)

    def test_s_range(self):
        scaling = scaling_data(gasket_model(1.0))
        with pytest.raises(DomainError):
            lattice_series(r_curve(0, GasketParams(1.0)), scaling, 0, math.log(2))

    def test_area_order_not_summable(self):
        scaling = scaling_data(gasket_model(1.0))
        with pytest.raises(NonSummableError):
            lattice_series(r_curve(1, GasketParams(1.0)), scaling, 2, 0.1)


class TestLInvariance:
    """Tests for check_L_invariance."""

    def test_same_L_identical(self):
        model = gasket_model(0.5)
        source = lambda L_: r_curve(0, GasketParams(0.5))
        first, second = check_L_invariance(model, 0, L, L, source)
        assert first == second

    def test_truncated_constant_curve(self):
        """Integrals over (0, L) of the same curve grow with L."""
        scaling = ScalingData(D=1.3, D_H=1.3, eta=1.0)
        curve = PiecewiseCurve((0.0, 1.0), ((1.0,),))
        first, second = check_L_invariance(gasket_model(1.0), 0, 0.25, 0.5, lambda L_: curve, scaling)
        assert first == pytest.approx(0.25 ** 1.3 / 1.3)
        assert second == pytest.approx(0.5 ** 1.3 / 1.3)

    def test_positive_L(self):
        with pytest.raises(DomainError):
            check_L_invariance(gasket_model(1.0), 0, 0.0, L, lambda L_: r_curve(0, GasketParams(1.0)))
