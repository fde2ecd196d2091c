"""
pointspec - Spectrum Analysis Tests.

Unit and property-based tests for the eigenvalue search, multiplicities,
exceptional points, the continuous-spectrum scans and the phase diagram.

**Feature: pointspec, Property 10: Delta Wells Have The Bound State -a^2/4**
**Feature: pointspec, Property 11: Conjugate Models Have Conjugate Spectra**
**Feature: pointspec, Property 17: The Matrix Search Finds The Local Polynomial Roots**
**Feature: pointspec, Property 18: Delta And Matrix Characteristic Functions Share Their Zeros**
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats, sampled_from

from src.errors import DegenerateFamilyError, NonIntegerIndexError, PreconditionError
from src.model import delta_to_general
from src.schema import (
    BoxEven,
    BoxOddSign,
    CouplingMatrix,
    DeltaModel,
    ExpEven,
    GeneralModel,
    PhaseClass,
    SearchRegion,
    SpectralParameter,
    ZeroPotential,
)
from src.spectrum import ArgumentPrincipleSolver, SpectrumAnalyser
from src.symmetry import conjugate_model


SQRT3_2 = math.sqrt(3) / 2
EXCEPTIONAL_Q = ExpEven(c=0.5j, mu=0.25)
EXCEPTIONAL_K0 = complex(SQRT3_2, 0.25)
EXCEPTIONAL_A = 3j * EXCEPTIONAL_K0 - 0.25


def coupling_with_roots(k1: complex, k2: complex, d: complex, b: complex) -> CouplingMatrix:
    """Returns T whose local polynomial 2d k^2 + i(det T - 4)k + 2a has the roots k1, k2."""
    a = d * k1 * k2
    determinant = 4.0 + 2j * d * (k1 + k2)
    return CouplingMatrix(a=a, b=b, c=(a * d - determinant) / b, d=d)


def random_couplings(count: int, seed: int = 7):
    """Yields (T, [k1, k2]) with separated random roots in the k upper half-plane."""
    rng = np.random.default_rng(seed)
    produced = 0
    while produced < count:
        k1, k2 = rng.uniform(-3.0, 3.0, 2) + 1j * rng.uniform(0.05, 3.0, 2)
        if abs(k1 - k2) < 0.3:
            continue
        d = complex(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5))
        b = complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))
        produced += 1
        yield coupling_with_roots(complex(k1), complex(k2), d, b), [complex(k1), complex(k2)]


def _contains_conjugate(values, target, tol=1e-6) -> bool:
    return any(abs(v - target.conjugate()) < tol for v in values)


class TestArgumentPrincipleSolverUnit:
    """Unit tests for the contour zero finder."""

    def test_single_zero(self) -> None:
        """Verify z^2 + 1 has the single zero i in the upper rectangle."""
        solver = ArgumentPrincipleSolver(lambda z: z * z + 1.0)

        roots = solver.solve(SearchRegion(-2.0, 2.0, 0.5, 2.0))

        assert len(roots) == 1
        assert roots[0][0] == pytest.approx(1j)
        assert roots[0][1] == 1

    def test_count_three_zeros(self) -> None:
        """Verify the winding number counts every enclosed zero."""
        solver = ArgumentPrincipleSolver(lambda z: (z - 1j) * (z - 2j) * (z + 1 - 1j))

        assert solver.count(SearchRegion(-3.0, 3.0, 0.5, 3.0)) == 3

    def test_double_zero_is_a_cluster(self) -> None:
        """Verify a double zero is reported once with multiplicity two."""
        solver = ArgumentPrincipleSolver(lambda z: (z - 1j) ** 2, derivative=lambda z: 2 * (z - 1j))

        roots = solver.solve(SearchRegion(-1.3, 1.7, 0.3, 2.1))

        assert len(roots) == 1
        assert roots[0][0] == pytest.approx(1j, abs=1e-8)
        assert roots[0][1] == 2

    def test_no_zero(self) -> None:
        """Verify an empty rectangle gives no zeros."""
        solver = ArgumentPrincipleSolver(lambda z: z + 5.0)

        assert solver.solve(SearchRegion(-1.0, 1.0, 0.1, 1.0)) == []

    def test_fast_phase_swing_is_resolved(self) -> None:
        """Verify a near-axis triple pole does not hide the two zeros at +-sqrt(3)/2 + i/4."""
        solver = ArgumentPrincipleSolver(lambda z: 1.0 + 1.0 / (0.25 - 1j * z) ** 3)

        assert solver.count(SearchRegion.default()) == 2

    def test_edge_phase_of_nearby_zero(self) -> None:
        """Verify the phase change under a zero close to the edge is about pi."""
        solver = ArgumentPrincipleSolver(lambda z: z - (0.1 + 0.04j))

        change = solver.edge_phase(complex(-10.0, 1e-6), complex(10.0, 1e-6))

        assert change == pytest.approx(math.pi, abs=0.02)


class TestEigenvalueSearchUnit:
    """Unit tests for find_eigenvalues."""

    def setup_method(self) -> None:
        """Initialise SpectrumAnalyser for each test."""
        self.analyser = SpectrumAnalyser()

    def test_delta_well(self) -> None:
        """Verify a = -2 with q = 0 has the single eigenvalue -1."""
        eigenvalues = self.analyser.find_eigenvalues(DeltaModel(a=-2.0, q=ZeroPotential()))

        assert len(eigenvalues) == 1
        assert eigenvalues[0].lam == pytest.approx(-1.0, abs=1e-10)
        assert eigenvalues[0].k == pytest.approx(1j, abs=1e-10)
        assert eigenvalues[0].algebraic_mult == 1
        assert eigenvalues[0].geometric_mult == 1
        assert eigenvalues[0].residual < 1e-10

    def test_root_close_to_the_cut(self) -> None:
        """Verify a local root with Im k = 0.04 is found next to a far one in the default region."""
        coupling = coupling_with_roots(0.1 + 0.04j, 2 + 1j, 0.5, 1.0)
        model = GeneralModel(coupling=coupling, q1=ZeroPotential(), q2=ZeroPotential())

        lambdas = sorted((e.lam for e in self.analyser.find_eigenvalues(model)), key=abs)

        assert len(lambdas) == 2
        assert lambdas[0] == pytest.approx(0.0084 + 0.008j, abs=1e-9)
        assert lambdas[1] == pytest.approx(3 + 4j, abs=1e-9)

    def test_repulsive_delta_has_no_eigenvalue(self) -> None:
        """Verify a > 0 with q = 0 has no eigenvalue."""
        assert self.analyser.find_eigenvalues(DeltaModel(a=1.0, q=ZeroPotential())) == []

    def test_exp_bound_state(self) -> None:
        """Verify c = 1, mu = 1/2, a = -3 has the bound state -1/4."""
        model = DeltaModel(a=-3.0, q=ExpEven(c=1.0, mu=0.5))

        eigenvalues = self.analyser.find_eigenvalues(model, SearchRegion(-5.0, 5.0, 0.1, 5.0))

        assert len(eigenvalues) == 1
        assert eigenvalues[0].lam == pytest.approx(-0.25, abs=1e-9)

    def test_exceptional_coupling_gives_double_eigenvalue(self) -> None:
        """Verify the coupling of an exceptional point gives a Jordan pair."""
        model = DeltaModel(a=EXCEPTIONAL_A, q=EXCEPTIONAL_Q)

        eigenvalues = self.analyser.find_eigenvalues(model)

        assert len(eigenvalues) == 1
        assert eigenvalues[0].lam == pytest.approx(EXCEPTIONAL_K0 ** 2, abs=1e-6)
        assert eigenvalues[0].algebraic_mult == 2
        assert eigenvalues[0].geometric_mult == 1

    def test_semisimple_double_eigenvalue(self) -> None:
        """Verify T = W(i) with zero potentials makes -1 a double eigenvalue."""
        model = GeneralModel(
            coupling=CouplingMatrix(a=-2, b=0, c=0, d=2),
            q1=ZeroPotential(),
            q2=ZeroPotential(),
        )

        eigenvalues = self.analyser.find_eigenvalues(model)

        assert len(eigenvalues) == 1
        assert eigenvalues[0].lam == pytest.approx(-1.0, abs=1e-5)
        assert eigenvalues[0].algebraic_mult == 2
        assert self.analyser.geometric_multiplicity(model, SpectralParameter.from_k(1j)) == 2

    def test_degenerate_family(self) -> None:
        """Verify a = d = 0, bc = -4 with zero potentials is degenerate."""
        model = GeneralModel(
            coupling=CouplingMatrix(a=0, b=2, c=-2, d=0),
            q1=ZeroPotential(),
            q2=ZeroPotential(),
        )

        with pytest.raises(DegenerateFamilyError):
            self.analyser.find_eigenvalues(model)

    def test_pt_spectrum_closed_under_conjugation(self) -> None:
        """Verify the PT model's eigenvalues come in conjugate pairs."""
        model = GeneralModel(
            coupling=CouplingMatrix(a=1, b=2j, c=-1j, d=-1),
            q1=BoxEven(z=0.5, rho=1.0),
            q2=BoxOddSign(z=1.0, rho=1.0),
        )

        lambdas = [e.lam for e in self.analyser.find_eigenvalues(model, SearchRegion(-4.0, 4.0, 0.05, 4.0))]

        for lam in lambdas:
            assert _contains_conjugate(lambdas, lam)

    def test_jobs_do_not_change_results(self) -> None:
        """Verify the worker count leaves the phase diagram unchanged."""
        couplings = [-2.0, 2.0, -1 + 1j, 2j]

        serial = SpectrumAnalyser().phase_diagram(ZeroPotential(), couplings)
        parallel = SpectrumAnalyser(jobs=3).phase_diagram(ZeroPotential(), couplings)

        assert [c.label for c in serial] == [c.label for c in parallel]


class TestCharacteristicFunctionUnit:
    """Unit tests for the characteristic functions and local roots."""

    def setup_method(self) -> None:
        """Initialise SpectrumAnalyser for each test."""
        self.analyser = SpectrumAnalyser()

    def test_boundary_k_rejected(self) -> None:
        """Verify the characteristic function needs Im k > 0."""
        with pytest.raises(PreconditionError):
            self.analyser.char_value(DeltaModel(a=0.0, q=ZeroPotential()), SpectralParameter.from_k(1.0))

    def test_determinant_matches_scalar_form(self) -> None:
        """Verify det(T - W) = -(2i/k)(a - W~) for a delta model with even q."""
        model = DeltaModel(a=-3.0, q=ExpEven(c=1.0, mu=0.5))
        at = SpectralParameter.from_k(0.5 + 1j)

        scalar = self.analyser.char_value(model, at)
        determinant = self.analyser.matrix_char_zero(model, at)

        assert determinant == pytest.approx(-2j / at.k * scalar, abs=1e-10)

    def test_local_roots_delta(self) -> None:
        """Verify the local polynomial of a = -2 gives -1."""
        roots = SpectrumAnalyser.local_char_roots(CouplingMatrix(a=-2, b=0, c=0, d=0))

        assert roots.eigenvalues == [pytest.approx(-1.0)]
        assert not roots.whole_domain

    def test_local_roots_quadratic(self) -> None:
        """Verify d = 1 gives the root k = 2i only."""
        roots = SpectrumAnalyser.local_char_roots(CouplingMatrix(a=0, b=0, c=0, d=1))

        assert roots.eigenvalues == [pytest.approx(-4.0)]

    def test_local_roots_double(self) -> None:
        """Verify T = diag(-2, 2) gives -1 twice."""
        roots = SpectrumAnalyser.local_char_roots(CouplingMatrix(a=-2, b=0, c=0, d=2))

        assert len(roots.eigenvalues) == 2
        assert all(lam == pytest.approx(-1.0, abs=1e-7) for lam in roots.eigenvalues)

    def test_local_roots_whole_domain(self) -> None:
        """Verify the degenerate family fills the whole domain."""
        roots = SpectrumAnalyser.local_char_roots(CouplingMatrix(a=0, b=2, c=-2, d=0))

        assert roots.whole_domain
        assert roots.eigenvalues == []


class TestExceptionalPointsUnit:
    """Unit tests for find_exceptional_points and the index."""

    def setup_method(self) -> None:
        """Initialise SpectrumAnalyser for each test."""
        self.analyser = SpectrumAnalyser()

    def test_exp_even_pair(self) -> None:
        """Verify c = 0.5i, mu = 1/4 has exceptional points at k0 = +-sqrt(3)/2 + i/4."""
        points = self.analyser.find_exceptional_points(EXCEPTIONAL_Q)

        assert len(points) == 2
        by_side = sorted(points, key=lambda p: p.k0.real)
        assert by_side[1].k0 == pytest.approx(EXCEPTIONAL_K0, abs=1e-9)
        assert by_side[0].k0 == pytest.approx(-EXCEPTIONAL_K0.conjugate(), abs=1e-9)
        assert by_side[1].lam0 == pytest.approx(0.6875 + 0.4330127j, abs=1e-6)
        assert by_side[1].a == pytest.approx(EXCEPTIONAL_A, abs=1e-9)
        assert by_side[1].a == pytest.approx(-1 + 2.598076211353316j, abs=1e-9)

    def test_index_two_at_exceptional_point(self) -> None:
        """Verify the index integral counts two at lambda0."""
        model = DeltaModel(a=EXCEPTIONAL_A, q=EXCEPTIONAL_Q)

        index = self.analyser.algebraic_multiplicity(model, EXCEPTIONAL_K0 ** 2, 0.2)

        assert index == 2

    def test_index_away_from_eigenvalues_is_rejected(self) -> None:
        """Verify a circle holding no eigenvalue does not report a multiplicity."""
        model = DeltaModel(a=-2.0, q=ZeroPotential())

        with pytest.raises(NonIntegerIndexError, match="no eigenvalue"):
            self.analyser.algebraic_multiplicity(model, -4.0, 1.0)

    def test_index_radius_must_avoid_cut(self) -> None:
        """Verify a circle reaching [0, inf) is rejected."""
        model = DeltaModel(a=EXCEPTIONAL_A, q=EXCEPTIONAL_Q)

        with pytest.raises(PreconditionError, match="cut"):
            self.analyser.algebraic_multiplicity(model, EXCEPTIONAL_K0 ** 2, 1.0)

    def test_free_potential_has_none(self) -> None:
        """Verify q = 0 has no exceptional point."""
        assert self.analyser.find_exceptional_points(ZeroPotential()) == []

    def test_wide_exponential_has_none(self) -> None:
        """Verify c = 0.5i, mu = 3/4 has no exceptional point."""
        assert self.analyser.find_exceptional_points(ExpEven(c=0.5j, mu=0.75)) == []


class TestContinuousSpectrumUnit:
    """Unit tests for singularities and embedded eigenvalues."""

    def setup_method(self) -> None:
        """Initialise SpectrumAnalyser for each test."""
        self.analyser = SpectrumAnalyser()

    def test_odd_box_is_singular_everywhere_sampled(self) -> None:
        """Verify the unit sign-box has non-real a+ on the sample grid."""
        records = self.analyser.singularity_scan(BoxOddSign(z=1.0, rho=1.0), [0.5, 1.0, 2.0, 3.0])

        assert len(records) == 4
        assert all(r.is_singular for r in records)
        assert all(abs(r.a_plus.imag) > 0.1 for r in records)
        assert records[1].lam == pytest.approx(1.0)

    def test_embedded_point_is_not_singular(self) -> None:
        """Verify the real box has real a+ at its embedded eigenvalue."""
        records = self.analyser.singularity_scan(BoxEven(z=0.5, rho=math.pi), [1.0])

        assert not records[0].is_singular
        assert records[0].a_plus == pytest.approx(-math.pi / 2, abs=1e-8)

    def test_scan_rejects_non_positive_k(self) -> None:
        """Verify k <= 0 is rejected."""
        with pytest.raises(PreconditionError):
            self.analyser.singularity_scan(ZeroPotential(), [0.0])

    def test_embedded_box_eigenvalue(self) -> None:
        """Verify the box of height 1/2 and width pi embeds lambda = 1 at a = -pi/2."""
        found = self.analyser.embedded_eigenvalues(BoxEven(z=0.5, rho=math.pi), (0.0, 10.0))

        assert len(found) == 1
        assert found[0].lam == pytest.approx(1.0, abs=1e-10)
        assert found[0].a == pytest.approx(-math.pi / 2, abs=1e-8)

    def test_beta_of_box(self) -> None:
        """Verify beta_k = 1 - z(1 - cos k rho)/k^2."""
        assert self.analyser.beta(BoxEven(z=0.5, rho=math.pi), 1.0) == pytest.approx(0.0, abs=1e-15)
        assert self.analyser.beta(ZeroPotential(), 3.0) == 1.0

    def test_embedded_rejects_odd(self) -> None:
        """Verify odd potentials are rejected."""
        with pytest.raises(PreconditionError, match="odd"):
            self.analyser.embedded_eigenvalues(BoxOddSign(z=1.0, rho=1.0))

    def test_exp_positive_eigenvalue(self) -> None:
        """Verify c = 1, mu = 1/2 gives lambda = 3/4 at a = -3."""
        point = self.analyser.exp_positive_eigenvalue(ExpEven(c=1.0, mu=0.5))

        assert point.lam == pytest.approx(0.75, abs=1e-15)
        assert point.k == pytest.approx(SQRT3_2, abs=1e-15)
        assert point.a == pytest.approx(-3.0, abs=1e-15)

    def test_exp_positive_eigenvalue_is_boundary_weyl_value(self) -> None:
        """Verify a equals the real boundary value W~+(k) at the eigenvalue."""
        q = ExpEven(c=1.0, mu=0.5)
        point = self.analyser.exp_positive_eigenvalue(q)

        record = self.analyser.singularity_scan(q, [point.k])[0]

        assert record.a_plus == pytest.approx(point.a, abs=1e-10)
        assert not record.is_singular

    def test_exp_positive_eigenvalue_needs_c_above_mu_squared(self) -> None:
        """Verify c <= mu^2 has no positive eigenvalue."""
        assert self.analyser.exp_positive_eigenvalue(ExpEven(c=0.2, mu=0.5)) is None
        assert self.analyser.exp_positive_eigenvalue(ExpEven(c=-1.0, mu=0.5)) is None

    def test_exp_positive_eigenvalue_needs_real_c(self) -> None:
        """Verify complex c is rejected."""
        with pytest.raises(PreconditionError, match="real c"):
            self.analyser.exp_positive_eigenvalue(ExpEven(c=1 + 1j, mu=0.5))

    def test_embedded_search_of_exponential(self) -> None:
        """Verify the embedded search reports the closed-form eigenvalue inside the interval only."""
        q = ExpEven(c=1.0, mu=0.5)

        assert [p.lam for p in self.analyser.embedded_eigenvalues(q, (0.0, 2.0))] == [pytest.approx(0.75)]
        assert self.analyser.embedded_eigenvalues(q, (1.0, 2.0)) == []

    def test_blowup_grows_towards_singularity(self) -> None:
        """Verify the ratio grows like 1/eps at the singularity of a = 2i."""
        model = DeltaModel(a=2j, q=ZeroPotential())

        coarse = self.analyser.blowup_ratio(model, 1 + 1e-3j)
        fine = self.analyser.blowup_ratio(model, 1 + 1e-4j)

        assert coarse == pytest.approx(2e3, rel=1e-2)
        assert 9.0 < fine / coarse < 11.0

    def test_blowup_bounded_at_regular_point(self) -> None:
        """Verify the ratio stays of order one away from a singularity."""
        model = DeltaModel(a=-2.0, q=ZeroPotential())

        assert self.analyser.blowup_ratio(model, 4 + 1e-4j) < 1.0

    def test_blowup_needs_non_real_lambda(self) -> None:
        """Verify real lambda is rejected."""
        with pytest.raises(PreconditionError):
            self.analyser.blowup_ratio(DeltaModel(a=0.0, q=ZeroPotential()), 1.0)


class TestPhaseDiagramUnit:
    """Unit tests for phase_diagram."""

    def test_free_potential_classes(self) -> None:
        """Verify the closed-form classes for q = 0."""
        cells = SpectrumAnalyser().phase_diagram(ZeroPotential(), [-2.0, 2.0, 2j, -1 + 1j])

        assert [c.label for c in cells] == [
            PhaseClass.REAL_EIGENVALUE,
            PhaseClass.NO_EIGENVALUE,
            PhaseClass.SINGULARITY,
            PhaseClass.NONREAL_EIGENVALUE,
        ]
        assert cells[0].eigenvalue_count == 1
        assert cells[0].has_real_eigenvalue
        assert cells[2].singular
        assert cells[3].a == -1 + 1j


class TestDeltaWellProperty:
    """
    Property-based tests for the delta well.

    **Feature: pointspec, Property 10: Delta Wells Have The Bound State -a^2/4**
    """

    @given(a=floats(min_value=-8.0, max_value=-0.5))
    @settings(max_examples=15, deadline=None)
    def test_bound_state(self, a) -> None:
        """
        Property: a < 0 with q = 0 has exactly the eigenvalue -a^2/4.
        """
        eigenvalues = SpectrumAnalyser().find_eigenvalues(DeltaModel(a=a, q=ZeroPotential()))

        assert len(eigenvalues) == 1
        assert eigenvalues[0].lam == pytest.approx(-a * a / 4, abs=1e-9)


class TestConjugateSpectrumProperty:
    """
    Property-based tests for conjugation.

    **Feature: pointspec, Property 11: Conjugate Models Have Conjugate Spectra**
    """

    @given(
        re_a=floats(min_value=-4.0, max_value=-1.0),
        im_a=floats(min_value=0.1, max_value=1.0),
    )
    @settings(max_examples=5, deadline=None)
    def test_conjugate_model(self, re_a, im_a) -> None:
        """
        Property: The conjugate model's eigenvalues are the conjugates.
        """
        model = DeltaModel(a=complex(re_a, im_a), q=ExpEven(c=1.0, mu=0.5))
        region = SearchRegion(-5.0, 5.0, 0.1, 5.0)
        analyser = SpectrumAnalyser()

        original = [e.lam for e in analyser.find_eigenvalues(model, region)]
        mirrored = [e.lam for e in analyser.find_eigenvalues(conjugate_model(model), region)]

        assert len(original) == len(mirrored)
        for lam in original:
            assert _contains_conjugate(mirrored, lam)


class TestLocalRootsProperty:
    """
    Property-based tests for the matrix search against the local polynomial.

    **Feature: pointspec, Property 17: The Matrix Search Finds The Local Polynomial Roots**
    """

    def test_twenty_random_couplings(self) -> None:
        """
        Property: For q1 = q2 = 0 the eigenvalues found in the default region
        are the local polynomial roots, for 20 random T.
        """
        analyser = SpectrumAnalyser()

        for coupling, ks in random_couplings(20):
            model = GeneralModel(coupling=coupling, q1=ZeroPotential(), q2=ZeroPotential())
            local = SpectrumAnalyser.local_char_roots(coupling).eigenvalues
            found = [e.lam for e in analyser.find_eigenvalues(model)]

            assert len(local) == 2
            assert len(found) == 2, f"T={coupling}, expected k={ks}, found {found}"
            for lam in local:
                assert min(abs(lam - other) for other in found) < 1e-8
            for k in ks:
                assert min(abs(k * k - other) for other in found) < 1e-8


class TestCharacteristicZerosProperty:
    """
    Property-based tests for the two characteristic functions of a delta model.

    **Feature: pointspec, Property 18: Delta And Matrix Characteristic Functions Share Their Zeros**
    """

    @given(
        q=sampled_from([
            ZeroPotential(),
            BoxEven(z=0.5, rho=math.pi),
            BoxOddSign(z=1 + 0.5j, rho=1.0),
            ExpEven(c=1.0, mu=0.5),
            ExpEven(c=0.5j, mu=0.25),
        ]),
        a=sampled_from([-3.0, -1.5 + 0.5j, -0.7 - 1.2j, 1.0 + 2.0j]),
    )
    @settings(max_examples=12, deadline=None)
    def test_delta_and_matrix_zero_sets_agree(self, q, a) -> None:
        """
        Property: Zeros of a - W~ and of det(T - W) for the general form coincide.
        """
        analyser = SpectrumAnalyser()
        model = DeltaModel(a=a, q=q)
        region = SearchRegion(-4.0, 4.0, 0.05, 4.0)

        scalar = [e.lam for e in analyser.find_eigenvalues(model, region)]
        matrix = [e.lam for e in analyser.find_eigenvalues(delta_to_general(model), region)]

        assert len(scalar) == len(matrix)
        for lam in scalar:
            assert min(abs(lam - other) for other in matrix) < 1e-8
