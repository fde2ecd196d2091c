"""
pointspec - Symmetry Classification Tests.

Unit and property-based tests for the coupling and potential symmetry
checks.

**Feature: pointspec, Property 9: Hermitian Couplings Classify As Self-Adjoint**
"""

import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats

from src.errors import ParityUndecidableError
from src.schema import (
    BoxEven,
    BoxOddSign,
    CouplingMatrix,
    DeltaModel,
    ExpEven,
    GeneralModel,
    Parity,
    SampledPotential,
    ZeroPotential,
)
from src.symmetry import (
    classify,
    conjugate_model,
    is_hermitian,
    is_imaginary,
    is_real,
    potential_parity,
    transforms_to,
)


finite = floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


class TestScalarChecksUnit:
    """Unit tests for the scalar predicates."""

    def test_is_real(self) -> None:
        """Verify realness within a relative tolerance."""
        assert is_real(2.0 + 1e-15j)
        assert not is_real(2.0 + 1e-3j)

    def test_is_imaginary(self) -> None:
        """Verify pure imaginary detection."""
        assert is_imaginary(-3j)
        assert is_imaginary(0j)
        assert not is_imaginary(1 + 1j)

    def test_hermitian(self) -> None:
        """Verify b = c^* with a real diagonal."""
        assert is_hermitian(CouplingMatrix(a=1, b=1 + 2j, c=1 - 2j, d=-3))
        assert not is_hermitian(CouplingMatrix(a=1j, b=0, c=0, d=0))


class TestPotentialParityUnit:
    """Unit tests for potential parity."""

    def test_catalog_parities(self) -> None:
        """Verify the catalog kinds report their parity."""
        assert potential_parity(ZeroPotential()) is Parity.EVEN
        assert potential_parity(BoxEven(z=-2.0, rho=1.0)) is Parity.EVEN
        assert potential_parity(BoxOddSign(z=1.0, rho=1.0)) is Parity.ODD
        assert potential_parity(ExpEven(c=0.5j, mu=0.25)) is Parity.EVEN

    def test_sampled_neither(self) -> None:
        """Verify a lopsided sample is neither even nor odd."""
        q = SampledPotential(nodes=(-1.0, 0.0, 1.0), values=(0j, 1 + 0j, 2 + 0j))

        assert potential_parity(q) is Parity.NEITHER

    def test_sampled_odd(self) -> None:
        """Verify an antisymmetric sample is odd."""
        q = SampledPotential(nodes=(-1.0, 0.0, 1.0), values=(-1 + 0j, 0j, 1 + 0j))

        assert potential_parity(q) is Parity.ODD

    def test_asymmetric_grid_undecidable(self) -> None:
        """Verify an asymmetric grid cannot be classified."""
        q = SampledPotential(nodes=(-1.0, 0.0, 2.0), values=(0j, 1 + 0j, 0j))

        with pytest.raises(ParityUndecidableError):
            potential_parity(q)

    def test_pt_action_on_odd_box(self) -> None:
        """Verify PT maps the real sign-box to its negative."""
        q = BoxOddSign(z=1.0, rho=1.0)

        assert transforms_to(q, -1, conjugate=True)
        assert not transforms_to(BoxOddSign(z=1j, rho=1.0), -1, conjugate=True)

    def test_pt_action_on_sampled(self) -> None:
        """Verify PT q = q for q(-x) = q(x)^*."""
        q = SampledPotential(nodes=(-1.0, 0.0, 1.0), values=(1 - 1j, 2 + 0j, 1 + 1j))

        assert transforms_to(q, 1, conjugate=True)
        assert not transforms_to(q, 1, conjugate=False)


class TestClassifyUnit:
    """Unit tests for classify."""

    def test_real_delta_model(self) -> None:
        """Verify a real delta well is self-adjoint and P-self-adjoint."""
        report = classify(DeltaModel(a=-2.0, q=ZeroPotential()))

        assert report.self_adjoint
        assert report.p_self_adjoint
        assert report.pt_symmetric
        assert report.potential_parity == (Parity.EVEN, Parity.EVEN)

    def test_complex_coupling_not_self_adjoint(self) -> None:
        """Verify a complex a breaks every condition."""
        report = classify(DeltaModel(a=-1 + 2.598j, q=ExpEven(c=0.5j, mu=0.25)))

        assert not report.self_adjoint
        assert not report.pt_symmetric
        assert not report.p_self_adjoint

    def test_pt_symmetric_general_model(self) -> None:
        """Verify the PT example with imaginary b, c and real sign-box q2."""
        model = GeneralModel(
            coupling=CouplingMatrix(a=1, b=2j, c=-1j, d=-1),
            q1=BoxEven(z=0.5, rho=1.0),
            q2=BoxOddSign(z=1.0, rho=1.0),
        )

        report = classify(model)

        assert report.pt_symmetric
        assert report.pt_fixed == (True, True)
        assert not report.self_adjoint
        assert not report.p_self_adjoint
        assert report.potential_parity == (Parity.EVEN, Parity.ODD)

    def test_imaginary_odd_box_is_not_pt(self) -> None:
        """Verify an imaginary sign-box fails the PT condition on q2."""
        model = GeneralModel(
            coupling=CouplingMatrix(a=1, b=2j, c=-1j, d=-1),
            q1=BoxEven(z=0.5, rho=1.0),
            q2=BoxOddSign(z=1j, rho=1.0),
        )

        report = classify(model)

        assert not report.pt_symmetric
        assert report.pt_fixed == (True, False)

    def test_p_self_adjoint_general_model(self) -> None:
        """Verify b = -c^* with parity-matched potentials."""
        model = GeneralModel(
            coupling=CouplingMatrix(a=2, b=1 + 1j, c=-1 + 1j, d=0),
            q1=ExpEven(c=1j, mu=1.0),
            q2=BoxOddSign(z=1j, rho=2.0),
        )

        report = classify(model)

        assert report.p_self_adjoint
        assert report.p_fixed == (True, True)
        assert not report.self_adjoint

    def test_conjugate_model(self) -> None:
        """Verify every coefficient is conjugated."""
        model = GeneralModel(
            coupling=CouplingMatrix(a=1j, b=2, c=-1j, d=1 + 1j),
            q1=ExpEven(c=1j, mu=1.0),
            q2=ZeroPotential(),
        )

        conjugated = conjugate_model(model)

        assert conjugated.coupling == CouplingMatrix(a=-1j, b=2, c=1j, d=1 - 1j)
        assert conjugated.q1 == ExpEven(c=-1j, mu=1.0)

    def test_conjugate_delta_model(self) -> None:
        """Verify the delta form stays a delta model."""
        conjugated = conjugate_model(DeltaModel(a=1 + 1j, q=ExpEven(c=1j, mu=1.0)))

        assert isinstance(conjugated, DeltaModel)
        assert conjugated.a == 1 - 1j
        assert conjugated.q == ExpEven(c=-1j, mu=1.0)


class TestClassifyProperty:
    """
    Property-based tests for classify.

    **Feature: pointspec, Property 9: Hermitian Couplings Classify As Self-Adjoint**
    """

    @given(a=finite, d=finite, re_b=finite, im_b=finite, z=finite)
    @settings(max_examples=50)
    def test_hermitian_is_self_adjoint(self, a, d, re_b, im_b, z) -> None:
        """
        Property: b = c^* with real a, d is self-adjoint for any potentials.
        """
        b = complex(re_b, im_b)
        model = GeneralModel(
            coupling=CouplingMatrix(a=a, b=b, c=b.conjugate(), d=d),
            q1=BoxEven(z=z, rho=1.0),
            q2=ExpEven(c=z, mu=2.0),
        )

        assert classify(model).self_adjoint
