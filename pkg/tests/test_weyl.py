"""
pointspec - Weyl Function Tests.

Unit and property-based tests for the scalar and matrix Weyl functions,
their boundary values and the derivative in lambda.

**Feature: pointspec, Property 7: Closed-Form Weyl Functions Match The Convolution Assembly**
**Feature: pointspec, Property 8: Weyl Functions Are Herglotz**
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats, sampled_from

from src.errors import PreconditionError
from src.schema import (
    BoxEven,
    BoxOddSign,
    EvaluationMethod,
    ExpEven,
    SampledPotential,
    SpectralParameter,
    WeylMatrix,
    WeylScalar,
    ZeroPotential,
)
from src.weyl import (
    closed_form_weyl,
    herglotz_sign,
    weyl_boundary,
    weyl_derivative,
    weyl_derivative_k,
    weyl_matrix,
    weyl_scalar,
)


AT_I = SpectralParameter.from_k(1j)

CATALOG = [
    BoxEven(z=0.5, rho=math.pi),
    BoxOddSign(z=1 + 0.5j, rho=1.0),
    ExpEven(c=0.5j, mu=0.25),
    ExpEven(c=1.0, mu=0.5),
]

REAL_POTENTIALS = [
    ZeroPotential(),
    BoxEven(z=-1.5, rho=1.0),
    BoxOddSign(z=2.0, rho=0.5),
    ExpEven(c=1.0, mu=0.5),
]


class TestWeylScalarUnit:
    """Unit tests for weyl_scalar."""

    def test_free_value(self) -> None:
        """Verify W~ = 2ik for the zero potential."""
        at = SpectralParameter.from_k(0.3 + 0.7j)

        assert weyl_scalar(at, ZeroPotential()).value == pytest.approx(2j * at.k)

    def test_exp_even_example(self) -> None:
        """Verify W~ = -1.36 for c = 0.5i, mu = 0.25 at k = i."""
        result = weyl_scalar(AT_I, ExpEven(c=0.5j, mu=0.25))

        assert isinstance(result, WeylScalar)
        assert result.value == pytest.approx(-1.36, abs=1e-10)
        assert result.at is AT_I

    def test_closed_form_zero(self) -> None:
        """Verify the closed form of the free function and its k-derivative."""
        value, derivative = closed_form_weyl(2j, ZeroPotential())

        assert value == pytest.approx(-4)
        assert derivative == 2j

    def test_closed_form_missing_for_sampled(self) -> None:
        """Verify sampled potentials have no closed form."""
        hat = SampledPotential(nodes=(-1.0, 0.0, 1.0), values=(0j, 1 + 0j, 0j))

        assert closed_form_weyl(1j, hat) is None

    def test_conjugation_identity(self) -> None:
        """Verify W~_{q*}(-conj k) = conj W~_q(k)."""
        q = BoxOddSign(z=0.5 - 0.25j, rho=2.0)
        at = SpectralParameter.from_k(0.6 + 0.8j)
        mirrored = SpectralParameter.from_k(-at.k.conjugate())

        value = weyl_scalar(at, q).value
        conjugate = weyl_scalar(mirrored, q.conjugate()).value

        assert conjugate == pytest.approx(value.conjugate(), abs=1e-12)


class TestWeylBoundaryUnit:
    """Unit tests for boundary values on the cut."""

    def test_exp_even_boundary(self) -> None:
        """Verify W+ at k = 1 for c = 0.5i, mu = 0.25."""
        result = weyl_boundary(1.0, ExpEven(c=0.5j, mu=0.25))

        assert result.value == pytest.approx(-0.830450 + 2.442906j, abs=1e-6)

    def test_lower_side(self) -> None:
        """Verify W- at k = -1 is the conjugate of W+ for a real potential."""
        q = ExpEven(c=1.0, mu=0.5)

        upper = weyl_boundary(1.0, q).value
        lower = weyl_boundary(-1.0, q).value

        assert lower == pytest.approx(upper.conjugate(), abs=1e-12)

    def test_complex_k_rejected(self) -> None:
        """Verify non-real k is not a boundary point."""
        with pytest.raises(PreconditionError, match="real k"):
            weyl_boundary(1 + 1j, ZeroPotential())

    def test_matrix_boundary(self) -> None:
        """Verify a second potential returns the matrix form."""
        result = weyl_boundary(2.0, ZeroPotential(), ZeroPotential())

        assert isinstance(result, WeylMatrix)
        assert np.allclose(result.entries, np.diag([4j, 1j]))


class TestWeylMatrixUnit:
    """Unit tests for weyl_matrix."""

    def test_free_matrix(self) -> None:
        """Verify W = diag(2ik, 2i/k) for zero potentials."""
        at = SpectralParameter.from_k(0.5 + 1j)

        entries = weyl_matrix(at, ZeroPotential(), ZeroPotential()).entries

        assert np.allclose(entries, np.diag([2j * at.k, 2j / at.k]))

    def test_even_q1_reduces_to_scalar(self) -> None:
        """Verify W[0, 0] = W~(q1) when q1 is even and q2 = 0."""
        q = ExpEven(c=1 - 0.5j, mu=0.75)
        at = SpectralParameter.from_k(-0.4 + 0.9j)

        entries = weyl_matrix(at, q, ZeroPotential()).entries

        assert entries[0, 0] == pytest.approx(weyl_scalar(at, q).value, abs=1e-12)

    def test_odd_q2_free_corner(self) -> None:
        """Verify an odd q2 leaves the off-diagonal zero when q1 = 0."""
        at = SpectralParameter.from_k(0.2 + 1.1j)

        entries = weyl_matrix(at, ZeroPotential(), BoxOddSign(z=1.0, rho=1.0)).entries

        assert abs(entries[0, 1]) < 1e-12
        assert abs(entries[1, 0]) < 1e-12
        assert entries[0, 0] == pytest.approx(2j * at.k)

    def test_matrix_closed_form_against_quadrature(self) -> None:
        """Verify the matrix assembly agrees with forced quadrature."""
        at = SpectralParameter.from_k(0.3 + 0.6j)
        q1 = BoxEven(z=0.5, rho=1.0)
        q2 = BoxOddSign(z=1.0, rho=1.0)

        closed = weyl_matrix(at, q1, q2).entries
        numeric = weyl_matrix(at, q1, q2, method=EvaluationMethod.QUADRATURE).entries

        assert np.allclose(closed, numeric, atol=1e-8)


class TestWeylDerivativeUnit:
    """Unit tests for dW~/dlambda."""

    def test_free_derivative(self) -> None:
        """Verify dW~/dlambda = i/k for the zero potential."""
        at = SpectralParameter.from_k(0.5 + 0.5j)

        assert weyl_derivative(at, ZeroPotential()) == pytest.approx(1j / at.k)

    def test_boundary_rejected(self) -> None:
        """Verify the derivative needs an interior point."""
        with pytest.raises(PreconditionError):
            weyl_derivative(SpectralParameter.from_k(1.0), ZeroPotential())

    def test_stencil_matches_closed_form(self) -> None:
        """Verify the Cauchy stencil reproduces the analytic k-derivative."""
        q = ExpEven(c=0.5j, mu=0.25)
        at = SpectralParameter.from_k(0.866 + 0.25j)

        analytic = closed_form_weyl(at.k, q)[1]
        stencil = weyl_derivative_k(at, q)

        assert abs(stencil - analytic) < 1e-6 * max(1.0, abs(analytic))

    def test_stencil_radius_argument(self) -> None:
        """Verify a wider stencil circle still matches the analytic derivative in lambda."""
        q = ExpEven(c=0.5j, mu=0.25)
        at = SpectralParameter.from_k(0.866 + 0.25j)

        analytic = closed_form_weyl(at.k, q)[1] / (2.0 * at.k)
        stencil = weyl_derivative_k(at, q, radius=0.05) / (2.0 * at.k)

        assert abs(stencil - analytic) < 1e-6 * max(1.0, abs(analytic))

    def test_sampled_uses_stencil(self) -> None:
        """Verify sampled potentials get a finite derivative."""
        hat = SampledPotential(nodes=(-1.0, 0.0, 1.0), values=(0j, 1 + 0j, 0j))

        value = weyl_derivative(SpectralParameter.from_k(1j), hat)

        assert np.isfinite(value)


class TestWeylProperty:
    """
    Property-based tests for the Weyl function.

    **Feature: pointspec, Property 7: Closed-Form Weyl Functions Match The Convolution Assembly**
    """

    @given(
        q=sampled_from(CATALOG),
        re_k=floats(min_value=-2.0, max_value=2.0),
        im_k=floats(min_value=0.3, max_value=2.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_hand_closed_form_matches_assembly(self, q, re_k, im_k) -> None:
        """
        Property: closed_form_weyl agrees with the convolution assembly.
        """
        at = SpectralParameter.from_k(complex(re_k, im_k))

        hand = closed_form_weyl(at.k, q)[0]
        assembled = weyl_scalar(at, q).value

        assert abs(hand - assembled) < 1e-9 * max(1.0, abs(hand))

    @given(q=sampled_from(CATALOG), k=sampled_from([0.5 + 1j, -1.0 + 0.5j, 2j]))
    @settings(max_examples=20, deadline=None)
    def test_closed_form_matches_quadrature(self, q, k) -> None:
        """
        Property: Closed forms and quadrature agree to 1e-8.
        """
        at = SpectralParameter.from_k(k)

        closed = weyl_scalar(at, q).value
        numeric = weyl_scalar(at, q, method=EvaluationMethod.QUADRATURE).value

        assert abs(closed - numeric) < 1e-8

    @given(
        q=sampled_from(REAL_POTENTIALS + CATALOG),
        re_k=floats(min_value=0.1, max_value=3.0),
        im_k=floats(min_value=0.1, max_value=3.0),
        mirror=sampled_from([1.0, -1.0]),
    )
    @settings(max_examples=50, deadline=None)
    def test_herglotz(self, q, re_k, im_k, mirror) -> None:
        """
        Property: (Im lambda)(Im W~) > 0 off the real axis, for real and complex q.

        **Feature: pointspec, Property 8: Weyl Functions Are Herglotz**
        """
        at = SpectralParameter.from_k(complex(mirror * re_k, im_k))

        assert herglotz_sign(at, q) > 0
