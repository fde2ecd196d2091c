"""
pointspec - Eigenfunction Module.

Solutions of -f'' + q1 f_r(0) - q2 f'_r(0) = k**2 f away from the origin:
the general basis u, v, the delta-model function u_lambda, and closed
forms for the even box at an embedded eigenvalue and for the even
exponential potential.

At x = 0 every function returns the mean of its one-sided limits, so
f(0) is the regular part f_r(0). The one-sided limits are available with
side = +1 (0+) and side = -1 (0-).

Classes:
    Eigenfunction: Base class with boundary data and inner products.
    KernelCombination: c0 (G*p) + cG G + cG' G' built from convolutions.
    EmbeddedBoxFunction: Compactly supported solution of the even box.
    ExpEvenFunction: Closed-form solution of the exponential potential.

Functions:
    basis_general, u_delta, wave_coefficients, embedded_box_eigenfunction,
    exp_even_eigenfunction, is_square_integrable, norm_squared,
    reflection_amplitudes, pointwise_residual.
"""

import cmath
import logging
import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.errors import CriterionViolatedError, PoleError, PreconditionError
from src.greens import (
    DEFAULT_TOL,
    bilinear,
    conv_G_q,
    conv_Gprime_q,
    exp_moment,
    green_kernel,
    green_kernel_derivative,
    integrate_complex,
)
from src.schema import (
    BoundaryData,
    BoxEven,
    BoxOddSign,
    EigenfunctionKind,
    ExpEven,
    Parity,
    Potential,
    SampledPotential,
    SpectralParameter,
    WaveCoefficients,
    ZeroPotential,
)
from src.symmetry import potential_parity

logger = logging.getLogger(__name__)

# Step of the five-point second difference used for residuals
RESIDUAL_STEP = 1e-4

# Truncation of norm integrals: tails decay like exp(-2 * TAIL_DECAY)
TAIL_DECAY = 30.0


def _support_radius(q: Potential) -> float:
    if isinstance(q, SampledPotential):
        return max(abs(q.nodes[0]), abs(q.nodes[-1]))
    return q.support_radius


class Eigenfunction(ABC):
    """
    A solution of the eigenvalue equation with its boundary data.

    Attributes:
        kind: Construction used.
        k: Spectral parameter.
        q1, q2: Potentials of the boundary maps Gamma1.
        tol: Quadrature tolerance.
    """

    def __init__(
        self,
        kind: EigenfunctionKind,
        k: SpectralParameter,
        q1: Potential,
        q2: Potential,
        tol: float = DEFAULT_TOL
    ):
        self.kind = kind
        self.k = k
        self.q1 = q1
        self.q2 = q2
        self.tol = tol

    @abstractmethod
    def value(self, x: float, side: int = 0) -> complex:
        """Returns f(x); at x = 0 the limit from `side`, or the mean for side 0."""

    @abstractmethod
    def slope(self, x: float, side: int = 0) -> complex:
        """Returns f'(x) with the same convention at x = 0."""

    @property
    @abstractmethod
    def support_radius(self) -> float:
        """Radius outside which f is a pure outgoing wave (inf if never)."""

    def __call__(self, x: float) -> complex:
        return self.value(float(x))

    def evaluate(self, xs: Sequence[float]) -> np.ndarray:
        """Evaluates f on a grid."""
        return np.array([self.value(float(x)) for x in xs], dtype=complex)

    def origin_parts(self) -> Tuple[complex, complex, complex, complex]:
        """Returns (f_r(0), f_s(0), f'_r(0), f'_s(0))."""
        f_plus, f_minus = self.value(0.0, 1), self.value(0.0, -1)
        d_plus, d_minus = self.slope(0.0, 1), self.slope(0.0, -1)
        return (
            0.5 * (f_plus + f_minus),
            f_plus - f_minus,
            0.5 * (d_plus + d_minus),
            d_plus - d_minus,
        )

    def inner_product(self, q: Potential) -> complex:
        """Returns (q, f) = int q(x)^* f(x) dx by quadrature."""
        if isinstance(q, ZeroPotential):
            return 0j
        radius = _support_radius(q)
        if math.isinf(radius):
            radius = self._decay_length()
        breaks = tuple(q.breakpoints) + (0.0,)

        def integrand(x: float) -> complex:
            return complex(q(x)).conjugate() * self.value(x)

        value, _ = integrate_complex(integrand, -radius, radius, breaks, self.tol)
        return value

    def _decay_length(self) -> float:
        decay = self.k.k.imag
        if isinstance(self.q1, ExpEven):
            decay = min(decay, self.q1.mu) if decay > 0 else self.q1.mu
        return 2.0 * TAIL_DECAY / decay

    def boundary_data(self) -> BoundaryData:
        """
        Returns Gamma0 f = (f_r(0), -f'_r(0)) and
        Gamma1 f = (f'_s(0) - (q1, f), f_s(0) - (q2, f)).
        """
        f_r, f_s, d_r, d_s = self.origin_parts()
        return BoundaryData(
            gamma0=(f_r, -d_r),
            gamma1=(
                d_s - self.inner_product(self.q1),
                f_s - self.inner_product(self.q2),
            ),
        )


class KernelCombination(Eigenfunction):
    """
    f = c0 (G*p) + cG G + cG' G' for a potential p.

    Inner products with catalog potentials use the closed forms of the
    Green kernel module.
    """

    def __init__(
        self,
        kind: EigenfunctionKind,
        k: SpectralParameter,
        q1: Potential,
        q2: Potential,
        source: Potential,
        coefficients: Tuple[complex, complex, complex],
        tol: float = DEFAULT_TOL
    ):
        super().__init__(kind, k, q1, q2, tol)
        self.source = source
        self.coefficients = coefficients

    @property
    def support_radius(self) -> float:
        return _support_radius(self.source)

    def value(self, x: float, side: int = 0) -> complex:
        c0, c_g, c_gp = self.coefficients
        total = c_g * green_kernel(self.k, x) + c_gp * green_kernel_derivative(self.k, x, side)
        if c0 != 0:
            total += c0 * conv_G_q(self.k, self.source, x, self.tol).value
        return complex(total)

    def slope(self, x: float, side: int = 0) -> complex:
        c0, c_g, c_gp = self.coefficients
        # G'' = -k**2 G away from the origin, including both one-sided limits
        total = (
            c_g * green_kernel_derivative(self.k, x, side)
            - c_gp * self.k.lam * green_kernel(self.k, x)
        )
        if c0 != 0:
            total += c0 * conv_Gprime_q(self.k, self.source, x, self.tol).value
        return complex(total)

    def inner_product(self, q: Potential) -> complex:
        if isinstance(q, ZeroPotential):
            return 0j
        c0, c_g, c_gp = self.coefficients
        q_conj = q.conjugate()
        # (q, G) = (G*q^*)(0) and (q, G') = -(G'*q^*)(0) since G is even
        total = (
            c_g * conv_G_q(self.k, q_conj, 0.0, self.tol).value
            - c_gp * conv_Gprime_q(self.k, q_conj, 0.0, self.tol).value
        )
        if c0 != 0:
            total += c0 * bilinear(self.k, q, self.source, self.tol).value
        return complex(total)


class EmbeddedBoxFunction(Eigenfunction):
    """u(x) = Z (1 - cos k0 (rho - |x|)) / k0**2 on [-rho, rho], zero outside."""

    def __init__(self, q: BoxEven, k: SpectralParameter):
        super().__init__(EigenfunctionKind.EMBEDDED_BOX, k, q, ZeroPotential())
        self.z = complex(q.z).real
        self.rho = q.rho
        self.k0 = k.k.real

    @property
    def support_radius(self) -> float:
        return self.rho

    def value(self, x: float, side: int = 0) -> complex:
        if abs(x) > self.rho:
            return 0j
        return complex(self.z * (1.0 - math.cos(self.k0 * (self.rho - abs(x)))) / self.k0 ** 2)

    def slope(self, x: float, side: int = 0) -> complex:
        if abs(x) > self.rho:
            return 0j
        sign = math.copysign(1.0, x) if x != 0 else float(side)
        return complex(-self.z * sign * math.sin(self.k0 * (self.rho - abs(x))) / self.k0)


class ExpEvenFunction(Eigenfunction):
    """u(x) = (1 - c/(mu**2 + lambda)) exp(ik|x|) + q(x)/(mu**2 + lambda)."""

    def __init__(self, q: ExpEven, k: SpectralParameter):
        super().__init__(EigenfunctionKind.EXP_EVEN, k, q, ZeroPotential())
        self.c = complex(q.c)
        self.mu = q.mu
        self.shift = self.mu ** 2 + k.lam

    @property
    def tail_amplitude(self) -> complex:
        return 1.0 - self.c / self.shift

    @property
    def support_radius(self) -> float:
        return math.inf

    def value(self, x: float, side: int = 0) -> complex:
        tail = self.tail_amplitude * cmath.exp(1j * self.k.k * abs(x))
        return complex(tail + self.c * math.exp(-self.mu * abs(x)) / self.shift)

    def slope(self, x: float, side: int = 0) -> complex:
        sign = math.copysign(1.0, x) if x != 0 else float(side)
        tail = self.tail_amplitude * 1j * self.k.k * cmath.exp(1j * self.k.k * abs(x))
        core = -self.mu * self.c * math.exp(-self.mu * abs(x)) / self.shift
        return complex(sign * (tail + core))


def basis_general(
    k: SpectralParameter,
    q1: Potential,
    q2: Potential,
    tol: float = DEFAULT_TOL
) -> Tuple[KernelCombination, KernelCombination]:
    """
    Builds the basis u, v of solutions at lambda = k**2.

    u = -(G*q1) - 2ik [1 + (G*q1)(0)] G + (2i/k) (G'*q1)(0) G'
    v = -(G*q2) - 2ik (G*q2)(0) G - (2i/k) [1 - (G'*q2)(0)] G'

    Their boundary data are Gamma0 u = (1, 0) and Gamma0 v = (0, 1).

    Raises:
        PreconditionError: If Im k <= 0.
    """
    if not k.k.imag > 0:
        raise PreconditionError(f"the basis needs Im k > 0, got {k.k}")
    kk = k.k
    g1 = conv_G_q(k, q1, 0.0, tol).value
    g1_prime = conv_Gprime_q(k, q1, 0.0, tol).value
    g2 = conv_G_q(k, q2, 0.0, tol).value
    g2_prime = conv_Gprime_q(k, q2, 0.0, tol).value
    u = KernelCombination(
        EigenfunctionKind.GENERAL_U, k, q1, q2, q1,
        (-1.0, -2j * kk * (1.0 + g1), 2j / kk * g1_prime),
        tol,
    )
    v = KernelCombination(
        EigenfunctionKind.GENERAL_V, k, q1, q2, q2,
        (-1.0, -2j * kk * g2, -2j / kk * (1.0 - g2_prime)),
        tol,
    )
    return u, v


def u_delta(k: SpectralParameter, q: Potential, tol: float = DEFAULT_TOL) -> KernelCombination:
    """
    Builds u = -(G*q) - 2ik [1 + (G*q)(0)] G for the delta model.

    u(0) = 1 and u'_s(0) - (q, u) = W~. Real k gives the generalized
    eigenfunction on the continuous spectrum.
    """
    g = conv_G_q(k, q, 0.0, tol).value
    return KernelCombination(
        EigenfunctionKind.DELTA_U, k, q, ZeroPotential(), q,
        (-1.0, -2j * k.k * (1.0 + g), 0j),
        tol,
    )


def wave_coefficients(
    k: SpectralParameter,
    q: Potential,
    x: float,
    tol: float = DEFAULT_TOL
) -> WaveCoefficients:
    """
    Returns the plane-wave coefficients of u_delta at x.

    u = A e^{ikx} + B e^{-ikx} for x > 0 and C e^{ikx} + D e^{-ikx} for
    x < 0, where

        A = 1 + g - (i/2k) int_{-inf}^x e^{-iks} q,   B = -(i/2k) int_x^inf e^{iks} q,
        C = -(i/2k) int_{-inf}^x e^{-iks} q,   D = 1 + g - (i/2k) int_x^inf e^{iks} q,

    with g = (G*q)(0). Beyond the support of q, A and D are the tail
    amplitudes and B, C vanish.
    """
    scale = 0.5j / k.k
    one_plus_g = 1.0 + conv_G_q(k, q, 0.0, tol).value
    left = exp_moment(k, q, -1, -math.inf, x, tol)
    right = exp_moment(k, q, 1, x, math.inf, tol)
    return WaveCoefficients(
        a=complex(one_plus_g - scale * left),
        b=complex(-scale * right),
        c=complex(-scale * left),
        d=complex(one_plus_g - scale * right),
        x=float(x),
    )


def embedded_box_eigenfunction(z: float, rho: float, k0: float, tol: float = 1e-10) -> EmbeddedBoxFunction:
    """
    Builds the eigenfunction of the even box at an embedded eigenvalue.

    Raises:
        CriterionViolatedError: Unless Z (1 - cos k0 rho) = k0**2.

    Example:
        >>> u = embedded_box_eigenfunction(0.5, math.pi, 1.0)
        >>> round(u(0.0).real, 12)
        1.0
    """
    if not k0 > 0:
        raise PreconditionError(f"k0 must be positive, got {k0}")
    mismatch = z * (1.0 - math.cos(k0 * rho)) - k0 * k0
    if abs(mismatch) > tol:
        raise CriterionViolatedError(
            f"Z(1 - cos k0 rho) differs from k0^2 by {mismatch:.3g}",
            {"z": z, "rho": rho, "k0": k0},
        )
    return EmbeddedBoxFunction(BoxEven(z=z, rho=rho), SpectralParameter.from_k(k0))


def exp_even_eigenfunction(c: complex, mu: float, k: SpectralParameter) -> ExpEvenFunction:
    """
    Builds u_lambda of the exponential potential in closed form.

    Raises:
        PoleError: At lambda = -mu**2.
    """
    if abs(mu * mu + k.lam) <= 1e-14 * (1.0 + mu * mu):
        raise PoleError(
            f"lambda = -mu^2 = {-mu * mu} is a pole of the closed form",
            {"mu": mu},
        )
    return ExpEvenFunction(ExpEven(c=complex(c), mu=mu), k)


def is_square_integrable(f: Eigenfunction, tol: float = 1e-12) -> bool:
    """True for Im k > 0, compact support, or the exponential bound state without a tail."""
    if f.k.k.imag > 0 or isinstance(f, EmbeddedBoxFunction):
        return True
    return isinstance(f, ExpEvenFunction) and abs(f.tail_amplitude) <= tol


def norm_squared(f: Eigenfunction, truncation: Optional[float] = None, tol: float = 1e-12) -> float:
    """
    Returns ||f||^2.

    The integral runs over [-L, L] with L = max(support radius, 30/Im k)
    by default. Outside a finite support f is A exp(ik|x|), whose tails
    are added in closed form.

    Raises:
        PreconditionError: If f is not square integrable.
    """
    radius = f.support_radius
    decay = f.k.k.imag
    compact = isinstance(f, EmbeddedBoxFunction)
    if not is_square_integrable(f):
        raise PreconditionError("norm needs Im k > 0 unless f decays on its own")

    if truncation is not None:
        length = float(truncation)
    elif compact:
        length = radius
    elif math.isinf(radius):
        length = f._decay_length()
    else:
        length = max(radius, TAIL_DECAY / decay)

    points = sorted({p for p in (-radius, 0.0, radius) if -length < p < length})
    total = 0.0
    edges = [-length] + points + [length]
    for lo, hi in zip(edges, edges[1:]):
        part, _ = integrate.quad(
            lambda x: abs(f.value(x)) ** 2, lo, hi, epsabs=tol, epsrel=1e-12, limit=200
        )
        total += part

    if not compact and not math.isinf(radius) and length >= radius:
        # tails of A exp(ik|x|) beyond +-length
        total += (abs(f.value(length)) ** 2 + abs(f.value(-length)) ** 2) / (2.0 * decay)
    return total


def reflection_amplitudes(k: float, q: Potential, tol: float = DEFAULT_TOL) -> Tuple[complex, complex]:
    """
    Returns the tail amplitudes (1 - t, 1 + t) of u_delta for an odd q at
    real k, with t = (1/k) int_0^rho sin(ks) q(s) ds.

    They cannot both vanish, so odd potentials have no embedded eigenvalue.

    Raises:
        PreconditionError: Unless q is odd with compact support and k is real.
    """
    if isinstance(q, ExpEven) or (
        not isinstance(q, BoxOddSign) and potential_parity(q) is not Parity.ODD
    ):
        raise PreconditionError("reflection amplitudes need an odd compactly supported q")
    at = SpectralParameter.from_k(float(k))
    edge = _support_radius(q) + 1.0
    right = wave_coefficients(at, q, edge, tol).a
    left = wave_coefficients(at, q, -edge, tol).d
    return right, left


def pointwise_residual(f: Eigenfunction, x: float, step: float = RESIDUAL_STEP) -> complex:
    """
    Returns -f''(x) + q1(x) (Gamma0 f)_1 + q2(x) (Gamma0 f)_2 - k**2 f(x).

    The second derivative is a five-point central difference, so x must be
    farther than 2*step from the origin and from breakpoints of q1, q2.
    """
    samples = [f.value(x + j * step) for j in (-2, -1, 0, 1, 2)]
    second = (
        -samples[0] + 16.0 * samples[1] - 30.0 * samples[2] + 16.0 * samples[3] - samples[4]
    ) / (12.0 * step * step)
    f_r, _, d_r, _ = f.origin_parts()
    coupling = complex(f.q1(x)) * f_r - complex(f.q2(x)) * d_r
    return complex(-second + coupling - f.k.lam * samples[2])
