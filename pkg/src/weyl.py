"""
pointspec - Weyl Function Module.

This module evaluates the Weyl-Titchmarsh functions of the model:

    - the scalar W~(lambda) = (q, G*q) + 2ik [1 + (G*q)(0)] [1 + (G*q^*)(0)]
      of the delta model, whose zeros of a - W~ are the eigenvalues;
    - the 2x2 matrix W(lambda) of the general model, assembled as the
      bilinear block [(q_i, G*q_j)] plus B_{q1*,q2*}^t diag(2ik, 2i/k) B_{q1,q2};
    - their boundary values on (0, inf) taken at real k;
    - the derivative dW~/dlambda used by the exceptional-point test.

Catalog potentials additionally have hand-derived closed forms for W~
and dW~/dk, which drive the analytic derivative.

Functions:
    weyl_scalar, weyl_matrix, weyl_boundary, weyl_derivative, b_matrix,
    closed_form_weyl, herglotz_sign.
"""

import cmath
import logging
from typing import Optional, Tuple, Union

import numpy as np

from src.errors import PreconditionError
from src.greens import DEFAULT_TOL, bilinear, conv_G_q, conv_Gprime_q
from src.schema import (
    BoxEven,
    BoxOddSign,
    EvaluationMethod,
    ExpEven,
    Potential,
    SpectralParameter,
    WeylMatrix,
    WeylScalar,
    ZeroPotential,
)

logger = logging.getLogger(__name__)

# Cauchy stencil for the derivative of potentials without a closed form;
# the radius is relative to |k|
STENCIL_NODES = 8
STENCIL_RADIUS = 0.01


def closed_form_weyl(k: complex, q: Potential) -> Optional[Tuple[complex, complex]]:
    """
    Returns (W~, dW~/dk) for catalog potentials, None otherwise.

    Example:
        >>> closed_form_weyl(1j, ZeroPotential())
        ((-2+0j), 2j)
    """
    k = complex(k)
    if isinstance(q, ZeroPotential):
        return 2j * k, 2j

    if isinstance(q, BoxEven):
        z = complex(q.z)
        rho = q.rho
        e = cmath.exp(1j * k * rho)
        em1 = complex(np.expm1(1j * k * rho))
        em2 = complex(np.expm1(2j * k * rho))
        n = 1j * em2 + 2.0 * rho * k
        n_prime = -2.0 * rho * em2
        p = -z * z * n / k ** 3
        p_prime = -z * z * (n_prime / k ** 3 - 3.0 * n / k ** 4)
        s = 1.0 + z * em1 / k ** 2
        s_prime = z * (1j * rho * e / k ** 2 - 2.0 * em1 / k ** 3)
        value = p + 2j * k * s * s
        derivative = p_prime + 2j * s * s + 4j * k * s * s_prime
        return value, derivative

    if isinstance(q, BoxOddSign):
        weight = abs(q.z) ** 2
        rho = q.rho
        e = cmath.exp(1j * k * rho)
        m = (e - 2.0) ** 2 - 1.0 + 2j * k * rho
        m_prime = 2.0 * (e - 2.0) * 1j * rho * e + 2j * rho
        value = 2j * k + 1j * weight * m / k ** 3
        derivative = 2j + 1j * weight * (m_prime / k ** 3 - 3.0 * m / k ** 4)
        return value, derivative

    if isinstance(q, ExpEven):
        c = complex(q.c)
        d = q.mu - 1j * k
        value = 2j * k - 4.0 * c.real / d + q.norm_squared / d ** 2
        derivative = 2j - 4j * c.real / d ** 2 + 2j * q.norm_squared / d ** 3
        return value, derivative

    return None


def weyl_scalar(
    k: SpectralParameter,
    q: Potential,
    tol: float = DEFAULT_TOL,
    method: Optional[EvaluationMethod] = None
) -> WeylScalar:
    """
    Evaluates the scalar Weyl function of the delta model.

    Args:
        k: Spectral parameter, interior or boundary.
        q: Potential.
        tol: Absolute quadrature tolerance.
        method: Force closed form or quadrature for the convolutions.

    Returns:
        WeylScalar.

    Raises:
        QuadratureError: Propagated from the Green kernel module.

    Example:
        >>> weyl_scalar(SpectralParameter.from_k(1j), ZeroPotential()).value
        (-2+0j)
    """
    part_tol = tol / 4.0
    form = bilinear(k, q, q, part_tol, method).value
    g = conv_G_q(k, q, 0.0, part_tol, method).value
    g_conj = conv_G_q(k, q.conjugate(), 0.0, part_tol, method).value
    value = form + 2j * k.k * (1.0 + g) * (1.0 + g_conj)
    return WeylScalar(value=complex(value), at=k)


def b_matrix(
    k: SpectralParameter,
    q1: Potential,
    q2: Potential,
    tol: float = DEFAULT_TOL,
    method: Optional[EvaluationMethod] = None
) -> np.ndarray:
    """
    Returns B = [[1 + (G*q1)(0), (G*q2)(0)], [-(G'*q1)(0), 1 - (G'*q2)(0)]].

    The factor maps the boundary data of the free solutions to the
    boundary data of the basis u, v.
    """
    return np.array(
        [
            [
                1.0 + conv_G_q(k, q1, 0.0, tol, method).value,
                conv_G_q(k, q2, 0.0, tol, method).value,
            ],
            [
                -conv_Gprime_q(k, q1, 0.0, tol, method).value,
                1.0 - conv_Gprime_q(k, q2, 0.0, tol, method).value,
            ],
        ],
        dtype=complex,
    )


def weyl_matrix(
    k: SpectralParameter,
    q1: Potential,
    q2: Potential,
    tol: float = DEFAULT_TOL,
    method: Optional[EvaluationMethod] = None
) -> WeylMatrix:
    """
    Evaluates the 2x2 Weyl function of the general model.

    Returns:
        WeylMatrix with entries W[i, j] = (q_i, G*q_j) plus the boundary
        factorisation term.

    Raises:
        QuadratureError: Propagated from the Green kernel module.

    Example:
        >>> w = weyl_matrix(SpectralParameter.from_k(1j), ZeroPotential(), ZeroPotential())
        >>> w.entries.diagonal()
        array([-2.+0.j,  2.+0.j])
    """
    part_tol = tol / 12.0
    potentials = (q1, q2)
    block = np.array(
        [
            [bilinear(k, qi, qj, part_tol, method).value for qj in potentials]
            for qi in potentials
        ],
        dtype=complex,
    )
    b = b_matrix(k, q1, q2, part_tol, method)
    b_conj = b_matrix(k, q1.conjugate(), q2.conjugate(), part_tol, method)
    free = np.diag([2j * k.k, 2j / k.k])
    return WeylMatrix(entries=block + b_conj.T @ free @ b, at=k)


def weyl_boundary(
    k: float,
    q: Potential,
    q2: Optional[Potential] = None,
    tol: float = DEFAULT_TOL
) -> Union[WeylScalar, WeylMatrix]:
    """
    Evaluates a boundary value of the Weyl function on (0, inf).

    k > 0 gives the limit from the upper side of the cut (W^+), k < 0
    the limit from the lower side (W^-), both at lambda = k**2.

    Args:
        k: Non-zero real number.
        q: Potential of the delta model, or q1 of the general model.
        q2: Second potential; when given a WeylMatrix is returned.
        tol: Absolute quadrature tolerance.

    Raises:
        PreconditionError: If k is not real.
        BranchPointError: If k is zero.
    """
    k = complex(k)
    if k.imag != 0:
        raise PreconditionError(f"boundary values need real k, got {k}")
    at = SpectralParameter.from_k(k)
    if q2 is None:
        return weyl_scalar(at, q, tol)
    return weyl_matrix(at, q, q2, tol)


def weyl_derivative(
    k: SpectralParameter,
    q: Potential,
    tol: float = DEFAULT_TOL,
    radius: float = STENCIL_RADIUS
) -> complex:
    """
    Returns dW~/dlambda = (dW~/dk) / (2k).

    Catalog potentials use the closed form; sampled potentials use an
    eight-point Cauchy stencil on a circle of radius radius*|k| around k,
    shrunk to stay inside the upper half-plane.

    Raises:
        PreconditionError: If Im k <= 0.
    """
    if not k.k.imag > 0:
        raise PreconditionError(f"the derivative needs Im k > 0, got {k.k}")
    closed = closed_form_weyl(k.k, q)
    if closed is not None:
        return closed[1] / (2.0 * k.k)
    return weyl_derivative_k(k, q, tol, radius) / (2.0 * k.k)


def weyl_derivative_k(
    k: SpectralParameter,
    q: Potential,
    tol: float = DEFAULT_TOL,
    radius: float = STENCIL_RADIUS
) -> complex:
    """dW~/dk by the Cauchy integral formula on a circle of relative radius `radius`."""
    radius = min(radius * abs(k.k), 0.5 * k.k.imag)
    roots = np.exp(2j * np.pi * np.arange(STENCIL_NODES) / STENCIL_NODES)
    values = np.array([
        weyl_scalar(SpectralParameter.from_k(k.k + radius * w), q, tol).value
        for w in roots
    ])
    derivative = complex(np.sum(values / roots) / (STENCIL_NODES * radius))
    logger.debug("stencil derivative at k=%s with radius %.3g", k.k, radius)
    return derivative


def herglotz_sign(k: SpectralParameter, q: Potential, tol: float = DEFAULT_TOL) -> float:
    """Returns (Im lambda)(Im W~); positive whenever Im lambda != 0."""
    return k.lam.imag * weyl_scalar(k, q, tol).value.imag
