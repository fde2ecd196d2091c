"""
pointspec - Green Kernel Module.

The free outgoing Green kernel G(x) = (i/2k) exp(ik|x|), its derivative
G'(x) = -(1/2) sign(x) exp(ik|x|) with sign(0) = 0, the convolutions
(G*q)(x), (G'*q)(x), the bilinear forms (q_a, G*q_b) and exponential
moments of a potential.

Catalog potentials are split into exponential pieces alpha*exp(beta*s)
on intervals, for which every integral has a closed form. Sampled
potentials go through adaptive quadrature: scipy's QUADPACK for single
integrals and a Gauss-Legendre panel pair for the double integral.

The inner product is conjugate-linear in its first argument.

Functions:
    green_kernel, green_kernel_derivative: Kernel values.
    conv_G_q, conv_Gprime_q: Convolutions at a point.
    bilinear: (q_a, G*q_b).
    exp_moment: Integral of exp(+-iks) q(s) over an interval.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.errors import QuadratureError
from src.schema import (
    BoxEven,
    BoxOddSign,
    ConvolutionValue,
    EvaluationMethod,
    ExpEven,
    Potential,
    SampledPotential,
    SpectralParameter,
    ZeroPotential,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
QUAD_LIMIT = 200

# Gauss-Legendre pair (n, 2n) for the sampled double integral
PANEL_ORDER = 8
MAX_PANEL_REFINEMENTS = 6
MAX_PANEL_NODES = 3000

# Below this |r * length| the triangle integral switches to Gauss-Legendre
DIVIDED_DIFFERENCE_FLOOR = 1e-3


def kernel_sign(x: float, side: int = 0) -> float:
    """Returns sign(x), or `side` (-1, 0 or +1) when x is exactly 0."""
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return float(side)


def green_kernel(k: SpectralParameter, x: float) -> complex:
    """
    Evaluates G(x) = (i/2k) exp(ik|x|).

    Example:
        >>> green_kernel(SpectralParameter.from_k(1j), 0.0)
        (0.5+0j)
    """
    return 0.5j / k.k * cmath.exp(1j * k.k * abs(x))


def green_kernel_derivative(k: SpectralParameter, x: float, side: int = 0) -> complex:
    """
    Evaluates G'(x) = -(1/2) sign(x) exp(ik|x|).

    Args:
        k: Spectral parameter.
        x: Evaluation point.
        side: One-sided limit at x = 0 (+1 for 0+, -1 for 0-); the
            default 0 returns the mean of both limits, i.e. 0.
    """
    sign = kernel_sign(x, side)
    if sign == 0:
        return 0j
    return -0.5 * sign * cmath.exp(1j * k.k * abs(x))


# ---------------------------------------------------------------------------
# Closed forms for catalog potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpPiece:
    """q(s) = alpha * exp(beta * s) on [lo, hi]; lo or hi may be infinite."""

    alpha: complex
    beta: float
    lo: float
    hi: float


def exp_pieces(q: Potential) -> List[ExpPiece]:
    """
    Splits a catalog potential into exponential pieces.

    Raises:
        TypeError: For sampled potentials.
    """
    if isinstance(q, ZeroPotential):
        return []
    if isinstance(q, BoxEven):
        return [ExpPiece(complex(q.z), 0.0, -q.rho, q.rho)]
    if isinstance(q, BoxOddSign):
        z = complex(q.z)
        return [ExpPiece(-z, 0.0, -q.rho, 0.0), ExpPiece(z, 0.0, 0.0, q.rho)]
    if isinstance(q, ExpEven):
        c = complex(q.c)
        return [ExpPiece(c, q.mu, -math.inf, 0.0), ExpPiece(c, -q.mu, 0.0, math.inf)]
    raise TypeError(f"{type(q).__name__} has no closed form")


def _phi1(z: complex) -> complex:
    """(exp(z) - 1) / z, accurate near z = 0."""
    if z == 0:
        return 1.0 + 0j
    return complex(np.expm1(z)) / z


def segment_integral(gamma: complex, lo: float, hi: float, offset: complex = 0j) -> complex:
    """
    Returns the integral of exp(gamma*s + offset) over [lo, hi].

    The exponential is anchored at the dominant end, so no intermediate
    quantity is larger than the result allows. Infinite ends require the
    integrand to decay there.
    """
    if not hi > lo:
        return 0j
    if math.isinf(lo):
        return cmath.exp(gamma * hi + offset) / gamma
    if math.isinf(hi):
        return -cmath.exp(gamma * lo + offset) / gamma
    length = hi - lo
    if gamma.real >= 0:
        return cmath.exp(gamma * hi + offset) * length * _phi1(-gamma * length)
    return cmath.exp(gamma * lo + offset) * length * _phi1(gamma * length)


def _one_sided_parts(k: complex, pieces: Sequence[ExpPiece], x: float) -> Tuple[complex, complex]:
    """
    Returns (L, R) with L = int_{s<x} e^{ik(x-s)} q(s) ds and
    R = int_{s>x} e^{ik(s-x)} q(s) ds.
    """
    ik = 1j * k
    left = 0j
    right = 0j
    for piece in pieces:
        if piece.lo < x:
            left += piece.alpha * segment_integral(
                piece.beta - ik, piece.lo, min(piece.hi, x), ik * x
            )
        if piece.hi > x:
            right += piece.alpha * segment_integral(
                piece.beta + ik, max(piece.lo, x), piece.hi, -ik * x
            )
    return left, right


@lru_cache(maxsize=8)
def _gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _triangle_integral(p: complex, r: complex, length: float) -> complex:
    """Returns int_0^L exp(pX) int_0^X exp(rS) dS dX."""
    if math.isinf(length):
        return 1.0 / (p * (p + r))
    if abs(r * length) > DIVIDED_DIFFERENCE_FLOOR:
        return length * (_phi1((p + r) * length) - _phi1(p * length)) / r
    # Removable case r -> 0: integrate X * phi1(rX) * exp(pX) directly
    t, w = _gauss_legendre(64)
    x = 0.5 * length * (t + 1.0)
    z = r * x
    phi = 1.0 + z / 2.0 + z * z / 6.0 + z ** 3 / 24.0
    return complex(np.sum(0.5 * length * w * np.exp(p * x) * x * phi))


def _square_integral(ea: float, eb: float, k: complex, o0: float, o1: float) -> complex:
    """int over [o0,o1]^2 of exp(ea*x + eb*s + ik|x-s|)."""
    ik = 1j * k
    if math.isinf(o0):
        # reflect about o1 so the square starts at the origin
        origin, ea_, eb_, length = o1, -ea, -eb, math.inf
    else:
        origin, ea_, eb_, length = o0, ea, eb, o1 - o0
    scale = cmath.exp((ea + eb) * origin)
    lower = _triangle_integral(ea_ + ik, eb_ - ik, length)
    upper = _triangle_integral(eb_ + ik, ea_ - ik, length)
    return scale * (lower + upper)


def _pair_integral(
    ea: float,
    eb: float,
    k: complex,
    a_range: Tuple[float, float],
    b_range: Tuple[float, float]
) -> complex:
    """int_A int_B exp(ea*x + eb*s + ik|x-s|) ds dx for two pieces."""
    ik = 1j * k
    a0, a1 = a_range
    b0, b1 = b_range
    total = 0j

    # x entirely left of B
    if min(a1, b0) > a0:
        total += (
            segment_integral(ea - ik, a0, min(a1, b0), ik * b0)
            * segment_integral(eb + ik, b0, b1, -ik * b0)
        )
    # x entirely right of B
    if a1 > max(a0, b1):
        total += (
            segment_integral(ea + ik, max(a0, b1), a1, -ik * b1)
            * segment_integral(eb - ik, b0, b1, ik * b1)
        )

    o0, o1 = max(a0, b0), min(a1, b1)
    if o1 > o0:
        if o0 > b0:
            total += (
                segment_integral(ea + ik, o0, o1, -ik * o0)
                * segment_integral(eb - ik, b0, o0, ik * o0)
            )
        if b1 > o1:
            total += (
                segment_integral(ea - ik, o0, o1, ik * o1)
                * segment_integral(eb + ik, o1, b1, -ik * o1)
            )
        total += _square_integral(ea, eb, k, o0, o1)
    return total


def _closed_bilinear(k: complex, qa: Potential, qb: Potential) -> complex:
    total = 0j
    for pa in exp_pieces(qa):
        for pb in exp_pieces(qb):
            total += pa.alpha.conjugate() * pb.alpha * _pair_integral(
                pa.beta, pb.beta, k, (pa.lo, pa.hi), (pb.lo, pb.hi)
            )
    return 0.5j / k * total


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def _support(q: Potential) -> Tuple[float, float]:
    if isinstance(q, SampledPotential):
        return q.nodes[0], q.nodes[-1]
    radius = q.support_radius
    return -radius, radius


def _segments(lo: float, hi: float, breaks: Sequence[float]) -> List[Tuple[float, float]]:
    cuts = sorted({b for b in breaks if lo < b < hi})
    edges = [lo] + cuts + [hi]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def integrate_complex(
    func: Callable[[float], complex],
    lo: float,
    hi: float,
    breaks: Sequence[float] = (),
    tol: float = DEFAULT_TOL,
    limit: int = QUAD_LIMIT
) -> Tuple[complex, float]:
    """
    Integrates a complex function over [lo, hi] with QUADPACK.

    The range is split at `breaks` so every call sees a smooth
    integrand; infinite ends use QUADPACK's infinite-range rule.

    Returns:
        Tuple of (value, estimated absolute error).

    Raises:
        QuadratureError: If any part fails or the error exceeds tol.
    """
    segments = _segments(lo, hi, breaks)
    if not segments:
        return 0j, 0.0
    part_tol = tol / (2.0 * len(segments))
    value = 0j
    error = 0.0
    for a, b in segments:
        for part, extract in (("real", lambda z: z.real), ("imag", lambda z: z.imag)):
            result = integrate.quad(
                lambda s: extract(func(s)),
                a,
                b,
                epsabs=part_tol,
                epsrel=0.0,
                limit=limit,
                full_output=1,
            )
            if len(result) > 3:
                raise QuadratureError(
                    f"quadrature of {part} part on [{a}, {b}] failed: {result[3]}",
                    {"interval": [a, b], "abserr": result[1]},
                )
            value += result[0] if part == "real" else 1j * result[0]
            error += result[1]
    if error > tol:
        raise QuadratureError(
            f"quadrature error {error:.3g} exceeds tolerance {tol:.3g}",
            {"abserr": error, "tol": tol},
        )
    return value, error


def _q_at(q: Potential) -> Callable[[float], complex]:
    return lambda s: complex(q(s))


def _quadrature_conv(
    k: complex,
    q: Potential,
    x: float,
    derivative: bool,
    tol: float
) -> Tuple[complex, float]:
    lo, hi = _support(q)
    q_at = _q_at(q)
    if derivative:
        def integrand(s: float) -> complex:
            return -0.5 * kernel_sign(x - s) * cmath.exp(1j * k * abs(x - s)) * q_at(s)
    else:
        def integrand(s: float) -> complex:
            return 0.5j / k * cmath.exp(1j * k * abs(x - s)) * q_at(s)
    return integrate_complex(integrand, lo, hi, tuple(q.breakpoints) + (x,), tol)


def _outer_quadrature(
    k: complex,
    outer: Potential,
    inner: Potential,
    conjugate_outer: bool,
    tol: float
) -> Tuple[complex, float]:
    """int w(x) (G*inner)(x) dx over the support of `outer`."""
    lo, hi = _support(outer)
    outer_at = _q_at(outer)
    pieces = exp_pieces(inner)

    def integrand(x: float) -> complex:
        left, right = _one_sided_parts(k, pieces, x)
        weight = outer_at(x)
        if conjugate_outer:
            weight = weight.conjugate()
        return weight * 0.5j / k * (left + right)

    breaks = tuple(outer.breakpoints) + tuple(inner.breakpoints)
    return integrate_complex(integrand, lo, hi, breaks, tol)


def _panel_sum(k: complex, qa: SampledPotential, qb: SampledPotential, breaks: np.ndarray, order: int) -> complex:
    """Tensor Gauss-Legendre rule for int int qa*(x) e^{ik|x-s|} qb(s)."""
    t, w = _gauss_legendre(order)
    lo = breaks[:-1]
    width = breaks[1:] - lo

    # off-diagonal panel pairs: plain tensor rule
    x = (lo[:, None] + 0.5 * width[:, None] * (t[None, :] + 1.0)).ravel()
    wx = (0.5 * width[:, None] * w[None, :]).ravel()
    fa = np.conj(qa(x)) * wx
    fb = qb(x) * wx
    kernel = np.exp(1j * k * np.abs(x[:, None] - x[None, :]))
    panel = np.repeat(np.arange(lo.size), order)
    kernel[panel[:, None] == panel[None, :]] = 0.0
    off_diagonal = fa @ kernel @ fb

    # diagonal panels: split along x = s, map each triangle to the square
    xi = 0.5 * (t + 1.0)
    wxi = 0.5 * w
    outer_node, inner_frac = np.meshgrid(xi, xi, indexing="ij")
    weights = np.outer(wxi, wxi) * outer_node
    h = width[:, None, None]
    far = lo[:, None, None] + h * outer_node
    near = lo[:, None, None] + h * outer_node * inner_frac
    kern = np.exp(1j * k * (far - near)) * h * h * weights
    below = np.sum(np.conj(qa(far)) * qb(near) * kern)
    above = np.sum(np.conj(qa(near)) * qb(far) * kern)
    return complex(off_diagonal + below + above)


def _sampled_bilinear(k: complex, qa: SampledPotential, qb: SampledPotential, tol: float) -> Tuple[complex, float]:
    breaks = np.union1d(qa.nodes_array, qb.nodes_array)
    for refinement in range(MAX_PANEL_REFINEMENTS + 1):
        if (breaks.size - 1) * 2 * PANEL_ORDER > MAX_PANEL_NODES:
            break
        coarse = _panel_sum(k, qa, qb, breaks, PANEL_ORDER)
        fine = _panel_sum(k, qa, qb, breaks, 2 * PANEL_ORDER)
        error = abs(fine - coarse)
        if error <= tol:
            logger.debug("panel rule converged after %d refinements", refinement)
            return 0.5j / k * fine, abs(0.5 / k) * error
        mids = 0.5 * (breaks[:-1] + breaks[1:])
        breaks = np.sort(np.concatenate([breaks, mids]))
    raise QuadratureError(
        "double integral did not converge within the panel budget",
        {"panels": int(breaks.size - 1), "tol": tol},
    )


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def _resolve_method(potentials: Sequence[Potential], method: Optional[EvaluationMethod]) -> EvaluationMethod:
    if method is not None:
        return method
    if all(q.is_catalog for q in potentials):
        return EvaluationMethod.CLOSED_FORM
    return EvaluationMethod.QUADRATURE


def conv_G_q(
    k: SpectralParameter,
    q: Potential,
    x: float,
    tol: float = DEFAULT_TOL,
    method: Optional[EvaluationMethod] = None
) -> ConvolutionValue:
    """
    Evaluates (G*q)(x) = int G(x - s) q(s) ds.

    Args:
        k: Spectral parameter.
        q: Potential.
        x: Evaluation point.
        tol: Absolute tolerance for quadrature.
        method: Force a method; by default closed form for catalog kinds.

    Returns:
        ConvolutionValue.

    Raises:
        QuadratureError: If quadrature fails to converge.
    """
    method = _resolve_method([q], method)
    if isinstance(q, ZeroPotential):
        return ConvolutionValue(0j, EvaluationMethod.CLOSED_FORM)
    if method is EvaluationMethod.CLOSED_FORM:
        left, right = _one_sided_parts(k.k, exp_pieces(q), x)
        return ConvolutionValue(0.5j / k.k * (left + right), method)
    value, error = _quadrature_conv(k.k, q, x, derivative=False, tol=tol)
    return ConvolutionValue(value, method, error)


def conv_Gprime_q(
    k: SpectralParameter,
    q: Potential,
    x: float,
    tol: float = DEFAULT_TOL,
    method: Optional[EvaluationMethod] = None
) -> ConvolutionValue:
    """Evaluates (G'*q)(x); see conv_G_q."""
    method = _resolve_method([q], method)
    if isinstance(q, ZeroPotential):
        return ConvolutionValue(0j, EvaluationMethod.CLOSED_FORM)
    if method is EvaluationMethod.CLOSED_FORM:
        left, right = _one_sided_parts(k.k, exp_pieces(q), x)
        return ConvolutionValue(-0.5 * (left - right), method)
    value, error = _quadrature_conv(k.k, q, x, derivative=True, tol=tol)
    return ConvolutionValue(value, method, error)


def bilinear(
    k: SpectralParameter,
    qa: Potential,
    qb: Potential,
    tol: float = DEFAULT_TOL,
    method: Optional[EvaluationMethod] = None
) -> ConvolutionValue:
    """
    Evaluates (qa, G*qb) = int int qa*(x) G(x - s) qb(s) ds dx.

    Catalog pairs use closed forms. A sampled partner is integrated
    against the closed-form convolution of the catalog one; two sampled
    potentials use the Gauss-Legendre panel pair. Forcing QUADRATURE on a
    catalog pair integrates the outer variable numerically.

    Raises:
        QuadratureError: If quadrature fails to converge.
    """
    if isinstance(qa, ZeroPotential) or isinstance(qb, ZeroPotential):
        return ConvolutionValue(0j, EvaluationMethod.CLOSED_FORM)
    method = _resolve_method([qa, qb], method)
    if method is EvaluationMethod.CLOSED_FORM:
        return ConvolutionValue(_closed_bilinear(k.k, qa, qb), method)

    if isinstance(qa, SampledPotential) and isinstance(qb, SampledPotential):
        value, error = _sampled_bilinear(k.k, qa, qb, tol)
    elif isinstance(qb, SampledPotential):
        # (qa, G*qb) = int qb(s) (G*qa^*)(s) ds since G is even
        value, error = _outer_quadrature(k.k, qb, qa.conjugate(), False, tol)
    else:
        value, error = _outer_quadrature(k.k, qa, qb, True, tol)
    return ConvolutionValue(value, EvaluationMethod.QUADRATURE, error)


def exp_moment(
    k: SpectralParameter,
    q: Potential,
    sign: int,
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL
) -> complex:
    """
    Returns int_lo^hi exp(sign * i k s) q(s) ds.

    Args:
        k: Spectral parameter.
        q: Potential.
        sign: +1 or -1.
        lo, hi: Integration limits; infinite limits must give decay.
        tol: Quadrature tolerance for sampled potentials.
    """
    if not hi > lo or isinstance(q, ZeroPotential):
        return 0j
    gamma_k = sign * 1j * k.k
    if q.is_catalog:
        total = 0j
        for piece in exp_pieces(q):
            a, b = max(lo, piece.lo), min(hi, piece.hi)
            if b > a:
                total += piece.alpha * segment_integral(piece.beta + gamma_k, a, b)
        return total
    s_lo, s_hi = _support(q)
    q_at = _q_at(q)
    value, _ = integrate_complex(
        lambda s: cmath.exp(gamma_k * s) * q_at(s),
        max(lo, s_lo),
        min(hi, s_hi),
        q.breakpoints,
        tol,
    )
    return value
