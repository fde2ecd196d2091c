"""
pointspec - Data Schema Module.

This module defines the value types shared by every numerical module.
All types are immutable; complex quantities are plain Python complex
numbers and sampled data is stored as tuples.

Model Context:
    - Spectral parameter lambda = k**2 with k in the closed upper half-plane
    - A delta model is (a, q); a general model is (T, q1, q2)
    - Potentials are drawn from a small closed-form catalog or sampled

Classes:
    BoundarySide: Side of the cut [0, inf) a boundary value is taken from.
    PotentialKind: Tag of a potential descriptor.
    EvaluationMethod: How a convolution value was obtained.
    Parity: Parity class of a potential.
    EigenfunctionKind: Construction used for an eigenfunction.
    PhaseClass: Classification of a point of the a-plane.
    ZeroPotential, BoxEven, BoxOddSign, ExpEven, SampledPotential: Potentials.
    CouplingMatrix: The matrix T = [[a, b], [c, d]].
    DeltaModel, GeneralModel: Model specifications.
    SpectralParameter: The pair (k, lambda) with boundary side.
    BoundaryData: The boundary maps Gamma0 f and Gamma1 f.
    ConvolutionValue, WeylScalar, WeylMatrix, WaveCoefficients: Evaluations.
    Eigenvalue, SearchRegion, SingularityRecord, ExceptionalPoint,
    EmbeddedEigenvalue, LocalRoots, PhaseCell: Spectral results.
    SymmetryReport: Symmetry flags of a model.
    FdGrid, Verification: Finite-difference oracle types.
    NumericsConfig: Tolerances used across the package.
    Report: Command report envelope.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, ClassVar, Dict, List, Optional, Tuple, Union

import numpy as np

from src.errors import BranchPointError, PreconditionError


class BoundarySide(Enum):
    """
    Side of the positive half-axis a boundary value is taken from.

    Attributes:
        NONE: Interior point, Im k > 0.
        PLUS: Limit from the upper side, k real and positive.
        MINUS: Limit from the lower side, k real and negative.
    """

    NONE = "none"
    PLUS = "plus"
    MINUS = "minus"


class PotentialKind(Enum):
    """Tag of a potential descriptor."""

    ZERO = "zero"
    BOX_EVEN = "box_even"
    BOX_ODD_SIGN = "box_odd_sign"
    EXP_EVEN = "exp_even"
    SAMPLED = "sampled"


class EvaluationMethod(Enum):
    """How a convolution or bilinear value was produced."""

    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


class Parity(Enum):
    """Parity class of a potential under x -> -x."""

    EVEN = "even"
    ODD = "odd"
    NEITHER = "neither"


class EigenfunctionKind(Enum):
    """Construction used for an eigenfunction."""

    GENERAL_U = "general_u"
    GENERAL_V = "general_v"
    DELTA_U = "delta_u"
    EMBEDDED_BOX = "embedded_box"
    EXP_EVEN = "exp_even"


class PhaseClass(Enum):
    """
    Classification of a coupling constant a for a fixed potential.

    Attributes:
        NO_EIGENVALUE: No eigenvalue off the half-axis, no singularity.
        REAL_EIGENVALUE: At least one negative real eigenvalue.
        NONREAL_EIGENVALUE: Eigenvalues present, none of them real.
        SINGULARITY: a equals a non-real boundary value W~^+(k).
    """

    NO_EIGENVALUE = "no_eigenvalue"
    REAL_EIGENVALUE = "real_eigenvalue"
    NONREAL_EIGENVALUE = "nonreal_eigenvalue"
    SINGULARITY = "singularity"


def is_finite_complex(value: complex) -> bool:
    """Returns True when both parts of a complex number are finite."""
    value = complex(value)
    return math.isfinite(value.real) and math.isfinite(value.imag)


def _real_array(x: Any) -> np.ndarray:
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ZeroPotential:
    """The potential q = 0."""

    kind: ClassVar[PotentialKind] = PotentialKind.ZERO

    def __call__(self, x: Any) -> np.ndarray:
        return np.zeros_like(_real_array(x), dtype=complex)

    def conjugate(self) -> "ZeroPotential":
        return self

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    @property
    def support_radius(self) -> float:
        return 0.0

    @property
    def is_catalog(self) -> bool:
        return True


@dataclass(frozen=True)
class BoxEven:
    """
    Even box q(x) = z on [-rho, rho], zero outside.

    Attributes:
        z: Real amplitude.
        rho: Positive half-width.
    """

    z: float
    rho: float

    kind: ClassVar[PotentialKind] = PotentialKind.BOX_EVEN

    def __call__(self, x: Any) -> np.ndarray:
        x = _real_array(x)
        return np.where(np.abs(x) <= self.rho, complex(self.z), 0j)

    def conjugate(self) -> "BoxEven":
        return self

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (-self.rho, self.rho)

    @property
    def support_radius(self) -> float:
        return self.rho

    @property
    def is_catalog(self) -> bool:
        return True


@dataclass(frozen=True)
class BoxOddSign:
    """
    Odd sign-box q(x) = z * sign(x) on [-rho, rho], zero outside.

    Attributes:
        z: Complex amplitude.
        rho: Positive half-width.
    """

    z: complex
    rho: float

    kind: ClassVar[PotentialKind] = PotentialKind.BOX_ODD_SIGN

    def __call__(self, x: Any) -> np.ndarray:
        x = _real_array(x)
        return np.where(np.abs(x) <= self.rho, complex(self.z) * np.sign(x), 0j)

    def conjugate(self) -> "BoxOddSign":
        return BoxOddSign(z=complex(self.z).conjugate(), rho=self.rho)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (-self.rho, 0.0, self.rho)

    @property
    def support_radius(self) -> float:
        return self.rho

    @property
    def is_catalog(self) -> bool:
        return True


@dataclass(frozen=True)
class ExpEven:
    """
    Even exponential q(x) = c * exp(-mu |x|).

    Attributes:
        c: Complex amplitude.
        mu: Positive decay rate.
    """

    c: complex
    mu: float

    kind: ClassVar[PotentialKind] = PotentialKind.EXP_EVEN

    def __call__(self, x: Any) -> np.ndarray:
        x = _real_array(x)
        return complex(self.c) * np.exp(-self.mu * np.abs(x))

    def conjugate(self) -> "ExpEven":
        return ExpEven(c=complex(self.c).conjugate(), mu=self.mu)

    @property
    def norm_squared(self) -> float:
        """Returns ||q||^2 = |c|^2 / mu."""
        return abs(self.c) ** 2 / self.mu

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (0.0,)

    @property
    def support_radius(self) -> float:
        return math.inf

    @property
    def is_catalog(self) -> bool:
        return True


@dataclass(frozen=True)
class SampledPotential:
    """
    Piecewise-linear potential through (nodes[i], values[i]).

    The potential vanishes identically outside [nodes[0], nodes[-1]].

    Attributes:
        nodes: Strictly increasing real nodes (at least two).
        values: Complex values at the nodes.
    """

    nodes: Tuple[float, ...]
    values: Tuple[complex, ...]

    kind: ClassVar[PotentialKind] = PotentialKind.SAMPLED

    def __call__(self, x: Any) -> np.ndarray:
        x = _real_array(x)
        nodes = self.nodes_array
        values = self.values_array
        real = np.interp(x, nodes, values.real, left=0.0, right=0.0)
        imag = np.interp(x, nodes, values.imag, left=0.0, right=0.0)
        return real + 1j * imag

    def conjugate(self) -> "SampledPotential":
        return SampledPotential(
            nodes=self.nodes,
            values=tuple(complex(v).conjugate() for v in self.values),
        )

    @property
    def nodes_array(self) -> np.ndarray:
        return np.asarray(self.nodes, dtype=float)

    @property
    def values_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=complex)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(self.nodes)

    @property
    def support_radius(self) -> float:
        return max(abs(self.nodes[0]), abs(self.nodes[-1]))

    @property
    def is_catalog(self) -> bool:
        return False


Potential = Union[ZeroPotential, BoxEven, BoxOddSign, ExpEven, SampledPotential]


@dataclass(frozen=True)
class CouplingMatrix:
    """
    Coupling matrix T = [[a, b], [c, d]] of the point interaction.

    Attributes:
        a, b, c, d: Complex entries.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def as_array(self) -> np.ndarray:
        """Returns T as a 2x2 complex array."""
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def determinant(self) -> complex:
        return complex(self.a * self.d - self.b * self.c)

    @property
    def norm(self) -> float:
        """Returns the Frobenius norm of T."""
        return float(np.linalg.norm(self.as_array()))

    def dagger(self) -> "CouplingMatrix":
        """Returns the conjugate transpose of T."""
        return CouplingMatrix(
            a=complex(self.a).conjugate(),
            b=complex(self.c).conjugate(),
            c=complex(self.b).conjugate(),
            d=complex(self.d).conjugate(),
        )


@dataclass(frozen=True)
class DeltaModel:
    """
    The delta-case model -f'' + a f(0) delta + (f, q) delta + f(0) q.

    Attributes:
        a: Complex coupling constant.
        q: Potential descriptor.
    """

    a: complex
    q: Potential


@dataclass(frozen=True)
class GeneralModel:
    """
    The general model with coupling matrix T and potentials q1, q2.

    Attributes:
        coupling: The matrix T.
        q1: Potential paired with the delta term.
        q2: Potential paired with the delta-prime term.
    """

    coupling: CouplingMatrix
    q1: Potential
    q2: Potential


ModelSpec = Union[DeltaModel, GeneralModel]


@dataclass(frozen=True)
class SpectralParameter:
    """
    Spectral parameter lambda = k**2 with Im k >= 0 and k != 0.

    Attributes:
        k: Square root of lambda in the closed upper half-plane.
        lam: The spectral parameter lambda.
        side: Boundary side, NONE for interior points.
    """

    k: complex
    lam: complex
    side: BoundarySide

    @classmethod
    def from_k(cls, k: complex) -> "SpectralParameter":
        """
        Builds the parameter from k, deriving lambda and the side.

        Args:
            k: Non-zero complex number with Im k >= 0.

        Returns:
            SpectralParameter with lam = k**2.

        Raises:
            BranchPointError: If k is zero.
            PreconditionError: If Im k < 0 or k is not finite.
        """
        k = complex(k)
        if k == 0:
            raise BranchPointError("k = 0 is the branch point lambda = 0")
        if not is_finite_complex(k):
            raise PreconditionError(f"k must be finite, got {k}")
        if k.imag < 0:
            raise PreconditionError(f"k must satisfy Im k >= 0, got {k}")
        if k.imag > 0:
            side = BoundarySide.NONE
        elif k.real > 0:
            side = BoundarySide.PLUS
        else:
            side = BoundarySide.MINUS
        return cls(k=k, lam=k * k, side=side)

    @property
    def is_boundary(self) -> bool:
        return self.side is not BoundarySide.NONE


@dataclass(frozen=True)
class BoundaryData:
    """
    Boundary values of a function in the maximal domain.

    Attributes:
        gamma0: (f_r(0), -f'_r(0)).
        gamma1: (f'_s(0) - (q1, f), f_s(0) - (q2, f)).
    """

    gamma0: Tuple[complex, complex]
    gamma1: Tuple[complex, complex]


@dataclass(frozen=True)
class ConvolutionValue:
    """
    A convolution or bilinear value with its provenance.

    Attributes:
        value: The complex value.
        method: Closed form or quadrature.
        est_error: Estimated absolute error (0 for closed forms).
    """

    value: complex
    method: EvaluationMethod
    est_error: float = 0.0


@dataclass(frozen=True)
class WeylScalar:
    """Scalar Weyl function value W~ at a spectral parameter."""

    value: complex
    at: SpectralParameter


@dataclass(frozen=True, eq=False)
class WeylMatrix:
    """2x2 Weyl function value W at a spectral parameter."""

    entries: np.ndarray
    at: SpectralParameter


@dataclass(frozen=True)
class WaveCoefficients:
    """
    Plane-wave coefficients of u at a point x.

    u = a e^{ikx} + b e^{-ikx} for x > 0 and c e^{ikx} + d e^{-ikx}
    for x < 0.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    x: float


@dataclass(frozen=True)
class Eigenvalue:
    """
    A located eigenvalue.

    Attributes:
        lam: Eigenvalue lambda.
        k: Its square root in the upper half-plane.
        geometric_mult: Dimension of the eigenspace.
        algebraic_mult: Index of the characteristic zero.
        residual: |characteristic function| at the polished root.
    """

    lam: complex
    k: complex
    geometric_mult: int
    algebraic_mult: int
    residual: float


@dataclass(frozen=True)
class SearchRegion:
    """
    Rectangle in the k upper half-plane searched for zeros.

    Attributes:
        k_re_min, k_re_max: Real extent.
        k_im_min, k_im_max: Imaginary extent.
        margin: Distance kept from the real k-axis.
    """

    k_re_min: float
    k_re_max: float
    k_im_min: float
    k_im_max: float
    margin: float = 1e-6

    def __post_init__(self) -> None:
        if not self.margin > 0:
            raise PreconditionError("search margin must be positive")
        if self.k_im_min < self.margin:
            raise PreconditionError(
                f"k_im_min={self.k_im_min} is below the margin {self.margin}"
            )
        if not (self.k_re_max > self.k_re_min and self.k_im_max > self.k_im_min):
            raise PreconditionError("search region is empty")

    @classmethod
    def default(cls) -> "SearchRegion":
        """Returns k in [-10, 10] x [1e-6, 10]."""
        return cls(-10.0, 10.0, 1e-6, 10.0)

    def contains(self, k: complex, slack: float = 0.0) -> bool:
        return (
            self.k_re_min - slack <= k.real <= self.k_re_max + slack
            and self.k_im_min - slack <= k.imag <= self.k_im_max + slack
        )

    @property
    def width(self) -> float:
        return self.k_re_max - self.k_re_min

    @property
    def height(self) -> float:
        return self.k_im_max - self.k_im_min

    @property
    def center(self) -> complex:
        return complex(
            0.5 * (self.k_re_min + self.k_re_max),
            0.5 * (self.k_im_min + self.k_im_max),
        )

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def corners(self) -> Tuple[complex, complex, complex, complex]:
        """Returns the corners in counter-clockwise order from bottom left."""
        return (
            complex(self.k_re_min, self.k_im_min),
            complex(self.k_re_max, self.k_im_min),
            complex(self.k_re_max, self.k_im_max),
            complex(self.k_re_min, self.k_im_max),
        )

    def split(self, offset: float = 0.0) -> Tuple["SearchRegion", "SearchRegion"]:
        """
        Cuts the rectangle across its longer side.

        Args:
            offset: Shift of the cut from the midpoint, relative to the
                length of the side being cut.
        """
        if self.width >= self.height:
            cut = self.k_re_min + (0.5 + offset) * self.width
            return (
                SearchRegion(self.k_re_min, cut, self.k_im_min, self.k_im_max, self.margin),
                SearchRegion(cut, self.k_re_max, self.k_im_min, self.k_im_max, self.margin),
            )
        cut = self.k_im_min + (0.5 + offset) * self.height
        return (
            SearchRegion(self.k_re_min, self.k_re_max, self.k_im_min, cut, self.margin),
            SearchRegion(self.k_re_min, self.k_re_max, cut, self.k_im_max, self.margin),
        )

    def perturbed(self, fraction: float) -> "SearchRegion":
        """Grows the rectangle by `fraction` of its size; the bottom edge moves up."""
        dx = fraction * self.width
        dy = fraction * self.height
        return SearchRegion(
            self.k_re_min - dx,
            self.k_re_max + dx,
            self.k_im_min + dy,
            self.k_im_max + dy,
            self.margin,
        )


@dataclass(frozen=True)
class SingularityRecord:
    """
    Verdict of the spectral-singularity test at lambda = k**2 > 0.

    Attributes:
        lam: The positive spectral point.
        k: Its positive square root.
        a_plus: Boundary value W~^+ at lambda.
        is_singular: True when Im a_plus is non-zero beyond tolerance.
    """

    lam: float
    k: float
    a_plus: complex
    is_singular: bool


@dataclass(frozen=True)
class ExceptionalPoint:
    """An exceptional point lambda0 together with the coupling a."""

    lam0: complex
    k0: complex
    a: complex


@dataclass(frozen=True)
class EmbeddedEigenvalue:
    """A positive eigenvalue lambda = k**2 with its real coupling a."""

    lam: float
    k: float
    a: float


@dataclass(frozen=True)
class LocalRoots:
    """
    Roots of the local polynomial for q1 = q2 = 0.

    Attributes:
        eigenvalues: lambda = k**2 for the roots with Im k > 0.
        whole_domain: True when the polynomial vanishes identically.
    """

    eigenvalues: List[complex] = field(default_factory=list)
    whole_domain: bool = False


@dataclass(frozen=True)
class PhaseCell:
    """One grid point of the a-plane phase diagram."""

    a: complex
    eigenvalue_count: int
    has_real_eigenvalue: bool
    singular: bool
    label: PhaseClass


@dataclass(frozen=True)
class SymmetryReport:
    """
    Symmetry flags of a model.

    PT and P flags are sufficient-condition flags: True means the
    condition holds, False only that it does not.

    Attributes:
        self_adjoint: T is Hermitian.
        pt_symmetric: PT condition holds.
        p_self_adjoint: P-self-adjointness condition holds.
        potential_parity: Parity of q1 and q2.
        pt_fixed: PT q1 == q1 and PT q2 == -q2, as the PT condition requires.
        p_fixed: Parity required by the P condition holds for q1, q2.
    """

    self_adjoint: bool
    pt_symmetric: bool
    p_self_adjoint: bool
    potential_parity: Tuple[Parity, Parity]
    pt_fixed: Tuple[bool, bool]
    p_fixed: Tuple[bool, bool]


@dataclass(frozen=True)
class FdGrid:
    """
    Uniform grid on [-L, L] with a node at the origin.

    Attributes:
        half_length: L.
        node_count: Odd number of nodes N >= 201.
    """

    half_length: float
    node_count: int

    MIN_NODES: ClassVar[int] = 201
    MAX_NODES: ClassVar[int] = 5001
    MAX_STEP: ClassVar[float] = 0.1

    def __post_init__(self) -> None:
        if not self.half_length > 0:
            raise PreconditionError("grid half-length must be positive")
        if self.node_count % 2 == 0 or self.node_count < self.MIN_NODES:
            raise PreconditionError(
                f"node count must be odd and >= {self.MIN_NODES}, "
                f"got {self.node_count}"
            )
        if self.node_count > self.MAX_NODES:
            raise PreconditionError(
                f"dense assembly is capped at {self.MAX_NODES} nodes"
            )
        if not self.h < self.MAX_STEP:
            raise PreconditionError(
                f"grid step h={self.h:.4g} must be below {self.MAX_STEP}"
            )

    @property
    def h(self) -> float:
        return 2.0 * self.half_length / (self.node_count - 1)

    @property
    def center(self) -> int:
        return self.node_count // 2

    @property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.node_count) - self.center) * self.h


@dataclass(frozen=True)
class Verification:
    """Outcome of an oracle check."""

    sigma_min_ratio: float
    residual: Optional[float] = None


@dataclass(frozen=True)
class NumericsConfig:
    """
    Tolerances and limits used by the numerical engines.

    Attributes:
        tol: Absolute tolerance for quadrature and root residuals.
        margin: Distance of the search region from the real k-axis.
        newton_step_tol: Newton convergence threshold on |dk|.
        newton_max_iter: Newton iteration cap.
        merge_distance: Eigenvalues closer than this are merged.
        rank_threshold: Relative singular-value threshold for rank.
        degeneracy_threshold: Relative level below which char is ~0.
        degeneracy_samples: Number of quasi-random sample points.
        contour_retries: Retries when a zero lies on a contour.
        contour_perturbation: Relative shift applied on retry.
        phase_step: Largest accepted change of log f along an edge step.
        edge_spacing: Largest initial distance between edge samples.
        max_phase_depth: Bisection depth cap for phase tracking.
        index_nodes: Initial node count of the index integral.
        index_max_nodes: Node cap of the index integral.
        index_agreement: Agreement required between doublings.
        index_integer_slack: Allowed distance from an integer.
        derivative_radius: Cauchy stencil radius relative to |k|.
        quad_limit: Subinterval cap handed to adaptive quadrature.
    """

    tol: float = 1e-10
    margin: float = 1e-6
    newton_step_tol: float = 1e-12
    newton_max_iter: int = 50
    merge_distance: float = 1e-8
    rank_threshold: float = 1e-8
    degeneracy_threshold: float = 1e-12
    degeneracy_samples: int = 25
    contour_retries: int = 5
    contour_perturbation: float = 1e-3
    phase_step: float = math.pi / 2
    edge_spacing: float = 0.25
    max_phase_depth: int = 50
    index_nodes: int = 256
    index_max_nodes: int = 4096
    index_agreement: float = 0.01
    index_integer_slack: float = 0.05
    derivative_radius: float = 0.01
    quad_limit: int = 200

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class Report:
    """
    Envelope written by every CLI command.

    Attributes:
        command: Command name and arguments echo.
        model: Echo of the model document, if any.
        results: Command payload.
        tolerances: Tolerances used.
        wall_time: Seconds spent, or None when timing is disabled.
        version: pointspec version identifier.
    """

    command: Dict[str, Any]
    model: Optional[Dict[str, Any]]
    results: Any
    tolerances: Dict[str, Any]
    wall_time: Optional[float]
    version: str
