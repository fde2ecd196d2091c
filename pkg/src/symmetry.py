"""
pointspec - Symmetry Module.

Classifies a model from the algebraic conditions on its coupling matrix
and the parity and conjugation properties of its potentials.

Conditions checked:
    - Self-adjoint: a, d real and b = c^* (for any potentials).
    - PT: a, d real, b and c imaginary, PT q1 = q1, PT q2 = -q2.
    - P-self-adjoint: a, d real, b = -c^*, P q1 = q1, P q2 = -q2.

Here (P q)(x) = q(-x) and (PT q)(x) = q(-x)^*. The PT and P flags are
sufficient conditions: False means the condition fails, not that the
operator lacks the symmetry.

Catalog potentials are compared through their parameters. Sampled
potentials are compared node by node, which requires a grid that is
symmetric about the origin.
"""

import logging

import numpy as np

from src.errors import ParityUndecidableError
from src.model import as_general
from src.schema import (
    BoxEven,
    BoxOddSign,
    CouplingMatrix,
    DeltaModel,
    ExpEven,
    GeneralModel,
    ModelSpec,
    Parity,
    Potential,
    SampledPotential,
    SymmetryReport,
    ZeroPotential,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12


def _close(x: complex, y: complex, tol: float) -> bool:
    return abs(x - y) <= tol * (1.0 + max(abs(x), abs(y)))


def is_real(x: complex, tol: float = DEFAULT_TOL) -> bool:
    x = complex(x)
    return abs(x.imag) <= tol * (1.0 + abs(x))


def is_imaginary(x: complex, tol: float = DEFAULT_TOL) -> bool:
    x = complex(x)
    return abs(x.real) <= tol * (1.0 + abs(x))


def is_hermitian(coupling: CouplingMatrix, tol: float = DEFAULT_TOL) -> bool:
    """Returns True when a, d are real and b = c^*."""
    return (
        is_real(coupling.a, tol)
        and is_real(coupling.d, tol)
        and _close(coupling.b, complex(coupling.c).conjugate(), tol)
    )


def _is_zero(q: Potential) -> bool:
    if isinstance(q, ZeroPotential):
        return True
    if isinstance(q, (BoxEven, BoxOddSign)):
        return q.z == 0
    if isinstance(q, ExpEven):
        return q.c == 0
    return not np.any(q.values_array)


def _mirrored_values(q: SampledPotential, tol: float) -> np.ndarray:
    """Returns q(-x) on the node grid; the grid must be symmetric."""
    nodes = q.nodes_array
    if not np.allclose(nodes, -nodes[::-1], rtol=0.0, atol=tol * (1.0 + np.max(np.abs(nodes)))):
        raise ParityUndecidableError(
            "sampled potential grid is not symmetric about the origin",
            {"first_node": float(nodes[0]), "last_node": float(nodes[-1])},
        )
    return q.values_array[::-1]


def _sampled_matches(values: np.ndarray, image: np.ndarray, tol: float) -> bool:
    scale = 1.0 + float(np.max(np.abs(values)))
    return bool(np.all(np.abs(image - values) <= tol * scale))


def transforms_to(q: Potential, sign: int, conjugate: bool, tol: float = DEFAULT_TOL) -> bool:
    """
    Returns True when q(-x) (conjugated if requested) equals sign * q(x).

    Args:
        q: Potential.
        sign: +1 or -1.
        conjugate: True for the PT action, False for P.
        tol: Relative tolerance.

    Raises:
        ParityUndecidableError: For sampled potentials on asymmetric grids.
    """
    if _is_zero(q):
        return True
    if isinstance(q, BoxEven):
        z = complex(q.z)
        image = z.conjugate() if conjugate else z
        return _close(image, sign * z, tol)
    if isinstance(q, BoxOddSign):
        z = complex(q.z)
        image = -(z.conjugate() if conjugate else z)
        return _close(image, sign * z, tol)
    if isinstance(q, ExpEven):
        c = complex(q.c)
        image = c.conjugate() if conjugate else c
        return _close(image, sign * c, tol)

    image = _mirrored_values(q, tol)
    if conjugate:
        image = np.conj(image)
    return _sampled_matches(sign * q.values_array, image, tol)


def potential_parity(q: Potential, tol: float = DEFAULT_TOL) -> Parity:
    """
    Returns the parity class of a potential; zero counts as even.

    Raises:
        ParityUndecidableError: For sampled potentials on asymmetric grids.
    """
    if transforms_to(q, 1, conjugate=False, tol=tol):
        return Parity.EVEN
    if transforms_to(q, -1, conjugate=False, tol=tol):
        return Parity.ODD
    return Parity.NEITHER


def classify(model: ModelSpec, tol: float = DEFAULT_TOL) -> SymmetryReport:
    """
    Classifies a model.

    Args:
        model: Delta or general model.
        tol: Relative tolerance for realness and equality tests.

    Returns:
        SymmetryReport.

    Raises:
        ParityUndecidableError: For sampled potentials on asymmetric grids.
    """
    general = as_general(model)
    t = general.coupling
    real_diagonal = is_real(t.a, tol) and is_real(t.d, tol)

    pt_fixed = (
        transforms_to(general.q1, 1, conjugate=True, tol=tol),
        transforms_to(general.q2, -1, conjugate=True, tol=tol),
    )
    p_fixed = (
        transforms_to(general.q1, 1, conjugate=False, tol=tol),
        transforms_to(general.q2, -1, conjugate=False, tol=tol),
    )

    report = SymmetryReport(
        self_adjoint=is_hermitian(t, tol),
        pt_symmetric=(
            real_diagonal
            and is_imaginary(t.b, tol)
            and is_imaginary(t.c, tol)
            and all(pt_fixed)
        ),
        p_self_adjoint=(
            real_diagonal
            and _close(t.b, -complex(t.c).conjugate(), tol)
            and all(p_fixed)
        ),
        potential_parity=(
            potential_parity(general.q1, tol),
            potential_parity(general.q2, tol),
        ),
        pt_fixed=pt_fixed,
        p_fixed=p_fixed,
    )
    logger.debug("classified model: %s", report)
    return report


def conjugate_model(model: ModelSpec) -> ModelSpec:
    """
    Returns the model with every coefficient conjugated.

    For a delta model this is (a^*, q^*); its eigenvalues are the
    conjugates of the original ones.
    """
    if isinstance(model, DeltaModel):
        return DeltaModel(a=complex(model.a).conjugate(), q=model.q.conjugate())
    t = model.coupling
    return GeneralModel(
        coupling=CouplingMatrix(
            a=complex(t.a).conjugate(),
            b=complex(t.b).conjugate(),
            c=complex(t.c).conjugate(),
            d=complex(t.d).conjugate(),
        ),
        q1=model.q1.conjugate(),
        q2=model.q2.conjugate(),
    )

