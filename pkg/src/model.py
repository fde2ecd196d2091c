"""
pointspec - Model Module.

Branch map between the spectral parameter lambda and its square root k,
and the reduction of the delta model to the general matrix model.

The square root is taken with the cut of the logarithm on [0, inf) so
that Im k > 0 off the cut. Points on the open half-axis (0, inf) need an
explicit side: plus gives k > 0, minus gives k < 0.

Functions:
    k_from_lambda: lambda -> SpectralParameter.
    delta_to_general: DeltaModel -> GeneralModel.
    as_general: Any ModelSpec -> GeneralModel.
"""

import cmath
import math
from typing import Optional

from src.errors import AmbiguousBoundaryError, BranchPointError, PreconditionError
from src.schema import (
    BoundarySide,
    CouplingMatrix,
    DeltaModel,
    GeneralModel,
    ModelSpec,
    SpectralParameter,
    ZeroPotential,
    is_finite_complex,
)


def k_from_lambda(
    lam: complex,
    side: Optional[BoundarySide] = None
) -> SpectralParameter:
    """
    Maps lambda to its square root k in the closed upper half-plane.

    Args:
        lam: Non-zero spectral parameter.
        side: Required when lambda lies on (0, inf); ignored otherwise.

    Returns:
        SpectralParameter with Im k > 0, or k = +-sqrt(lambda) on the cut.

    Raises:
        BranchPointError: If lambda is zero.
        AmbiguousBoundaryError: If lambda > 0 and no side is given.
        PreconditionError: If lambda is not finite.

    Example:
        >>> k_from_lambda(-1).k
        1j
        >>> k_from_lambda(4, BoundarySide.MINUS).k
        (-2+0j)
    """
    lam = complex(lam)
    if not is_finite_complex(lam):
        raise PreconditionError(f"lambda must be finite, got {lam}")
    if lam == 0:
        raise BranchPointError("lambda = 0 is the branch point of k = sqrt(lambda)")

    if lam.imag == 0 and lam.real > 0:
        if side is None or side is BoundarySide.NONE:
            raise AmbiguousBoundaryError(
                f"lambda = {lam.real} lies on the cut; choose side plus or minus",
                {"lambda": [lam.real, 0.0]},
            )
        root = math.sqrt(lam.real)
        k = complex(root if side is BoundarySide.PLUS else -root, 0.0)
        return SpectralParameter(k=k, lam=lam, side=side)

    k = cmath.sqrt(lam)
    if k.imag < 0:
        k = -k
    return SpectralParameter(k=k, lam=lam, side=BoundarySide.NONE)


def delta_to_general(model: DeltaModel) -> GeneralModel:
    """
    Rewrites a delta model as T = [[a, 0], [0, 0]], q1 = q, q2 = 0.

    Args:
        model: The delta model.

    Returns:
        The equivalent general model.
    """
    coupling = CouplingMatrix(a=complex(model.a), b=0j, c=0j, d=0j)
    return GeneralModel(coupling=coupling, q1=model.q, q2=ZeroPotential())


def as_general(model: ModelSpec) -> GeneralModel:
    """Returns the general form of any model."""
    if isinstance(model, DeltaModel):
        return delta_to_general(model)
    return model
