"""
pointspec - Finite-Difference Oracle Module.

Independent discretization of the delta-model operator

    H_a f = -f'' + f(0) q,   f'(0+) - f'(0-) = a f(0) + (q, f)

on [-L, L] with Dirichlet ends. The jump condition is folded into the
central second difference, and (q, f) uses the trapezoid rule with q
conjugated. Nothing here touches the Weyl-function code path.

Classes:
    FdOracle: Assembles the matrix and checks candidate eigenvalues.
"""

import logging
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import linalg

from src.errors import PreconditionError, ResolutionError
from src.schema import DeltaModel, FdGrid, ModelSpec, Verification

logger = logging.getLogger(__name__)


class FdOracle:
    """
    Dense finite-difference discretization of H_a.

    Example:
        >>> from src.schema import ZeroPotential
        >>> oracle = FdOracle()
        >>> model = DeltaModel(a=-2.0, q=ZeroPotential())
        >>> lam = oracle.nearest_eigenvalue(model, FdGrid(20.0, 2001), -1.0)
        >>> abs(lam + 1.0) < 2e-3
        True
    """

    # Largest resolvable |lambda| as a fraction of (pi/h)**2
    RESOLUTION_FRACTION = 0.25

    def assemble(self, model: ModelSpec, grid: FdGrid) -> np.ndarray:
        """
        Builds the N x N matrix of H_a.

        Args:
            model: Delta model.
            grid: Uniform grid with a node at the origin.

        Returns:
            Dense complex matrix.

        Raises:
            PreconditionError: For general models.
        """
        if not isinstance(model, DeltaModel):
            raise PreconditionError("the finite-difference oracle covers the delta model only")
        n, h, c = grid.node_count, grid.h, grid.center
        nodes = grid.nodes
        q_values = np.asarray(model.q(nodes), dtype=complex)

        matrix = np.zeros((n, n), dtype=complex)
        idx = np.arange(n)
        matrix[idx, idx] = 2.0 / h ** 2
        matrix[idx[1:], idx[:-1]] = -1.0 / h ** 2
        matrix[idx[:-1], idx[1:]] = -1.0 / h ** 2
        # f(0) q(x_i) couples every row to the central node
        matrix[:, c] += q_values

        weights = np.full(n, h)
        weights[0] = weights[-1] = 0.5 * h
        matrix[c, :] += np.conj(q_values) * weights / h
        matrix[c, c] += complex(model.a) / h
        logger.debug("assembled %dx%d oracle matrix with h=%.4g", n, n, h)
        return matrix

    def eigenvalues(self, model: ModelSpec, grid: FdGrid) -> np.ndarray:
        """Returns all eigenvalues of the matrix sorted by real part."""
        values = linalg.eigvals(self.assemble(model, grid))
        return values[np.lexsort((values.imag, values.real))]

    def eigenpairs(self, model: ModelSpec, grid: FdGrid) -> Tuple[np.ndarray, np.ndarray]:
        """Returns eigenvalues and right eigenvectors (columns)."""
        return linalg.eig(self.assemble(model, grid))

    def nearest_eigenvalue(
        self,
        model: ModelSpec,
        grid: FdGrid,
        target: complex,
        profile: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        window: float = 0.05
    ) -> complex:
        """
        Returns the discrete eigenvalue closest to target.

        With a profile, the eigenvalue within `window` of target whose
        eigenvector overlaps the profile most is returned instead; this
        separates a bound state from nearby box modes of the continuum.
        """
        values, vectors = self.eigenpairs(model, grid)
        if profile is None:
            return complex(values[np.argmin(np.abs(values - target))])
        shape = np.asarray(profile(grid.nodes), dtype=complex)
        shape = shape / np.linalg.norm(shape)
        best, best_overlap = None, -1.0
        for j in np.flatnonzero(np.abs(values - target) <= window):
            vector = vectors[:, j] / np.linalg.norm(vectors[:, j])
            overlap = abs(np.vdot(shape, vector))
            if overlap > best_overlap:
                best, best_overlap = complex(values[j]), overlap
        if best is None:
            return complex(values[np.argmin(np.abs(values - target))])
        return best

    def check_resolution(self, lam: complex, grid: FdGrid) -> None:
        """
        Raises:
            ResolutionError: If |lambda| exceeds a quarter of (pi/h)**2.
        """
        limit = self.RESOLUTION_FRACTION * (np.pi / grid.h) ** 2
        if abs(lam) > limit:
            raise ResolutionError(
                f"|lambda|={abs(lam):.4g} is not resolvable with h={grid.h:.4g}",
                {"lambda": [complex(lam).real, complex(lam).imag], "limit": limit},
            )

    def verify_eigenvalue(
        self,
        model: ModelSpec,
        lam: complex,
        grid: FdGrid,
        candidate: Optional[Callable[[float], complex]] = None
    ) -> Verification:
        """
        Checks a candidate eigenvalue against the discretized operator.

        Args:
            model: Delta model.
            lam: Candidate eigenvalue.
            grid: Finite-difference grid.
            candidate: Optional eigenfunction evaluated at the nodes.

        Returns:
            Verification with the smallest singular value of A - lambda I
            relative to max(1, |lambda|) and, for a candidate,
            ||(A - lambda I) v|| / ||v||.
            The max(1, |lambda|) scale replaces the median singular value
            of A - lambda I, which grows like 1/h**2.
            Rows whose three-point stencil straddles a jump of q away
            from the origin are left out of the residual; the candidate
            has a kink there that the stencil cannot resolve.

        Raises:
            ResolutionError: If lambda is too large for the grid.
        """
        self.check_resolution(lam, grid)
        shifted = self.assemble(model, grid) - complex(lam) * np.eye(grid.node_count)
        singular = linalg.svdvals(shifted)
        ratio = float(singular.min() / max(1.0, abs(lam)))

        residual = None
        if candidate is not None:
            vector = np.array([complex(candidate(float(x))) for x in grid.nodes], dtype=complex)
            rows = self._smooth_rows(model, grid)
            residual = float(
                np.linalg.norm((shifted @ vector)[rows]) / np.linalg.norm(vector)
            )
        logger.debug("verified lambda=%s: ratio=%.3g residual=%s", lam, ratio, residual)
        return Verification(sigma_min_ratio=ratio, residual=residual)

    @staticmethod
    def _smooth_rows(model: DeltaModel, grid: FdGrid) -> np.ndarray:
        nodes = grid.nodes
        keep = np.ones(grid.node_count, dtype=bool)
        if not model.q.is_catalog:
            return keep
        for point in model.q.breakpoints:
            if point == 0.0:
                continue
            keep &= ~(np.abs(nodes - point) < grid.h)
        return keep
