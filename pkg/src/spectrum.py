"""
pointspec - Spectrum Module.

This module locates the discrete spectrum of the models and classifies
points of the continuous spectrum.

Zeros are searched in the k upper half-plane, where lambda = k**2 and the
characteristic functions are holomorphic. A rectangle is tested with the
argument principle: the phase of the function is tracked along its
edges, halving a step until it and both of its halves change log f by
less than pi/2. Regions holding zeros are cut in half across their
longer side until every piece holds a single zero, which Newton's method
then polishes.

Classes:
    ArgumentPrincipleSolver: Zero finder for holomorphic functions.
    SpectrumAnalyser: Spectral operations on models and potentials.
"""

import cmath
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, linalg, optimize
from scipy.stats import qmc

from src.errors import (
    ContourThroughZeroError,
    DegenerateFamilyError,
    NonIntegerIndexError,
    NonRealCouplingError,
    PreconditionError,
)
from src.model import as_general, k_from_lambda
from src.schema import (
    BoxEven,
    BoxOddSign,
    CouplingMatrix,
    DeltaModel,
    EmbeddedEigenvalue,
    Eigenvalue,
    ExceptionalPoint,
    ExpEven,
    GeneralModel,
    LocalRoots,
    ModelSpec,
    NumericsConfig,
    Parity,
    PhaseCell,
    PhaseClass,
    Potential,
    SampledPotential,
    SearchRegion,
    SingularityRecord,
    SpectralParameter,
    ZeroPotential,
)
from src.symmetry import potential_parity
from src.weyl import (
    closed_form_weyl,
    weyl_boundary,
    weyl_derivative_k,
    weyl_matrix,
    weyl_scalar,
)

logger = logging.getLogger(__name__)

HolomorphicFunction = Callable[[complex], complex]


class _ZeroOnContour(Exception):
    """A contour passes through (or numerically onto) a zero."""


class ArgumentPrincipleSolver:
    """
    Finds every zero of a holomorphic function inside a rectangle.

    Function values are cached by point, so edges shared by neighbouring
    rectangles are evaluated once.

    Attributes:
        config: Numerical thresholds.

    Example:
        >>> solver = ArgumentPrincipleSolver(lambda z: z * z + 1.0)
        >>> solver.solve(SearchRegion(-2.0, 2.0, 0.5, 2.0))
        [(1j, 1)]
    """

    # Least number of initial samples per edge before adaptive halving
    EDGE_SAMPLES = 16

    # Rectangles smaller than this (relative) holding several zeros are
    # treated as one zero of higher multiplicity
    CLUSTER_SIZE = 1e-6

    def __init__(
        self,
        func: HolomorphicFunction,
        config: Optional[NumericsConfig] = None,
        derivative: Optional[HolomorphicFunction] = None
    ):
        """
        Args:
            func: Function holomorphic on the search region.
            config: Thresholds; defaults to NumericsConfig().
            derivative: Analytic derivative, if known.
        """
        self._func = func
        self._derivative = derivative
        self.config = config or NumericsConfig()
        self._cache: Dict[complex, complex] = {}

    def value(self, z: complex) -> complex:
        """Returns func(z), cached."""
        z = complex(z)
        cached = self._cache.get(z)
        if cached is None:
            cached = complex(self._func(z))
            self._cache[z] = cached
        return cached

    def derivative(self, z: complex) -> complex:
        """Returns func'(z), by central differences along the real axis if needed."""
        if self._derivative is not None:
            return complex(self._derivative(z))
        h = 1e-6 * max(1.0, abs(z))
        return (self._func(z + h) - self._func(z - h)) / (2.0 * h)

    def _phase_value(self, z: complex) -> complex:
        value = self.value(z)
        if value == 0 or not cmath.isfinite(value):
            raise _ZeroOnContour(z)
        return value

    def _log_step(self, a: complex, b: complex) -> complex:
        """Principal log of func(b)/func(a): magnitude and phase change together."""
        return cmath.log(self._phase_value(b) / self._phase_value(a))

    def edge_phase(self, start: complex, end: complex) -> float:
        """
        Returns the change of arg func along the segment start -> end.

        Samples start edge_spacing apart (at least EDGE_SAMPLES per edge).
        A step is accepted only when it and both of its halves change
        log func by less than phase_step, so a swing of nearly 2 pi
        between two samples is refined instead of wrapping to a small
        step. Near a zero or pole |func| varies as fast as its phase,
        which the magnitude part of the test picks up.
        """
        limit = self.config.phase_step
        n = max(self.EDGE_SAMPLES, math.ceil(abs(end - start) / self.config.edge_spacing))
        points = [start + (end - start) * j / n for j in range(n + 1)]
        stack = [(a, b, 0) for a, b in zip(points, points[1:])]
        total = 0.0
        while stack:
            a, b, depth = stack.pop()
            mid = 0.5 * (a + b)
            left = self._log_step(a, mid)
            right = self._log_step(mid, b)
            if max(abs(left), abs(right), abs(self._log_step(a, b))) < limit:
                total += left.imag + right.imag
                continue
            if depth >= self.config.max_phase_depth:
                raise _ZeroOnContour(mid)
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
        return total

    def _winding(self, rect: SearchRegion) -> int:
        corners = rect.corners()
        total = sum(
            self.edge_phase(corners[i], corners[(i + 1) % 4]) for i in range(4)
        )
        turns = total / (2.0 * math.pi)
        count = int(round(turns))
        if abs(turns - count) > 0.25 or count < 0:
            raise _ZeroOnContour(rect.center)
        return count

    def count(self, rect: SearchRegion) -> int:
        """
        Returns the number of zeros inside a rectangle.

        Raises:
            ContourThroughZeroError: If a zero lies on the boundary.
        """
        try:
            return self._winding(rect)
        except _ZeroOnContour as exc:
            raise ContourThroughZeroError(
                "a zero lies on the search contour",
                {"near": [exc.args[0].real, exc.args[0].imag]},
            )

    def _outer_count(self, region: SearchRegion) -> Tuple[SearchRegion, int]:
        for attempt in range(self.config.contour_retries + 1):
            rect = region if attempt == 0 else region.perturbed(
                attempt * self.config.contour_perturbation
            )
            try:
                return rect, self._winding(rect)
            except _ZeroOnContour:
                logger.debug("outer contour hit a zero, retry %d", attempt + 1)
        raise ContourThroughZeroError(
            "a zero lies on the region boundary after all retries",
            {"retries": self.config.contour_retries},
        )

    def _split(self, rect: SearchRegion, count: int) -> List[Tuple[SearchRegion, int]]:
        step = self.config.contour_perturbation
        offsets = [0.0]
        for i in range(1, self.config.contour_retries + 1):
            offsets.extend([i * step, -i * step])
        for offset in offsets:
            children = rect.split(offset)
            try:
                counts = [self._winding(child) for child in children]
            except _ZeroOnContour:
                logger.debug("cut at offset %.3g hit a zero", offset)
                continue
            if sum(counts) == count:
                return list(zip(children, counts))
            logger.debug("children counts %s disagree with %d", counts, count)
        raise ContourThroughZeroError(
            "could not cut the rectangle away from a zero",
            {"center": [rect.center.real, rect.center.imag], "count": count},
        )

    def _newton(self, start: complex, rect: SearchRegion, multiplicity: int = 1) -> Optional[complex]:
        z = start
        slack = 1e-9 * max(1.0, rect.diameter)
        for _ in range(self.config.newton_max_iter):
            slope = self.derivative(z)
            if slope == 0 or not cmath.isfinite(slope):
                return None
            step = multiplicity * self.value(z) / slope
            z = z - step
            if not rect.contains(z, slack):
                return None
            if abs(step) < self.config.newton_step_tol * max(1.0, abs(z)):
                return z
        return None

    def _polish_cluster(self, rect: SearchRegion, multiplicity: int) -> complex:
        if multiplicity == 2 and self._derivative is not None:
            # the double zero of func is a simple zero of its derivative
            inner = ArgumentPrincipleSolver(self._derivative, self.config)
            root = inner._newton(rect.center, rect)
            if root is not None:
                return root
        root = self._newton(rect.center, rect, multiplicity)
        return rect.center if root is None else root

    def solve(self, region: SearchRegion) -> List[Tuple[complex, int]]:
        """
        Returns (zero, multiplicity) pairs inside the region.

        Raises:
            ContourThroughZeroError: If a contour cannot be moved off a zero.
        """
        outer, total = self._outer_count(region)
        logger.debug("region holds %d zeros", total)
        found: List[Tuple[complex, int]] = []
        queue = deque([(outer, total)])
        while queue:
            rect, count = queue.popleft()
            if count == 0:
                continue
            if count == 1:
                root = self._newton(rect.center, rect)
                if root is not None:
                    found.append((root, 1))
                    continue
            if rect.diameter < self.CLUSTER_SIZE * max(1.0, abs(rect.center)):
                found.append((self._polish_cluster(rect, count), count))
                continue
            queue.extend(self._split(rect, count))
        return found


class SpectrumAnalyser:
    """
    Spectral analysis of delta and general models.

    Attributes:
        config: Numerical thresholds shared by every operation.
        jobs: Worker cap for grid operations.

    Example:
        >>> analyser = SpectrumAnalyser()
        >>> model = DeltaModel(a=-2.0, q=ZeroPotential())
        >>> [round(e.lam.real, 10) for e in analyser.find_eigenvalues(model)]
        [-1.0]
    """

    # Sign-change grid for embedded eigenvalues
    EMBEDDED_STEPS = 2000

    # Real-k samples of the boundary curve for the phase diagram
    CURVE_SAMPLES = 2000

    def __init__(self, config: Optional[NumericsConfig] = None, jobs: int = 1):
        self.config = config or NumericsConfig()
        self.jobs = max(1, int(jobs))

    # ------------------------------------------------------------------
    # Characteristic functions
    # ------------------------------------------------------------------

    def _weyl_scalar(self, k: complex, q: Potential) -> complex:
        closed = closed_form_weyl(k, q)
        if closed is not None:
            return closed[0]
        return weyl_scalar(SpectralParameter.from_k(k), q, self.config.tol).value

    def _weyl_scalar_dk(self, k: complex, q: Potential) -> Optional[complex]:
        closed = closed_form_weyl(k, q)
        return None if closed is None else closed[1]

    def char_value(self, model: ModelSpec, k: SpectralParameter) -> complex:
        """
        Evaluates the characteristic function.

        Returns:
            a - W~ for a delta model, det(T - W) for a general model.

        Raises:
            PreconditionError: If Im k <= 0.
            QuadratureError: From the Weyl evaluation.
        """
        if not k.k.imag > 0:
            raise PreconditionError(f"characteristic function needs Im k > 0, got {k.k}")
        if isinstance(model, DeltaModel):
            return complex(model.a) - self._weyl_scalar(k.k, model.q)
        return self.matrix_char_zero(model, k)

    def matrix_char_zero(self, model: ModelSpec, k: SpectralParameter) -> complex:
        """
        Returns det(T - W) of the general form of the model.

        For a delta model this equals -(2i/k)(a - W~).
        """
        general = as_general(model)
        return complex(np.linalg.det(self._t_minus_w(general, k)))

    def _t_minus_w(self, model: GeneralModel, k: SpectralParameter) -> np.ndarray:
        w = weyl_matrix(k, model.q1, model.q2, self.config.tol)
        return model.coupling.as_array() - w.entries

    @staticmethod
    def local_char_roots(coupling: CouplingMatrix) -> LocalRoots:
        """
        Solves 2d k**2 + ik(det T - 4) + 2a = 0 for q1 = q2 = 0.

        Returns:
            LocalRoots with lambda = k**2 for the roots with Im k > 0, or
            whole_domain set when every coefficient vanishes.

        Example:
            >>> SpectrumAnalyser.local_char_roots(CouplingMatrix(-2, 0, 0, 0)).eigenvalues
            [(-1+0j)]
        """
        coefficients = np.array(
            [2.0 * coupling.d, 1j * (coupling.determinant - 4.0), 2.0 * coupling.a],
            dtype=complex,
        )
        scale = 1e-14 * (1.0 + coupling.norm)
        if np.all(np.abs(coefficients) <= scale):
            return LocalRoots(eigenvalues=[], whole_domain=True)
        while abs(coefficients[0]) <= scale:
            coefficients = coefficients[1:]
        roots = np.roots(coefficients) if coefficients.size > 1 else []
        eigenvalues = sorted(
            (complex(k * k) for k in roots if k.imag > 1e-12 * max(1.0, abs(k))),
            key=lambda lam: (lam.real, lam.imag),
        )
        return LocalRoots(eigenvalues=eigenvalues)

    # ------------------------------------------------------------------
    # Eigenvalue search
    # ------------------------------------------------------------------

    def _char_function(self, model: ModelSpec) -> Tuple[HolomorphicFunction, Optional[HolomorphicFunction], float]:
        """Returns (char(k), d char/dk or None, degeneracy scale)."""
        if isinstance(model, DeltaModel):
            a = complex(model.a)
            q = model.q

            def char(k: complex) -> complex:
                return a - self._weyl_scalar(k, q)

            def slope(k: complex) -> complex:
                return -self._weyl_scalar_dk(k, q)

            analytic = closed_form_weyl(1j, q) is not None
            return char, slope if analytic else None, 1.0 + abs(a)

        def char(k: complex) -> complex:
            return self.matrix_char_zero(model, SpectralParameter.from_k(k))

        return char, None, 1.0 + model.coupling.norm

    def _check_degenerate(self, func: HolomorphicFunction, region: SearchRegion, scale: float) -> None:
        sampler = qmc.Halton(d=2, scramble=False)
        samples = sampler.random(self.config.degeneracy_samples)
        level = self.config.degeneracy_threshold * scale
        for u, v in samples:
            k = complex(
                region.k_re_min + u * region.width,
                region.k_im_min + v * region.height,
            )
            if abs(func(k)) >= level:
                return
        raise DegenerateFamilyError(
            "characteristic function vanishes identically on the search region",
            {"samples": self.config.degeneracy_samples, "level": level},
        )

    def _merge(self, roots: Sequence[Tuple[complex, int]]) -> List[Tuple[complex, int]]:
        merged: List[Tuple[complex, int]] = []
        for k, count in sorted(roots, key=lambda item: ((item[0] ** 2).real, (item[0] ** 2).imag)):
            if merged and abs(merged[-1][0] ** 2 - k ** 2) < self.config.merge_distance:
                merged[-1] = (merged[-1][0], merged[-1][1] + count)
            else:
                merged.append((k, count))
        return merged

    def geometric_multiplicity(self, model: ModelSpec, k: SpectralParameter) -> int:
        """Returns 2 - rank(T - W), singular values measured against |T| + |W|."""
        general = as_general(model)
        t = general.coupling.as_array()
        w = weyl_matrix(k, general.q1, general.q2, self.config.tol).entries
        sigma = linalg.svdvals(t - w)
        scale = max(1.0, float(np.linalg.norm(t) + np.linalg.norm(w)))
        rank = int(np.sum(sigma > self.config.rank_threshold * scale))
        return max(1, 2 - rank)

    def _index_radius(self, lam: complex, others: Sequence[complex]) -> float:
        cut_distance = abs(lam.imag) if lam.real >= 0 else abs(lam)
        distances = [abs(lam - other) for other in others if other != lam]
        return 0.5 * min([cut_distance, 1.0] + distances)

    def find_eigenvalues(self, model: ModelSpec, region: Optional[SearchRegion] = None) -> List[Eigenvalue]:
        """
        Finds every eigenvalue with k inside the region.

        Args:
            model: Delta or general model.
            region: k-rectangle; defaults to [-10, 10] x [1e-6, 10].

        Returns:
            Eigenvalues sorted by (Re lambda, Im lambda).

        Raises:
            DegenerateFamilyError: If the characteristic function vanishes
                identically.
            ContourThroughZeroError: If a contour cannot avoid a zero.
            NonIntegerIndexError: If a multiplicity integral fails to settle.
        """
        region = region or SearchRegion.default()
        char, derivative, scale = self._char_function(model)
        self._check_degenerate(char, region, scale)

        solver = ArgumentPrincipleSolver(char, self.config, derivative)
        roots = [
            (k, count) for k, count in self._merge(solver.solve(region))
            if region.contains(k)
        ]
        lambdas = [k * k for k, _ in roots]

        eigenvalues = []
        for (k, count), lam in zip(roots, lambdas):
            at = SpectralParameter.from_k(k)
            radius = self._index_radius(lam, lambdas)
            algebraic = self.algebraic_multiplicity(model, lam, radius)
            if algebraic != count:
                logger.debug("index %d differs from winding count %d at %s", algebraic, count, lam)
            eigenvalues.append(Eigenvalue(
                lam=complex(lam),
                k=complex(k),
                geometric_mult=self.geometric_multiplicity(model, at),
                algebraic_mult=algebraic,
                residual=abs(char(k)),
            ))
        logger.debug("found %d eigenvalues", len(eigenvalues))
        return eigenvalues

    # ------------------------------------------------------------------
    # Multiplicity index
    # ------------------------------------------------------------------

    def _index_sum(self, model: ModelSpec, lam0: complex, radius: float, nodes: int) -> complex:
        theta = 2.0 * np.pi * np.arange(nodes) / nodes
        offsets = radius * np.exp(1j * theta)
        points = [k_from_lambda(lam0 + w) for w in offsets]

        if isinstance(model, DeltaModel) and closed_form_weyl(1j, model.q) is not None:
            terms = []
            for at, w in zip(points, offsets):
                value, dk = closed_form_weyl(at.k, model.q)
                terms.append((dk / (2.0 * at.k)) * w / (value - complex(model.a)))
            return complex(np.mean(terms))

        general = as_general(model)
        t = general.coupling.as_array()
        w_values = np.array([
            weyl_matrix(at, general.q1, general.q2, self.config.tol).entries
            for at in points
        ])
        # d/dxi on the circle by spectral differentiation: W' * (xi - lam0)
        freq = np.fft.fftfreq(nodes, d=1.0 / nodes)
        scaled_derivative = np.fft.ifft(freq[:, None, None] * np.fft.fft(w_values, axis=0), axis=0)
        terms = [
            np.trace(np.linalg.solve((w - t).T, d.T).T)
            for w, d in zip(w_values, scaled_derivative)
        ]
        return complex(np.mean(terms))

    def algebraic_multiplicity(self, model: ModelSpec, lam0: complex, radius: float) -> int:
        """
        Returns the index (1/2 pi i) tr of the contour integral of
        W'(xi) (W(xi) - T)^{-1} around a circle centred on lam0.

        The trapezoid rule starts at index_nodes nodes and doubles until
        two successive values agree.

        Raises:
            PreconditionError: If the circle reaches the cut [0, inf).
            NonIntegerIndexError: If the value does not settle near an
                integer, or settles below 1 so that lam0 is no eigenvalue.
        """
        lam0 = complex(lam0)
        cut_distance = abs(lam0.imag) if lam0.real >= 0 else abs(lam0)
        if not 0 < radius < cut_distance:
            raise PreconditionError(
                f"index circle of radius {radius} must avoid the cut (distance {cut_distance})"
            )
        nodes = self.config.index_nodes
        previous = self._index_sum(model, lam0, radius, nodes)
        while True:
            nodes *= 2
            current = self._index_sum(model, lam0, radius, nodes)
            if abs(current - previous) < self.config.index_agreement:
                break
            if nodes >= self.config.index_max_nodes:
                raise NonIntegerIndexError(
                    "index integral did not converge",
                    {"value": [current.real, current.imag], "nodes": nodes},
                )
            previous = current
        index = int(round(current.real))
        if abs(current - index) > self.config.index_integer_slack:
            raise NonIntegerIndexError(
                f"index {current:.4f} is not close to an integer",
                {"value": [current.real, current.imag], "nodes": nodes},
            )
        if index < 1:
            raise NonIntegerIndexError(
                f"index {index} at {lam0}: no eigenvalue inside the circle",
                {"value": [current.real, current.imag], "radius": radius},
            )
        logger.debug("index at %s is %d after %d nodes", lam0, index, nodes)
        return index

    # ------------------------------------------------------------------
    # Exceptional points and the continuous spectrum
    # ------------------------------------------------------------------

    def find_exceptional_points(
        self,
        q: Potential,
        region: Optional[SearchRegion] = None
    ) -> List[ExceptionalPoint]:
        """
        Returns the non-real zeros lambda0 of dW~/dlambda with a = W~(lambda0).

        The zeros are located as zeros of dW~/dk, which has the same zeros
        off k = 0.

        Raises:
            DegenerateFamilyError: If dW~/dk vanishes identically.
        """
        region = region or SearchRegion.default()
        closed = closed_form_weyl(1j, q) is not None

        def slope(k: complex) -> complex:
            if closed:
                return self._weyl_scalar_dk(k, q)
            return weyl_derivative_k(
                SpectralParameter.from_k(k), q, self.config.tol, self.config.derivative_radius
            )

        self._check_degenerate(slope, region, 1.0)
        solver = ArgumentPrincipleSolver(slope, self.config)
        points = []
        for k0, _ in self._merge(solver.solve(region)):
            if not region.contains(k0):
                continue
            lam0 = k0 * k0
            if abs(lam0.imag) <= self.config.tol * (1.0 + abs(lam0)):
                continue
            points.append(ExceptionalPoint(lam0=complex(lam0), k0=complex(k0), a=self._weyl_scalar(k0, q)))
        return points

    def singularity_scan(self, q: Potential, k_grid: Sequence[float]) -> List[SingularityRecord]:
        """
        Tests lambda = k**2 > 0 for the sufficient singularity condition.

        a_plus = W~^+(k) is the only coupling for which lambda can be a
        singularity; it is one when a_plus is non-real.

        Raises:
            PreconditionError: If the grid holds a non-positive k.
        """
        records = []
        for k in k_grid:
            k = float(k)
            if not k > 0:
                raise PreconditionError(f"singularity scan needs k > 0, got {k}")
            a_plus = weyl_boundary(k, q, tol=self.config.tol).value
            records.append(SingularityRecord(
                lam=k * k,
                k=k,
                a_plus=a_plus,
                is_singular=abs(a_plus.imag) > self.config.tol * (1.0 + abs(a_plus)),
            ))
        return records

    def blowup_ratio(self, model: DeltaModel, lam: complex) -> float:
        """
        Returns |Im W~| / |a - W~| at a non-real lambda.

        The ratio stays bounded near regular points of [0, inf) and grows
        like 1/|Im lambda| towards a spectral singularity.

        Raises:
            PreconditionError: If lambda is real.
        """
        lam = complex(lam)
        if lam.imag == 0:
            raise PreconditionError("blowup ratio needs Im lambda != 0")
        value = self._weyl_scalar(k_from_lambda(lam).k, model.q)
        gap = abs(complex(model.a) - value)
        if gap < 1e-300:
            return math.inf
        return abs(value.imag) / gap

    def beta(self, q: Potential, k: float) -> float:
        """
        Returns beta_k = 1 - (1/k) int_0^rho sin(ks) q(s) ds for a real even q.
        """
        if isinstance(q, ZeroPotential):
            return 1.0
        if isinstance(q, BoxEven):
            z = complex(q.z).real
            return 1.0 - z * (1.0 - math.cos(k * q.rho)) / (k * k)
        nodes = q.nodes_array
        values = q.values_array.real
        breaks = [x for x in nodes if 0.0 < x < nodes[-1]]
        integral, _ = integrate.quad(
            lambda s: math.sin(k * s) * float(np.interp(s, nodes, values, left=0.0, right=0.0)),
            0.0,
            float(nodes[-1]),
            points=breaks[:self.config.quad_limit // 2] or None,
            limit=self.config.quad_limit,
            epsabs=self.config.tol,
        )
        return 1.0 - integral / k

    def embedded_eigenvalues(
        self,
        q: Potential,
        k_interval: Tuple[float, float] = (0.0, 10.0)
    ) -> List[EmbeddedEigenvalue]:
        """
        Finds positive eigenvalues lambda = k**2 of a real even potential
        with compact support, as roots of beta_k, each with its coupling
        a = W~^+(k). The exponential potential has its closed-form
        eigenvalue instead.

        Args:
            q: Real even BoxEven, sampled or exponential potential.
            k_interval: (k_min, k_max) with 0 <= k_min < k_max; k_min is
                excluded.

        Raises:
            PreconditionError: For odd, non-real or unbounded potentials.
            NonRealCouplingError: If W~^+ is not real at a root.
        """
        k_min, k_max = (float(v) for v in k_interval)
        if not 0 <= k_min < k_max:
            raise PreconditionError(f"invalid k interval {k_interval}")
        if isinstance(q, ExpEven):
            point = self.exp_positive_eigenvalue(q)
            return [point] if point is not None and k_min < point.k <= k_max else []
        self._require_embedded_input(q)

        grid = np.linspace(k_min, k_max, self.EMBEDDED_STEPS + 1)
        if k_min == 0:
            grid = grid[1:]
        values = [self.beta(q, k) for k in grid]

        roots: List[float] = []
        for (k0, b0), (k1, b1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
            if b0 == 0:
                roots.append(float(k0))
            elif b0 * b1 < 0:
                roots.append(optimize.brentq(lambda k: self.beta(q, k), k0, k1, xtol=1e-15, rtol=4e-16))
        if values and values[-1] == 0:
            roots.append(float(grid[-1]))

        found = []
        for k in roots:
            a = weyl_boundary(k, q, tol=self.config.tol).value
            if abs(a.imag) > self.config.tol * (1.0 + abs(a)):
                raise NonRealCouplingError(
                    f"boundary Weyl value {a} at k={k} is not real",
                    {"k": k, "a": [a.real, a.imag]},
                )
            found.append(EmbeddedEigenvalue(lam=k * k, k=k, a=a.real))
        return found

    def exp_positive_eigenvalue(self, q: ExpEven) -> Optional[EmbeddedEigenvalue]:
        """
        Returns the positive eigenvalue of the exponential potential.

        For real c > mu**2 the coupling a = -3 mu - lambda/mu has the
        eigenvalue lambda = c - mu**2 with eigenfunction q(x)/c.

        Returns:
            The eigenvalue, or None when c <= mu**2.

        Raises:
            PreconditionError: If c is not real.

        Example:
            >>> SpectrumAnalyser().exp_positive_eigenvalue(ExpEven(c=1.0, mu=0.5)).a
            -3.0
        """
        c = complex(q.c)
        if abs(c.imag) > self.config.tol * (1.0 + abs(c)):
            raise PreconditionError("positive eigenvalues of the exponential potential need a real c")
        lam = c.real - q.mu * q.mu
        if lam <= self.config.tol:
            return None
        return EmbeddedEigenvalue(lam=lam, k=math.sqrt(lam), a=-3.0 * q.mu - lam / q.mu)

    def _require_embedded_input(self, q: Potential) -> None:
        if isinstance(q, BoxOddSign):
            raise PreconditionError("odd potentials have no positive eigenvalues")
        if not isinstance(q, (BoxEven, SampledPotential, ZeroPotential)):
            raise PreconditionError(
                f"{type(q).__name__} has no compact support; embedded search needs one"
            )
        if isinstance(q, SampledPotential):
            if np.any(np.abs(q.values_array.imag) > 0):
                raise PreconditionError("embedded search needs a real potential")
            if potential_parity(q) is not Parity.EVEN:
                raise PreconditionError("embedded search needs an even potential")

    # ------------------------------------------------------------------
    # Phase diagram
    # ------------------------------------------------------------------

    def _boundary_curve(self, q: Potential, region: SearchRegion) -> np.ndarray:
        ks = np.linspace(region.k_re_min, region.k_re_max, self.CURVE_SAMPLES)
        ks = ks[ks != 0]
        return np.array([weyl_boundary(float(k), q, tol=self.config.tol).value for k in ks])

    @staticmethod
    def _distance_to_curve(a: complex, curve: np.ndarray) -> Tuple[float, complex]:
        """Returns the distance to a polyline and the nearest curve point."""
        start = curve[:-1]
        delta = curve[1:] - start
        length = np.maximum(np.abs(delta) ** 2, 1e-300)
        t = ((a - start) * np.conj(delta)).real / length
        nearest = start + np.clip(t, 0.0, 1.0) * delta
        gaps = np.abs(a - nearest)
        i = int(np.argmin(gaps))
        return float(gaps[i]), complex(nearest[i])

    def _phase_cell(
        self,
        a: complex,
        q: Potential,
        region: SearchRegion,
        curve: Optional[np.ndarray],
        curve_tolerance: float
    ) -> PhaseCell:
        tol = self.config.tol
        if isinstance(q, ZeroPotential):
            eigenvalues = [
                lam for lam in self.local_char_roots(CouplingMatrix(a, 0, 0, 0)).eigenvalues
                if region.contains(k_from_lambda(lam).k)
            ]
            k_edge = -0.5j * a
            singular = (
                abs(k_edge.imag) <= tol * (1.0 + abs(k_edge))
                and abs(a.imag) > tol * (1.0 + abs(a))
            )
        else:
            eigenvalues = [e.lam for e in self.find_eigenvalues(DeltaModel(a=a, q=q), region)]
            gap, nearest = self._distance_to_curve(a, curve)
            singular = gap <= curve_tolerance and abs(nearest.imag) > tol * (1.0 + abs(nearest))

        has_real = any(abs(lam.imag) <= 1e-8 * (1.0 + abs(lam)) for lam in eigenvalues)
        if singular:
            label = PhaseClass.SINGULARITY
        elif not eigenvalues:
            label = PhaseClass.NO_EIGENVALUE
        elif has_real:
            label = PhaseClass.REAL_EIGENVALUE
        else:
            label = PhaseClass.NONREAL_EIGENVALUE
        return PhaseCell(
            a=complex(a),
            eigenvalue_count=len(eigenvalues),
            has_real_eigenvalue=has_real,
            singular=singular,
            label=label,
        )

    def phase_diagram(
        self,
        q: Potential,
        a_values: Sequence[complex],
        region: Optional[SearchRegion] = None,
        curve_tolerance: float = 0.0
    ) -> List[PhaseCell]:
        """
        Classifies each coupling a for a fixed potential.

        For q = 0 the local polynomial gives the eigenvalues in closed
        form and a is singular exactly on the imaginary axis. Otherwise the
        eigenvalues come from the contour search and a is flagged singular
        when it lies within curve_tolerance of the boundary curve
        {W~^+(k) : k real} at a non-real point.

        Args:
            q: Potential of the delta model.
            a_values: Couplings to classify, in output order.
            region: k-rectangle for the search.
            curve_tolerance: Distance to the boundary curve counted as on it.

        Returns:
            One PhaseCell per coupling, in input order.
        """
        region = region or SearchRegion.default()
        curve = None if isinstance(q, ZeroPotential) else self._boundary_curve(q, region)

        def cell(a: complex) -> PhaseCell:
            return self._phase_cell(complex(a), q, region, curve, curve_tolerance)

        if self.jobs == 1:
            return [cell(a) for a in a_values]
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            return list(pool.map(cell, a_values))
