"""Fitting smooth embedding trajectories to time-varying dissimilarities.

Each object i gets a (p x q) coefficient matrix against a shared cubic
spline basis, so its embedded position at time t is the matrix applied to
the basis vector at t. The coefficients are chosen to minimize the squared
stress

    F = sum over pairs (h, j) and grid times t_k of
        [d_hj(t_k)^2 - ||x_h(t_k) - x_j(t_k)||^2]^2,

driven by a pairwise Adam scheme: every epoch visits all object pairs, the
first index in shuffled order, applying the analytic pair gradient to both
objects' coefficients through per-object moment estimates. A per-slice
classical MDS solution, rotation-aligned across slices and smoothed into
spline coefficients, provides the warm start.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspline import KnotVector, basis_matrix, make_knots, _solve_least_squares
from .cmds import classical_mds
from .dissimilarity import DissimilarityTensor
from .errors import (
    ConfigError,
    DivergedError,
    InsufficientObjects,
    ShapeError,
    Underdetermined,
)

# Stress beyond this aborts the fit as diverged; the quartic objective can
# explode quickly under a bad step size.
STRESS_OVERFLOW = 1e30

CUBIC_ORDER = 4


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Per-object coefficient matrices against a shared spline basis.

    ``coefficients`` has shape (n, p, q): n objects, p embedding
    dimensions, q basis functions of ``knots``.
    """

    coefficients: np.ndarray
    knots: KnotVector

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.ndim != 3:
            raise ShapeError(f"coefficients must be (n, p, q), got shape {coeffs.shape}")
        if coeffs.shape[2] != self.knots.num_basis:
            raise ShapeError(
                f"coefficient matrices have {coeffs.shape[2]} columns but the "
                f"basis has {self.knots.num_basis} functions"
            )
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n(self) -> int:
        return self.coefficients.shape[0]

    @property
    def p(self) -> int:
        return self.coefficients.shape[1]

    @property
    def q(self) -> int:
        return self.coefficients.shape[2]


@dataclass
class AdamState:
    """Per-object first/second moment estimates and update counters.

    Moments persist across epochs; each object's bias-correction exponent
    is its own count of updates received so far.
    """

    first_moment: np.ndarray
    second_moment: np.ndarray
    step_counts: np.ndarray
    alpha: float = 0.001
    gamma1: float = 0.9
    gamma2: float = 0.999
    denom_shift: float = 1e-8

    @classmethod
    def zeros(cls, n: int, p: int, q: int, *, alpha: float = 0.001, gamma1: float = 0.9,
              gamma2: float = 0.999, denom_shift: float = 1e-8) -> "AdamState":
        return cls(
            first_moment=np.zeros((n, p, q)),
            second_moment=np.zeros((n, p, q)),
            step_counts=np.zeros(n, dtype=np.int64),
            alpha=alpha,
            gamma1=gamma1,
            gamma2=gamma2,
            denom_shift=denom_shift,
        )

    def step(self, index: int, gradient: np.ndarray) -> np.ndarray:
        """Absorb one gradient for an object and return its parameter increment.

        At the first update the bias corrections cancel and the increment is
        -alpha * g / (|g| + shift) elementwise.
        """
        g = np.asarray(gradient, dtype=float)
        self.first_moment[index] = self.gamma1 * self.first_moment[index] + (1.0 - self.gamma1) * g
        self.second_moment[index] = (
            self.gamma2 * self.second_moment[index] + (1.0 - self.gamma2) * (g * g)
        )
        self.step_counts[index] += 1
        t = int(self.step_counts[index])
        m_hat = self.first_moment[index] / (1.0 - self.gamma1 ** t)
        v_hat = self.second_moment[index] / (1.0 - self.gamma2 ** t)
        return -self.alpha * m_hat / (np.sqrt(v_hat) + self.denom_shift)


@dataclass(frozen=True)
class FitConfig:
    """Fit hyperparameters.

    ``interior_knots=None`` resolves to max(1, m // 10) at fit time, where
    m is the number of tensor time points; the basis is always cubic, so
    q = 4 + interior_knots.
    """

    p: int = 2
    interior_knots: int | None = None
    alpha: float = 0.001
    gamma1: float = 0.9
    gamma2: float = 0.999
    eps: float = 1e-6
    max_epochs: int = 1000
    rng_seed: int = 0
    init_mode: str = "cmds_warm"
    baseline: str = "adam"

    def __post_init__(self):
        if self.p < 1:
            raise ConfigError(f"embedding dimension must be at least 1, got {self.p}")
        if self.interior_knots is not None and self.interior_knots < 0:
            raise ConfigError(f"interior knot count must be nonnegative, got {self.interior_knots}")
        if self.alpha <= 0:
            raise ConfigError(f"step size must be positive, got {self.alpha}")
        if not 0 <= self.gamma1 < 1 or not 0 <= self.gamma2 < 1:
            raise ConfigError("decay rates must lie in [0, 1)")
        if self.eps <= 0:
            raise ConfigError(f"convergence tolerance must be positive, got {self.eps}")
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be at least 1, got {self.max_epochs}")
        if self.init_mode not in ("cmds_warm", "random"):
            raise ConfigError(f"unknown init mode {self.init_mode!r}")
        if self.baseline not in ("adam", "full_batch_gd"):
            raise ConfigError(f"unknown baseline {self.baseline!r}")


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of a fit: final coefficients plus per-epoch diagnostics."""

    coefficients: CoefficientSet
    stress_per_epoch: np.ndarray
    epochs_run: int
    converged: bool
    max_displacement_per_epoch: np.ndarray
    initial_stress: float


@dataclass(frozen=True, eq=False)
class EmbeddingTrajectory:
    """Embedded positions over a grid and the dissimilarities they induce.

    ``positions`` has shape (num_times, n, p); ``fitted_dissimilarities``
    stacks the (n, n) pairwise-distance matrix of each grid point.
    """

    time_grid: np.ndarray
    positions: np.ndarray
    fitted_dissimilarities: np.ndarray


def default_interior_knots(num_times: int) -> int:
    """Default interior knot count for a grid of the given size."""
    return max(1, num_times // 10)


def _fit_knots(grid: np.ndarray, interior_count: int) -> KnotVector:
    """Cubic knot vector spanning the grid with uniform interior knots."""
    a, b = float(grid[0]), float(grid[-1])
    interior = np.linspace(a, b, interior_count + 2)[1:-1]
    return make_knots((a, b), interior, order=CUBIC_ORDER)


# ---------------------------------------------------------------------------
# objective and gradients


def _stress_value(coeffs: np.ndarray, dsq: np.ndarray, basis: np.ndarray) -> float:
    """Squared stress of raw coefficient arrays against squared dissimilarities."""
    pos = np.einsum("ipq,kq->ikp", coeffs, basis)
    diff = pos[:, None] - pos[None, :]
    embedded_sq = (diff * diff).sum(axis=-1)
    resid = np.moveaxis(dsq, 0, 2) - embedded_sq
    iu = np.triu_indices(coeffs.shape[0], 1)
    r = resid[iu]
    return float((r * r).sum())


def _pair_value(c_h: np.ndarray, c_j: np.ndarray, dsq_pair: np.ndarray,
                basis: np.ndarray) -> float:
    u = (c_h - c_j) @ basis.T
    resid = dsq_pair - (u * u).sum(axis=0)
    return float((resid * resid).sum())


def _pair_grad(c_h: np.ndarray, c_j: np.ndarray, dsq_pair: np.ndarray,
               basis: np.ndarray) -> np.ndarray:
    """Gradient of the pair objective with respect to the first matrix.

    The gradient with respect to the second matrix is exactly the negation.
    """
    u = (c_h - c_j) @ basis.T
    resid = dsq_pair - (u * u).sum(axis=0)
    return -4.0 * (u * resid) @ basis


def _full_gradients(coeffs: np.ndarray, dsq: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Gradient of the full objective with respect to every coefficient matrix."""
    pos = np.einsum("ipq,kq->ikp", coeffs, basis)
    diff = pos[:, None] - pos[None, :]
    embedded_sq = (diff * diff).sum(axis=-1)
    resid = np.moveaxis(dsq, 0, 2) - embedded_sq
    # diagonal terms contribute nothing: resid and diff both vanish there
    return -4.0 * np.einsum("hjk,hjkp,kq->hpq", resid, diff, basis)


def _check_pair(coeffs_n: int, h: int, j: int) -> None:
    if h == j:
        raise ShapeError("pair indices must differ")
    if not (0 <= h < coeffs_n and 0 <= j < coeffs_n):
        raise ShapeError(f"pair ({h}, {j}) outside object range [0, {coeffs_n})")


def stress(coeffs: CoefficientSet, tensor: DissimilarityTensor) -> float:
    """Squared stress of a coefficient set against a dissimilarity tensor.

    Zero exactly when the embedded squared distances reproduce the squared
    dissimilarities at every pair and grid time.
    """
    if tensor.n != coeffs.n:
        raise ShapeError(f"tensor has {tensor.n} objects but coefficients have {coeffs.n}")
    basis = basis_matrix(coeffs.knots, tensor.time_grid).values
    return _stress_value(coeffs.coefficients, tensor.stacked() ** 2, basis)


def pair_stress(c_h, c_j, tensor: DissimilarityTensor, h: int, j: int,
                knots: KnotVector) -> float:
    """Contribution of one object pair to the squared stress.

    Summing over all pairs h < j recovers the full objective.
    """
    _check_pair(tensor.n, h, j)
    basis = basis_matrix(knots, tensor.time_grid).values
    dsq_pair = tensor.stacked()[:, h, j] ** 2
    return _pair_value(np.asarray(c_h, float), np.asarray(c_j, float), dsq_pair, basis)


def pair_gradients(c_h, c_j, tensor: DissimilarityTensor, h: int, j: int,
                   knots: KnotVector) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of the pair objective for both matrices.

    Returns (g_h, g_j); the second is exactly the negation of the first,
    since the objective depends on the matrices only through their
    difference.
    """
    _check_pair(tensor.n, h, j)
    basis = basis_matrix(knots, tensor.time_grid).values
    dsq_pair = tensor.stacked()[:, h, j] ** 2
    g_h = _pair_grad(np.asarray(c_h, float), np.asarray(c_j, float), dsq_pair, basis)
    return g_h, -g_h


# ---------------------------------------------------------------------------
# initialization


def _procrustes_rotation(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Orthogonal matrix R minimizing ||source @ R - target|| in Frobenius norm.

    R is the orthogonal polar factor of the cross-covariance source^T target;
    reflections are allowed.
    """
    u, _, vt = np.linalg.svd(source.T @ target)
    return u @ vt


def _resolve_layout(tensor: DissimilarityTensor, config: FitConfig) -> tuple[KnotVector, int]:
    interior = (
        config.interior_knots
        if config.interior_knots is not None
        else default_interior_knots(tensor.num_times)
    )
    q = CUBIC_ORDER + interior
    if tensor.num_times < q:
        raise Underdetermined(
            f"{tensor.num_times} time points cannot determine {q} coefficients; "
            f"reduce the interior knot count"
        )
    return _fit_knots(tensor.time_grid, interior), q


def init_from_cmds(tensor: DissimilarityTensor, config: FitConfig) -> CoefficientSet:
    """Warm-start coefficients from per-slice classical MDS.

    Each time slice is embedded independently, then successive slices are
    aligned to their predecessor by an orthogonal Procrustes rotation --
    per-slice spectral solutions are only defined up to rotation and
    reflection, so without alignment the coordinate series are not
    smoothable. Finally every object/coordinate series is least-squares
    smoothed into one row of the coefficient matrices.
    """
    if tensor.n < 2:
        raise InsufficientObjects(f"need at least 2 objects, got {tensor.n}")
    knots, q = _resolve_layout(tensor, config)
    m, n, p = tensor.num_times, tensor.n, config.p

    aligned = np.empty((m, n, p))
    aligned[0] = classical_mds(tensor.slices[0], p).configuration
    for k in range(1, m):
        embedded = classical_mds(tensor.slices[k], p).configuration
        aligned[k] = embedded @ _procrustes_rotation(embedded, aligned[k - 1])

    basis = basis_matrix(knots, tensor.time_grid)
    solution = _solve_least_squares(basis.values, aligned.reshape(m, n * p))
    return CoefficientSet(solution.T.reshape(n, p, q), knots)


def _random_coefficients(tensor: DissimilarityTensor, config: FitConfig,
                         rng: np.random.Generator, q: int) -> np.ndarray:
    """Uniform coefficients on [-0.5, 0.5] scaled by the mean dissimilarity."""
    iu = np.triu_indices(tensor.n, 1)
    scale = float(np.mean([s.values[iu].mean() for s in tensor.slices]))
    if scale == 0.0:
        scale = 1.0
    return rng.uniform(-0.5, 0.5, size=(tensor.n, config.p, q)) * scale


def init_random(tensor: DissimilarityTensor, config: FitConfig) -> CoefficientSet:
    """Random coefficients, provided to quantify the warm start's value."""
    if tensor.n < 2:
        raise InsufficientObjects(f"need at least 2 objects, got {tensor.n}")
    knots, q = _resolve_layout(tensor, config)
    rng = np.random.default_rng(config.rng_seed)
    return CoefficientSet(_random_coefficients(tensor, config, rng, q), knots)


# ---------------------------------------------------------------------------
# optimization


def fit(tensor: DissimilarityTensor, config: FitConfig) -> FitResult:
    """Fit embedding trajectories to a dissimilarity tensor.

    Runs the pairwise Adam scheme (or, with ``baseline="full_batch_gd"``,
    one plain gradient step on the full objective per epoch). An epoch
    visits every pair (h, j), h < j, with the h values shuffled; moments
    and per-object bias-correction counters persist across epochs.
    Convergence is declared when no coefficient matrix moved more than
    ``config.eps`` in Frobenius norm over a full epoch.

    Raises DivergedError, reporting the epoch, if the stress overflows or
    becomes non-finite.
    """
    if tensor.n < 2:
        raise InsufficientObjects(f"need at least 2 objects, got {tensor.n}")
    knots, q = _resolve_layout(tensor, config)
    n = tensor.n
    basis = basis_matrix(knots, tensor.time_grid).values
    dsq = tensor.stacked() ** 2

    rng = np.random.default_rng(config.rng_seed)
    if config.init_mode == "cmds_warm":
        coeffs = init_from_cmds(tensor, config).coefficients.copy()
    else:
        coeffs = _random_coefficients(tensor, config, rng, q)

    initial_stress = _stress_value(coeffs, dsq, basis)
    state = AdamState.zeros(
        n, config.p, q,
        alpha=config.alpha, gamma1=config.gamma1, gamma2=config.gamma2,
    )

    stress_log: list[float] = []
    disp_log: list[float] = []
    converged = False
    epochs = 0
    for epoch in range(config.max_epochs):
        before = coeffs.copy()
        if config.baseline == "adam":
            for h in rng.permutation(n - 1):
                for j in range(h + 1, n):
                    grad_h = _pair_grad(coeffs[h], coeffs[j], dsq[:, h, j], basis)
                    delta_h = state.step(h, grad_h)
                    delta_j = state.step(j, -grad_h)
                    coeffs[h] += delta_h
                    coeffs[j] += delta_j
        else:
            coeffs -= config.alpha * _full_gradients(coeffs, dsq, basis)

        value = _stress_value(coeffs, dsq, basis)
        epochs = epoch + 1
        if not np.isfinite(value) or value > STRESS_OVERFLOW:
            raise DivergedError(f"stress {value} at epoch {epoch}", epoch=epoch)
        stress_log.append(value)
        displacement = float(np.sqrt(((coeffs - before) ** 2).sum(axis=(1, 2))).max())
        disp_log.append(displacement)
        if displacement < config.eps:
            converged = True
            break

    return FitResult(
        coefficients=CoefficientSet(coeffs, knots),
        stress_per_epoch=np.asarray(stress_log),
        epochs_run=epochs,
        converged=converged,
        max_displacement_per_epoch=np.asarray(disp_log),
        initial_stress=initial_stress,
    )


def evaluate_trajectories(coeffs: CoefficientSet, grid) -> EmbeddingTrajectory:
    """Evaluate embedded positions and induced dissimilarities on a grid."""
    pts = np.asarray(grid, dtype=float).ravel()
    basis = basis_matrix(coeffs.knots, pts).values
    positions = np.einsum("ipq,kq->kip", coeffs.coefficients, basis)
    diff = positions[:, :, None, :] - positions[:, None, :, :]
    fitted = np.sqrt((diff * diff).sum(axis=-1))
    return EmbeddingTrajectory(pts, positions, fitted)
