"""Grid-initialized damped Newton minimization of the fit error.

The initial guess is the best point of an exhaustive grid evaluation; the
iteration then follows x_{k+1} = x_k - gamma H^{-1} g with a Levenberg-style
shift when the Hessian is indefinite and simple step halving when a step
fails to decrease the error or leaves the domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import FrameFamily, error_value
from .derivatives import error_gradient_hessian
from .errors import (
    EmptyDomainError,
    FramefitError,
    LeftDomainError,
    SingularHessianError,
)

MAX_BACKTRACKS = 20
MAX_SHIFT_FACTOR = 1e12


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned evaluation grid: counts[p] points on [lower[p], upper[p]]."""

    lower: np.ndarray
    upper: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        counts = np.atleast_1d(np.asarray(self.counts, dtype=int))
        if not (lower.shape == upper.shape == counts.shape):
            raise ValueError("grid lower, upper, counts must be congruent")
        if not np.all(lower < upper):
            raise ValueError("grid requires lower < upper componentwise")
        if not np.all(counts >= 1):
            raise ValueError("grid counts must be positive")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "counts", counts)

    @property
    def num_points(self) -> int:
        return int(np.prod(self.counts))

    def axes(self) -> list[np.ndarray]:
        return [
            np.linspace(lo, hi, c)
            for lo, hi, c in zip(self.lower, self.upper, self.counts)
        ]

    def points(self):
        """Yield grid points in lexicographic index order (first axis slowest)."""
        for combo in itertools.product(*self.axes()):
            yield np.array(combo)


@dataclass(frozen=True)
class SolverConfig:
    """Newton iteration controls; defaults suit unit-scale scenes."""

    gamma: float = 1.0          # initial step scale, halved on backtracking
    max_iters: int = 100
    grad_tol: float = 1e-10
    step_tol: float = 1e-12
    reg0: float = 0.0           # initial Hessian shift
    grid: GridSpec | None = None

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError("gamma must lie in (0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.grad_tol <= 0.0 or self.step_tol <= 0.0:
            raise ValueError("tolerances must be strictly positive")
        if self.reg0 < 0.0:
            raise ValueError("reg0 must be nonnegative")


class SolveStatus(Enum):
    GRADIENT_CONVERGED = "GradientConverged"
    STEP_CONVERGED = "StepConverged"
    MAX_ITERS = "MaxIters"
    LEFT_DOMAIN = "LeftDomain"


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a localization run, with the full iterate trace."""

    minimizer: np.ndarray
    value: float
    iterates: list  # (x_k, E(x_k), |grad E(x_k)|) per recorded iterate
    status: SolveStatus


def grid_search(family: FrameFamily, w, grid: GridSpec) -> np.ndarray:
    """In-domain grid point with the smallest error; first such point on ties."""
    w = family.check_measurement(w)
    best_x = None
    best_E = np.inf
    for x in grid.points():
        try:
            E = error_value(family, x, w)
        except FramefitError:
            continue
        if E < best_E:
            best_x, best_E = x, E
    if best_x is None:
        raise EmptyDomainError("no grid point lies in the frame domain")
    return best_x


def _shifted_newton_direction(g, H, reg0):
    """Solve (H + lam I) d = g with the smallest shift making d a descent direction."""
    P = len(g)
    scale = max(float(np.linalg.norm(H)), 1.0)
    lam = reg0
    while True:
        try:
            d = np.linalg.solve(H + lam * np.eye(P), g)
            if np.all(np.isfinite(d)) and float(g @ d) > 0.0:
                return d
        except np.linalg.LinAlgError:
            pass
        lam = max(2.0 * lam, 1e-12 * scale)
        if lam > MAX_SHIFT_FACTOR * scale:
            raise SingularHessianError(
                "Newton system unsolvable even after shifting"
            )


def newton_step(family: FrameFamily, w, x_k, cfg: SolverConfig) -> np.ndarray:
    """One damped Newton update from x_k.

    Halves the step up to MAX_BACKTRACKS times while the error increases or
    the candidate leaves the domain; returns x_k unchanged when no decrease is
    found, and raises LeftDomainError when every backtracked candidate is
    outside the domain.
    """
    x_k = family.check_point(x_k)
    w = family.check_measurement(w)
    E0, g, H = error_gradient_hessian(family, x_k, w)
    if np.linalg.norm(g) == 0.0:
        return x_k
    direction = _shifted_newton_direction(g, H, cfg.reg0)

    gamma = cfg.gamma
    stayed_inside = False
    for _ in range(MAX_BACKTRACKS + 1):
        candidate = x_k - gamma * direction
        try:
            E = error_value(family, candidate, w)
        except FramefitError:
            gamma *= 0.5
            continue
        stayed_inside = True
        if E <= E0:
            return candidate
        gamma *= 0.5
    if not stayed_inside:
        raise LeftDomainError("no backtracked Newton step stays in the domain")
    return x_k


def localize(family: FrameFamily, w, cfg: SolverConfig) -> SolveResult:
    """Grid search followed by the Newton iteration, with a full trace."""
    if cfg.grid is None:
        raise ValueError("SolverConfig.grid is required for localize")
    w = family.check_measurement(w)
    x = grid_search(family, w, cfg.grid)
    iterates = []
    status = SolveStatus.MAX_ITERS
    for k in range(cfg.max_iters + 1):
        E, g, _ = error_gradient_hessian(family, x, w)
        iterates.append((x.copy(), E, float(np.linalg.norm(g))))
        if iterates[-1][2] < cfg.grad_tol:
            status = SolveStatus.GRADIENT_CONVERGED
            break
        if k == cfg.max_iters:
            status = SolveStatus.MAX_ITERS
            break
        try:
            x_next = newton_step(family, w, x, cfg)
        except LeftDomainError:
            status = SolveStatus.LEFT_DOMAIN
            break
        step = float(np.linalg.norm(x_next - x))
        x = x_next
        if step < cfg.step_tol:
            E, g, _ = error_gradient_hessian(family, x, w)
            iterates.append((x.copy(), E, float(np.linalg.norm(g))))
            status = SolveStatus.STEP_CONVERGED
            break
    minimizer, value, _ = iterates[-1]
    return SolveResult(minimizer, value, iterates, status)
