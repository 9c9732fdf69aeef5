"""FDOA multistatic radar frame family and measurement simulation.

Each transmitter/receiver pair (a_n, b_n) contributes the bistatic distance
phi_n(x) = |x - a_n| + |x - b_n|.  Its gradient, the sum of the unit vectors
pointing to x from a_n and b_n, is the n-th frame element; range-rate (FDOA)
measurements are inner products of these elements with the target velocity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import FrameFamily, FrameJet, dual_synthesis
from .errors import (
    DimensionMismatchError,
    NearSingularError,
    ScenarioParseError,
    ScenarioValidationError,
)

# A query point closer than this fraction of the scene diameter to any
# transmitter or receiver is treated as singular.
SINGULARITY_RTOL = 1e-9


@dataclass(frozen=True)
class RadarGeometry:
    """Fixed transmitter and receiver positions, N of each, in R^M (meters)."""

    transmitters: np.ndarray  # (N, M)
    receivers: np.ndarray     # (N, M)

    def __post_init__(self):
        tx = np.atleast_2d(np.asarray(self.transmitters, dtype=float))
        rx = np.atleast_2d(np.asarray(self.receivers, dtype=float))
        if tx.shape != rx.shape or tx.shape[0] < 1:
            raise DimensionMismatchError(
                "transmitter and receiver lists must be nonempty and congruent"
            )
        if tx.shape[1] not in (2, 3):
            raise DimensionMismatchError("ambient dimension must be 2 or 3")
        if not (np.all(np.isfinite(tx)) and np.all(np.isfinite(rx))):
            raise DimensionMismatchError("station coordinates must be finite")
        object.__setattr__(self, "transmitters", tx)
        object.__setattr__(self, "receivers", rx)
        # cache the diameter: jet evaluation reads it in its inner loop
        pts = np.vstack([tx, rx])
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        diam = float(d.max())
        object.__setattr__(self, "_diameter", diam if diam > 0.0 else 1.0)

    @property
    def num_pairs(self) -> int:
        return self.transmitters.shape[0]

    @property
    def dim(self) -> int:
        return self.transmitters.shape[1]

    @property
    def scene_diameter(self) -> float:
        """Largest distance between any two stations; 1.0 for a degenerate scene."""
        return self._diameter

    @property
    def singularity_tolerance(self) -> float:
        return SINGULARITY_RTOL * self._diameter


@dataclass(frozen=True)
class TargetState:
    """Target position and velocity at one instant (meters, meters/second)."""

    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        vel = np.asarray(self.velocity, dtype=float)
        if pos.shape != vel.shape or pos.ndim != 1:
            raise DimensionMismatchError("position and velocity must be congruent vectors")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(vel))):
            raise DimensionMismatchError("target state must be finite")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)


@dataclass(frozen=True)
class NoiseModel:
    """I.i.d. Gaussian range-rate noise with a fixed seed.

    The stream is drawn from numpy's Philox generator, a documented 64-bit
    counter-based algorithm, so the same seed reproduces the same noise
    everywhere.
    """

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ScenarioValidationError("noise sigma must be nonnegative")

    def draw(self, n: int) -> np.ndarray:
        rng = np.random.Generator(np.random.Philox(key=self.seed))
        return self.sigma * rng.standard_normal(n)


def bistatic_distance(geometry: RadarGeometry, n: int, x) -> float:
    """Transmitter-to-target plus target-to-receiver path length for pair n."""
    x = np.asarray(x, dtype=float)
    return float(
        np.linalg.norm(x - geometry.transmitters[n])
        + np.linalg.norm(x - geometry.receivers[n])
    )


def unit_vector_jet(x, order: int = 2, tol: float = 0.0):
    """Value and derivatives of the normalization map x -> x / |x|.

    Returns (u, first, second) where ``first[:, p]`` is the partial of u with
    respect to x_p, namely pi(x) delta_p / |x| with pi(x) = I - x x^T / |x|^2,
    and ``second[q, p]`` is the mixed second partial

        -(1/|x|^3) [ pi(x)(delta_p x_q + delta_q x_p) + pi(x)[p, q] x ].

    ``second`` is None for order < 2.  Raises NearSingularError when |x| <= tol
    (or is exactly zero).
    """
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r <= tol or r == 0.0:
        raise NearSingularError(f"point at distance {r} from a station (tol {tol})")
    u = x / r
    if order < 1:
        return u, None, None
    M = len(x)
    pi = np.eye(M) - np.outer(u, u)
    first = pi / r
    if order < 2:
        return u, first, None
    second = -(
        x[:, None, None] * pi[None, :, :]
        + x[None, :, None] * pi[:, None, :]
        + pi[:, :, None] * x[None, None, :]
    ) / r**3
    return u, first, second


def frame_element(geometry: RadarGeometry, n: int, x) -> np.ndarray:
    """Gradient of the n-th bistatic distance: a sum of two unit vectors."""
    x = np.asarray(x, dtype=float)
    tol = geometry.singularity_tolerance
    ua, _, _ = unit_vector_jet(x - geometry.transmitters[n], order=0, tol=tol)
    ub, _, _ = unit_vector_jet(x - geometry.receivers[n], order=0, tol=tol)
    return ua + ub


class RadarFrameFamily(FrameFamily):
    """The frame family whose n-th column is the gradient of phi_n.

    Parameters coincide with target position, so P = M.  The domain excludes
    points near any station and points where the columns fail to span R^M.
    """

    def __init__(self, geometry: RadarGeometry):
        self.geometry = geometry
        self.M = geometry.dim
        self.N = geometry.num_pairs
        self.P = geometry.dim

    def _station_jets(self, x, stations, order):
        """Vectorized unit-vector jets of x - s over all stations s."""
        d = x[None, :] - stations                       # (N, M)
        r = np.sqrt(np.einsum("nm,nm->n", d, d))        # (N,)
        tol = self.geometry.singularity_tolerance
        if np.any(r <= tol) or np.any(r == 0.0):
            raise NearSingularError(
                f"target within tolerance {tol} of a station"
            )
        u = d / r[:, None]
        if order < 1:
            return u, None, None
        eye = np.eye(self.M)
        pi = eye[None, :, :] - u[:, :, None] * u[:, None, :]   # (N, M, M)
        first = pi / r[:, None, None]
        if order < 2:
            return u, first, None
        # second[n, q, p, m], mirroring the single-vector formula per station
        second = -(
            d[:, :, None, None] * pi[:, None, :, :]
            + d[:, None, :, None] * pi[:, :, None, :]
            + pi[:, :, :, None] * d[:, None, None, :]
        ) / (r**3)[:, None, None, None]
        return u, first, second

    def jet(self, x, order: int = 2) -> FrameJet:
        x = self.check_point(x)
        tx, rx = self.geometry.transmitters, self.geometry.receivers
        ua, fa, sa = self._station_jets(x, tx, order)
        ub, fb, sb = self._station_jets(x, rx, order)
        F = (ua + ub).T                                  # (M, N)
        dF = d2F = None
        if order >= 1:
            # first[n, m, p] -> dF[p, m, n]
            dF = (fa + fb).transpose(2, 1, 0)
        if order >= 2:
            # second[n, q, p, m] -> d2F[q, p, m, n]
            d2F = (sa + sb).transpose(1, 2, 3, 0)
        return FrameJet(F, dF, d2F)

    def contains(self, x) -> bool:
        from .errors import FramefitError

        try:
            x = self.check_point(x)
            dual_synthesis(self.jet(x, order=0).F)
        except FramefitError:
            return False
        return True


def radar_family(geometry: RadarGeometry) -> RadarFrameFamily:
    """Frame family generated by a multistatic radar geometry."""
    return RadarFrameFamily(geometry)


def simulate_fdoa(
    geometry: RadarGeometry, truth: TargetState, noise: NoiseModel
) -> np.ndarray:
    """Simulated FDOA measurement vector w = F(x0)^T v0 + noise.

    With sigma = 0 the result lies exactly in the coefficient space of the
    frame at the true position.
    """
    family = radar_family(geometry)
    x0 = family.check_point(truth.position)
    F = family.jet(x0, order=0).F
    w = F.T @ truth.velocity
    if noise.sigma > 0.0:
        w = w + noise.draw(family.N)
    return w


@dataclass(frozen=True)
class RadarScenario:
    """A complete simulated scene: geometry, target truth, and noise model."""

    geometry: RadarGeometry
    target: TargetState
    noise: NoiseModel


def parse_scenario(data: dict) -> RadarScenario:
    """Build and validate a scenario from its JSON dictionary form."""
    try:
        dim = int(data["dim"])
        geometry = RadarGeometry(
            np.asarray(data["transmitters"], dtype=float),
            np.asarray(data["receivers"], dtype=float),
        )
        target = TargetState(
            np.asarray(data["target"]["position"], dtype=float),
            np.asarray(data["target"]["velocity"], dtype=float),
        )
        noise_spec = data.get("noise", {})
        noise = NoiseModel(
            sigma=float(noise_spec.get("sigma", 0.0)),
            seed=int(noise_spec.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioValidationError):
            raise
        raise ScenarioParseError(f"malformed scenario: {exc}") from exc
    if geometry.dim != dim:
        raise ScenarioValidationError(
            f"declared dim {dim} does not match station coordinates ({geometry.dim})"
        )
    if target.position.shape != (dim,):
        raise ScenarioValidationError("target position dimension does not match dim")
    tol = geometry.singularity_tolerance
    stations = np.vstack([geometry.transmitters, geometry.receivers])
    dists = np.linalg.norm(stations - target.position[None, :], axis=1)
    if np.any(dists <= tol):
        raise ScenarioValidationError(
            "target position coincides with a transmitter or receiver"
        )
    return RadarScenario(geometry, target, noise)


def load_scenario(path) -> RadarScenario:
    """Read a scenario JSON file; see parse_scenario for the schema."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioParseError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario(data)
