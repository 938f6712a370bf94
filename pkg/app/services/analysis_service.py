import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.config import settings
from app.models.hmm import Hmm
from app.models.topp_hmm import TopPHmm
from app.services.dist_service import tv_distance
from app.schemas.experiment_schema import TruncationMode
from app.services.inference_service import (
    observation_schedule,
    run_dense_chain,
    run_topp_chain,
)
from app.utils.exceptions import BoundViolationError, ParameterError
from app.utils.validators import validate_column_stochastic, validate_p

logger = logging.getLogger(__name__)

# columns compared per vectorized block in the pairwise scan
_SCAN_BLOCK_ENTRIES = 1 << 22


# =====================================================
# MINIMAL MIXING RATE
# =====================================================
def minimal_mixing_rate(t: np.ndarray) -> float:
    """
    gamma = min over column pairs (i1, i2) of sum_j min(T[j, i1], T[j, i2]):
    the least probability mass two current states agree on after one step.
    """
    gamma, _ = mixing_scan(t)
    return gamma


def mixing_scan(t: np.ndarray) -> tuple[float, Optional[tuple[int, int]]]:
    """Vectorized pairwise scan; also returns the minimizing column pair."""
    t = np.asarray(t, dtype=np.float64)
    validate_column_stochastic(t, "transition")

    n = t.shape[1]
    if n == 1:
        return 1.0, None

    if n > settings.GAMMA_ON_DEMAND_STATES:
        logger.warning("computing gamma over %d states (%d column pairs)", n, n * (n - 1) // 2)

    block = max(1, _SCAN_BLOCK_ENTRIES // n)
    best = math.inf
    best_pair: tuple[int, int] = (0, 1)

    for i in range(n - 1):
        column = t[:, i:i + 1]
        for start in range(i + 1, n, block):
            stop = min(start + block, n)
            overlaps = np.minimum(column, t[:, start:stop]).sum(axis=0)
            k = int(np.argmin(overlaps))
            if overlaps[k] < best:
                best = float(overlaps[k])
                best_pair = (i, start + k)

    return min(max(best, 0.0), 1.0), best_pair


def reference_mixing_rate(t: np.ndarray) -> float:
    """Plain O(n^3) scan over every unordered column pair."""
    t = np.asarray(t, dtype=np.float64)
    validate_column_stochastic(t, "transition")

    n = t.shape[1]
    best = 1.0
    for i1 in range(n):
        for i2 in range(i1 + 1, n):
            overlap = 0.0
            for j in range(n):
                overlap += min(t[j, i1], t[j, i2])
            best = min(best, overlap)
    return max(best, 0.0)


# =====================================================
# ERROR BOUNDS
# =====================================================
@dataclass(frozen=True)
class ErrorBounds:
    """
    linear_bound(k) = (k + 1)(1 - p) holds for step-wise truncation,
    mixing_bound = (1 - p) / gamma holds at every step; with gamma = 0
    there is no mixing guarantee and the bound is infinite.
    """

    p: float
    gamma: float

    @property
    def has_mixing_guarantee(self) -> bool:
        return self.gamma > 0.0 or self.p == 1.0

    @property
    def mixing_bound(self) -> float:
        if self.p == 1.0:
            return 0.0
        if self.gamma == 0.0:
            return math.inf
        return (1.0 - self.p) / self.gamma

    def linear_bound(self, k: int) -> float:
        return (k + 1) * (1.0 - self.p)

    def effective_bound(self, k: int) -> float:
        return min(self.linear_bound(k), self.mixing_bound)


def error_bounds(p: float, gamma: float) -> ErrorBounds:
    p = validate_p(p)
    if not (0.0 <= gamma <= 1.0):
        raise ParameterError(f"gamma must be in [0, 1], got {gamma}")
    return ErrorBounds(p=p, gamma=float(gamma))


# =====================================================
# TV TRAJECTORIES
# =====================================================
@dataclass(frozen=True)
class ObservationSchedule:
    period: int
    seed: int = 0


@dataclass(frozen=True)
class TvTrajectory:
    points: tuple[tuple[int, float], ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([tv for _, tv in self.points])

    @property
    def final(self) -> float:
        return self.points[-1][1]

    @property
    def maximum(self) -> float:
        return float(self.values.max())

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def __len__(self) -> int:
        return len(self.points)


def trajectory_from_messages(exact: np.ndarray, approx: np.ndarray) -> TvTrajectory:
    return TvTrajectory(
        points=tuple(
            (t, min(max(tv_distance(exact[t], approx[t]), 0.0), 1.0))
            for t in range(exact.shape[0])
        )
    )


def tv_trajectory(
    original: Hmm,
    truncated: TopPHmm,
    horizon: int,
    obs_schedule: Optional[ObservationSchedule] = None,
    mode: TruncationMode = TruncationMode.MODEL,
) -> TvTrajectory:
    """
    Exact dense inference on `original` next to sparse inference on
    `truncated`, TV between the two messages at every time 0..horizon.
    With a schedule both chains see the same observations, sampled once
    from `original`. Degenerate evidence propagates and aborts the run.
    """
    observations = None
    if obs_schedule is not None:
        observations = observation_schedule(
            original, horizon, obs_schedule.period, obs_schedule.seed
        )

    exact = run_dense_chain(original, horizon, observations)
    approx = run_topp_chain(truncated, horizon, observations, mode)
    return trajectory_from_messages(exact.messages, approx.messages)


# =====================================================
# BOUND CHECKS
# =====================================================
@dataclass(frozen=True)
class BoundCheck:
    mixing_ok: bool
    linear_ok: bool
    mixing_asserted: bool
    linear_asserted: bool
    worst_linear_step: int

    @property
    def passed(self) -> bool:
        return (self.mixing_ok or not self.mixing_asserted) and (
            self.linear_ok or not self.linear_asserted
        )

    def enforce(self, label: str) -> None:
        if not self.passed:
            which = "mixing" if self.mixing_asserted and not self.mixing_ok else "linear"
            raise BoundViolationError(
                f"{label}: observed total variation exceeds the {which} bound"
            )


def check_bounds(
    trajectory: TvTrajectory,
    bounds: Optional[ErrorBounds],
    mode: TruncationMode,
    filtering: bool,
) -> BoundCheck:
    """
    The mixing bound is asserted on prediction runs whenever gamma > 0;
    the linear bound only for message truncation. Filtering runs are
    checked and reported, never asserted.
    """
    slack = settings.BOUND_SLACK
    values = trajectory.values

    if bounds is None:
        return BoundCheck(True, True, False, False, int(np.argmax(values)))

    mixing_ok = bool(values.max() <= bounds.mixing_bound + slack)

    linear = np.array([bounds.linear_bound(k) for k, _ in trajectory.points])
    excess = values - linear
    linear_ok = bool(np.all(excess <= slack))

    return BoundCheck(
        mixing_ok=mixing_ok,
        linear_ok=linear_ok,
        mixing_asserted=(not filtering) and bounds.gamma > 0.0,
        linear_asserted=(not filtering) and TruncationMode(mode) is TruncationMode.MESSAGE,
        worst_linear_step=int(np.argmax(excess)),
    )


# =====================================================
# CONTRACTION
# =====================================================
@dataclass(frozen=True)
class ContractionReport:
    gamma: float
    trials: int
    max_ratio: float
    threshold: float
    passed: bool


def check_contraction(t: np.ndarray, trials: int, seed: int) -> ContractionReport:
    """
    One step of T shrinks TV by at least 1 - gamma. Pairs come from a
    flat Dirichlet plus the point masses on the minimizing column pair.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")

    t = np.asarray(t, dtype=np.float64)
    gamma, pair = mixing_scan(t)
    n = t.shape[1]

    rng = np.random.default_rng(seed)
    phi = rng.dirichlet(np.ones(n), size=trials)
    psi = rng.dirichlet(np.ones(n), size=trials)

    if pair is not None:
        extreme = np.eye(n)
        phi = np.vstack([phi, extreme[pair[0]]])
        psi = np.vstack([psi, extreme[pair[1]]])

    before = 0.5 * np.abs(phi - psi).sum(axis=1)
    after = 0.5 * np.abs(phi @ t.T - psi @ t.T).sum(axis=1)

    moved = before > 0.0
    ratios = after[moved] / before[moved]
    max_ratio = float(ratios.max()) if ratios.size else 0.0

    threshold = 1.0 - gamma + settings.BOUND_SLACK
    return ContractionReport(
        gamma=gamma,
        trials=trials,
        max_ratio=max_ratio,
        threshold=threshold,
        passed=max_ratio <= threshold,
    )
