import numpy as np

from app.models.distribution import Distribution, TopPResult
from app.utils.exceptions import ParameterError
from app.utils.validators import validate_p


# -------------------------------------------------
# KERNEL
# -------------------------------------------------
def sorted_order(probs: np.ndarray) -> np.ndarray:
    """
    Event ids by descending probability, ties by ascending id.
    A stable sort on the negated vector gives exactly that order.
    """
    return np.argsort(-probs, kind="stable")


def truncate_vector(probs: np.ndarray, p: float) -> tuple[np.ndarray, float, np.ndarray]:
    """
    Top-p on a raw vector: take events in sorted order, keep a running
    sum, stop at the first event where `sum >= p`, divide the kept
    entries by that sum.

    Returns (truncated vector, accumulated sum, kept ids in sorted order).
    The running sum is sequential (np.cumsum), so the comparison is the
    same double-precision test a hand-written loop would make.
    """
    order = sorted_order(probs)
    running = np.cumsum(probs[order])

    crossed = np.flatnonzero(running >= p)
    if crossed.size:
        cut = int(crossed[0])
    else:
        # rounding kept the sum just below p: keep every positive event
        cut = int(np.count_nonzero(probs)) - 1

    kept = order[: cut + 1]
    kept_mass = float(running[cut])

    out = np.zeros_like(probs)
    out[kept] = probs[kept] / kept_mass
    return out, kept_mass, kept


# -------------------------------------------------
# OPERATIONS
# -------------------------------------------------
def top_p_set(p_dist: Distribution, p: float) -> tuple[int, ...]:
    """Minimal prefix of the sorted order whose mass reaches p."""
    p = validate_p(p)
    _, _, kept = truncate_vector(p_dist.probs, p)
    return tuple(int(i) for i in kept)


def top_p_distribution(p_dist: Distribution, p: float) -> TopPResult:
    p = validate_p(p)
    truncated, kept_mass, kept = truncate_vector(p_dist.probs, p)
    return TopPResult(
        distribution=Distribution(truncated),
        kept_mass=kept_mass,
        kept_indices=tuple(sorted(int(i) for i in kept)),
    )


def total_variation(a: Distribution, b: Distribution) -> float:
    """Half the L1 distance."""
    if a.size != b.size:
        raise ParameterError(
            f"total variation needs equal event counts, got {a.size} and {b.size}"
        )
    return tv_distance(a.probs, b.probs)


def tv_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.abs(a - b).sum())
