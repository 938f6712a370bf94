import numpy as np

from app.core.config import settings
from app.utils.exceptions import ParameterError, ModelValidationError


def validate_p(p: float) -> float:
    p = float(p)
    if not (0.0 < p <= 1.0):
        raise ParameterError(f"p must be in (0, 1], got {p}")
    return p


def validate_probability_vector(
    probs: np.ndarray,
    name: str = "distribution",
    tol: float | None = None,
) -> None:
    tol = settings.SUM_TOLERANCE if tol is None else tol

    if probs.ndim != 1 or probs.size == 0:
        raise ModelValidationError(f"{name} must be a non-empty vector")

    if not np.all(np.isfinite(probs)):
        raise ModelValidationError(f"{name} contains non-finite entries")

    if probs.min() < 0.0 or probs.max() > 1.0:
        raise ModelValidationError(f"{name} has entries outside [0, 1]")

    total = float(probs.sum())
    if abs(total - 1.0) > tol:
        raise ModelValidationError(
            f"{name} sums to {total!r}, expected 1 within {tol}"
        )


def validate_column_stochastic(
    matrix: np.ndarray,
    name: str = "matrix",
    tol: float | None = None,
) -> None:
    """
    Every column must be a distribution (column j = P(. | j)).
    """
    tol = settings.SUM_TOLERANCE if tol is None else tol

    if matrix.ndim != 2 or 0 in matrix.shape:
        raise ModelValidationError(f"{name} must be a non-empty 2-D matrix")

    if not np.all(np.isfinite(matrix)):
        raise ModelValidationError(f"{name} contains non-finite entries")

    if matrix.min() < 0.0 or matrix.max() > 1.0:
        raise ModelValidationError(f"{name} has entries outside [0, 1]")

    sums = matrix.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        j = int(bad[0])
        raise ModelValidationError(
            f"{name} column {j} sums to {float(sums[j])!r}, expected 1 within {tol}"
        )


def validate_dimension(actual: int, expected: int, what: str) -> None:
    if actual != expected:
        raise ParameterError(f"{what}: expected length {expected}, got {actual}")
