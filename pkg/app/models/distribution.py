from dataclasses import dataclass, field

import numpy as np

from app.utils.validators import validate_probability_vector


@dataclass(frozen=True, eq=False)
class Distribution:
    """
    Finite discrete distribution over event ids 0..d-1.

    Entries lie in [0, 1] and sum to 1 within settings.SUM_TOLERANCE.
    Vectors outside the tolerance are rejected, never renormalized.
    The backing array is read-only.
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        validate_probability_vector(probs)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    # -------------------------------------------------
    # CONSTRUCTORS
    # -------------------------------------------------
    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, event: int) -> "Distribution":
        probs = np.zeros(size)
        probs[event] = 1.0
        return cls(probs)

    # -------------------------------------------------
    # ACCESSORS
    # -------------------------------------------------
    @property
    def size(self) -> int:
        return int(self.probs.size)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.probs))

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, event: int) -> float:
        return float(self.probs[event])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())

    def __repr__(self) -> str:
        return f"Distribution(size={self.size}, support={len(self.support)})"


@dataclass(frozen=True)
class TopPResult:
    """
    Top-p distribution together with the mass it kept.

    kept_mass is the accumulated sum P(Y) that crossed p (not p itself),
    kept_indices is the top-p set Y in ascending id order.
    """

    distribution: Distribution
    kept_mass: float
    kept_indices: tuple[int, ...] = field(default_factory=tuple)
