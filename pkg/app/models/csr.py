from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

from app.utils.exceptions import ParameterError


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """
    Compressed row storage: for row i, the stored (column, value) tuples
    are cols[row_starts[i]:row_starts[i + 1]] paired with the same slice
    of vals.

    Invariants: row_starts[0] == 0, row_starts is non-decreasing and ends
    at the number of stored entries, columns strictly increase within a
    row, and no stored value is zero.
    """

    n_rows: int
    n_cols: int
    row_starts: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ParameterError(
                f"CSR shape must be positive, got ({self.n_rows}, {self.n_cols})"
            )

        row_starts = np.array(self.row_starts, dtype=np.int64)
        cols = np.array(self.cols, dtype=np.int64)
        vals = np.array(self.vals, dtype=np.float64)

        if row_starts.shape != (self.n_rows + 1,):
            raise ParameterError(
                f"row_starts must have {self.n_rows + 1} entries, got {row_starts.size}"
            )
        if row_starts[0] != 0 or row_starts[-1] != cols.size:
            raise ParameterError("row_starts must start at 0 and end at the entry count")
        if np.any(np.diff(row_starts) < 0):
            raise ParameterError("row_starts must be non-decreasing")
        if cols.size != vals.size:
            raise ParameterError("cols and vals must have the same length")
        if cols.size and (cols.min() < 0 or cols.max() >= self.n_cols):
            raise ParameterError("column index out of range")
        if np.any(vals == 0.0):
            raise ParameterError("stored values must be non-zero")

        # columns strictly increase inside each row; a decrease is only
        # allowed where a new row begins
        steps = np.diff(cols)
        row_breaks = np.zeros(max(cols.size - 1, 0), dtype=bool)
        interior = row_starts[1:-1]
        interior = interior[(interior > 0) & (interior < cols.size)]
        row_breaks[interior - 1] = True
        if np.any((steps <= 0) & ~row_breaks):
            raise ParameterError("column indices must strictly increase within a row")

        for array in (row_starts, cols, vals):
            array.setflags(write=False)

        object.__setattr__(self, "n_rows", int(self.n_rows))
        object.__setattr__(self, "n_cols", int(self.n_cols))
        object.__setattr__(self, "row_starts", row_starts)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "vals", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.vals.size)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(c), float(x)) for c, x in zip(self.cols, self.vals)]

    def row(self, i: int) -> list[tuple[int, float]]:
        start, end = self.row_starts[i], self.row_starts[i + 1]
        return [(int(c), float(x)) for c, x in zip(self.cols[start:end], self.vals[start:end])]

    def row_dense(self, i: int) -> np.ndarray:
        out = np.zeros(self.n_cols)
        start, end = self.row_starts[i], self.row_starts[i + 1]
        out[self.cols[start:end]] = self.vals[start:end]
        return out

    @cached_property
    def kernel(self) -> sparse.csr_array:
        """scipy view over the same buffers; drives the fast spmv path."""
        return sparse.csr_array(
            (self.vals.copy(), self.cols.copy(), self.row_starts.copy()),
            shape=self.shape,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CsrMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_starts, other.row_starts)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.vals, other.vals)
        )

    def __repr__(self) -> str:
        return f"CsrMatrix(shape={self.shape}, nnz={self.nnz})"
