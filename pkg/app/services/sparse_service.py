from dataclasses import dataclass

import numpy as np

from app.core.config import settings
from app.models.csr import CsrMatrix
from app.models.distribution import Distribution
from app.models.hmm import ForwardMessage
from app.services.hmm_service import bayes_update
from app.utils.exceptions import ParameterError
from app.utils.validators import validate_dimension


@dataclass
class SpmvCounter:
    """Counts multiply-adds performed by the instrumented spmv path."""

    multiply_adds: int = 0
    calls: int = 0


# -------------------------------------------------
# CONVERSION
# -------------------------------------------------
def csr_from_dense(m: np.ndarray, zero_tol: float | None = None) -> CsrMatrix:
    """
    Keep entries with |value| > zero_tol, row by row, columns ascending.
    zero_tol defaults to 0: top-p writes exact zeros.
    """
    zero_tol = settings.ZERO_TOL if zero_tol is None else zero_tol
    if zero_tol < 0:
        raise ParameterError(f"zero_tol must be >= 0, got {zero_tol}")

    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ParameterError(f"expected a 2-D matrix, got {m.ndim} dimensions")

    keep = np.abs(m) > zero_tol
    rows, cols = np.nonzero(keep)  # row-major, so columns ascend inside a row
    row_starts = np.zeros(m.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=m.shape[0]), out=row_starts[1:])

    return CsrMatrix(
        n_rows=m.shape[0],
        n_cols=m.shape[1],
        row_starts=row_starts,
        cols=cols,
        vals=m[rows, cols],
    )


def densify(m: CsrMatrix) -> np.ndarray:
    out = np.zeros(m.shape)
    rows = np.repeat(np.arange(m.n_rows), np.diff(m.row_starts))
    out[rows, m.cols] = m.vals
    return out


# -------------------------------------------------
# MULTIPLICATION
# -------------------------------------------------
def spmv(m: CsrMatrix, v: np.ndarray, counter: SpmvCounter | None = None) -> np.ndarray:
    """
    y[i] = sum of x * v[c] over the (c, x) tuples of row i.

    Without a counter the product runs on the scipy kernel over the same
    buffers. With one, rows are walked tuple by tuple and every stored
    entry is counted as one multiply-add.
    """
    v = np.asarray(v, dtype=np.float64)
    validate_dimension(v.size, m.n_cols, "spmv vector")

    if counter is None:
        return m.kernel @ v

    out = np.zeros(m.n_rows)
    for i in range(m.n_rows):
        total = 0.0
        for c, x in m.row(i):
            total += x * v[c]
            counter.multiply_adds += 1
        out[i] = total
    counter.calls += 1
    return out


def advance_vector(t_csr: CsrMatrix, v: np.ndarray) -> np.ndarray:
    """Sparse forward update followed by renormalization against drift."""
    out = t_csr.kernel @ v
    return out / out.sum()


def sparse_filter_vector(t_csr: CsrMatrix, b_csr: CsrMatrix, v: np.ndarray, obs: int, time: int | None = None) -> np.ndarray:
    return bayes_update(b_csr.row_dense(obs), t_csr.kernel @ v, obs, time)


# -------------------------------------------------
# INFERENCE STEPS
# -------------------------------------------------
def sparse_predict_step(t_csr: CsrMatrix, msg: ForwardMessage) -> ForwardMessage:
    validate_dimension(msg.dist.size, t_csr.n_cols, "forward message")
    return ForwardMessage(
        dist=Distribution(advance_vector(t_csr, msg.dist.probs)),
        time=msg.time + 1,
    )


def sparse_observation_distribution(b_csr: CsrMatrix, msg: ForwardMessage) -> Distribution:
    validate_dimension(msg.dist.size, b_csr.n_cols, "forward message")
    return Distribution(spmv(b_csr, msg.dist.probs))


def sparse_filter_step(t_csr: CsrMatrix, b_csr: CsrMatrix, msg: ForwardMessage, obs: int) -> ForwardMessage:
    validate_dimension(msg.dist.size, t_csr.n_cols, "forward message")
    if not (0 <= obs < b_csr.n_rows):
        raise ParameterError(f"observation id must be in [0, {b_csr.n_rows}), got {obs}")

    posterior = sparse_filter_vector(t_csr, b_csr, msg.dist.probs, obs, msg.time + 1)
    return ForwardMessage(dist=Distribution(posterior), time=msg.time + 1)
