import logging

import numpy as np

from app.models.csr import CsrMatrix
from app.models.distribution import Distribution
from app.models.hmm import ForwardMessage, Hmm
from app.models.topp_hmm import TopPHmm, TopPReport
from app.services.dist_service import truncate_vector
from app.services.sparse_service import csr_from_dense
from app.utils.validators import validate_p

logger = logging.getLogger(__name__)


def truncate_columns(matrix: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Top-p applied independently to every column; returns (matrix, kept masses)."""
    out = np.zeros_like(matrix)
    kept_mass = np.empty(matrix.shape[1])

    for j in range(matrix.shape[1]):
        out[:, j], kept_mass[j], _ = truncate_vector(matrix[:, j], p)

    return out, kept_mass


def build_top_p_hmm(model: Hmm, p: float) -> TopPHmm:
    """
    Replace the prior, each transition column and each observation
    column by its top-p distribution and store the matrices in CSR.
    """
    p = validate_p(p)

    prior, prior_mass, _ = truncate_vector(model.prior.probs, p)
    transition, transition_mass = truncate_columns(model.transition, p)
    observation, observation_mass = truncate_columns(model.observation, p)

    transition_csr = csr_from_dense(transition)
    observation_csr = csr_from_dense(observation)

    report = TopPReport(
        p=p,
        transition_sparsity=sparsity(transition_csr),
        observation_sparsity=sparsity(observation_csr),
        min_kept_mass=float(min(transition_mass.min(), observation_mass.min())),
        per_column_kept_mass=tuple(float(x) for x in transition_mass),
        observation_kept_mass=tuple(float(x) for x in observation_mass),
        prior_kept_mass=prior_mass,
    )

    logger.debug(
        "top-%s model: %d states, transition sparsity %.5f, observation sparsity %.5f",
        p, model.n_states, report.transition_sparsity, report.observation_sparsity,
    )

    return TopPHmm(
        base=model,
        p=p,
        prior=Distribution(prior),
        transition_csr=transition_csr,
        observation_csr=observation_csr,
        report=report,
    )


def sparsity(m: CsrMatrix) -> float:
    """Share of zero entries."""
    return 1.0 - m.nnz / (m.n_rows * m.n_cols)


def truncate_message(msg: ForwardMessage, p: float) -> ForwardMessage:
    """Message-truncation mode: top-p of the forward message, same time."""
    p = validate_p(p)
    truncated, _, _ = truncate_vector(msg.dist.probs, p)
    return ForwardMessage(dist=Distribution(truncated), time=msg.time)
