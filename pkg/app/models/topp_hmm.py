from dataclasses import dataclass

from app.models.csr import CsrMatrix
from app.models.distribution import Distribution
from app.models.hmm import Hmm


@dataclass(frozen=True)
class TopPReport:
    """
    Truncation statistics. Sparsity is the share of zero entries;
    kept masses are the accumulated P(Y) of every truncated column.
    """

    p: float
    transition_sparsity: float
    observation_sparsity: float
    min_kept_mass: float
    per_column_kept_mass: tuple[float, ...]
    observation_kept_mass: tuple[float, ...] = ()
    prior_kept_mass: float = 1.0


@dataclass(frozen=True, eq=False)
class TopPHmm:
    """
    Top-p HMM of `base`: prior, every transition column and every
    observation column replaced by its top-p distribution. Matrices are
    held in CSR with the same orientation as the dense model, so
    spmv(transition_csr, v) is the forward update and row `o` of
    observation_csr is the likelihood vector of observation o.
    """

    base: Hmm
    p: float
    prior: Distribution
    transition_csr: CsrMatrix
    observation_csr: CsrMatrix
    report: TopPReport

    @property
    def n_states(self) -> int:
        return self.transition_csr.n_rows

    @property
    def n_obs(self) -> int:
        return self.observation_csr.n_rows

    def as_hmm(self) -> Hmm:
        return Hmm(
            prior=self.prior,
            transition=self.transition_csr.kernel.toarray(),
            observation=self.observation_csr.kernel.toarray(),
            state_labels=self.base.state_labels,
            obs_labels=self.base.obs_labels,
        )
