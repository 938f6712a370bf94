import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.core.config import settings
from app.models.csr import CsrMatrix
from app.models.distribution import Distribution
from app.models.hmm import Hmm
from app.models.topp_hmm import TopPHmm, TopPReport
from app.schemas.hmm_schema import (
    DenseMatrix,
    HmmDocument,
    SparseMatrix,
    TopPBlock,
    TopPReportSchema,
)
from app.services.sparse_service import csr_from_dense, densify
from app.utils.exceptions import ModelFileError, ModelValidationError, ParameterError

logger = logging.getLogger(__name__)


class ModelRepository:
    """
    HMM documents on disk (JSON). Floats are written in their shortest
    round-trip form, so a reload is bit-identical to what was saved.
    """

    # -------------------------------------------------
    # DOCUMENT <-> MODEL
    # -------------------------------------------------
    def to_document(self, model: Hmm, sparse: bool = False) -> HmmDocument:
        return HmmDocument(
            version=settings.MODEL_FILE_VERSION,
            n_states=model.n_states,
            n_obs=model.n_obs,
            state_labels=list(model.state_labels) if model.state_labels else None,
            obs_labels=list(model.obs_labels) if model.obs_labels else None,
            prior=model.prior.probs.tolist(),
            transition=self._block(model.transition, sparse),
            observation=self._block(model.observation, sparse),
        )

    def top_p_document(self, topp: TopPHmm) -> HmmDocument:
        base = topp.base
        return HmmDocument(
            version=settings.MODEL_FILE_VERSION,
            n_states=topp.n_states,
            n_obs=topp.n_obs,
            state_labels=list(base.state_labels) if base.state_labels else None,
            obs_labels=list(base.obs_labels) if base.obs_labels else None,
            prior=topp.prior.probs.tolist(),
            transition=self._sparse_block(topp.transition_csr),
            observation=self._sparse_block(topp.observation_csr),
            top_p=TopPBlock(
                p=topp.p,
                report=TopPReportSchema.model_validate(topp.report),
            ),
        )

    def from_document(self, document: HmmDocument) -> Hmm:
        if document.version != settings.MODEL_FILE_VERSION:
            raise ModelFileError(
                f"unsupported model file version {document.version}"
            )

        transition = self._dense(document.transition, "transition")
        observation = self._dense(document.observation, "observation")

        if transition.shape != (document.n_states, document.n_states):
            raise ModelValidationError(
                f"transition shape {transition.shape} does not match n_states={document.n_states}"
            )
        if observation.shape != (document.n_obs, document.n_states):
            raise ModelValidationError(
                f"observation shape {observation.shape} does not match "
                f"n_obs={document.n_obs}, n_states={document.n_states}"
            )

        return Hmm(
            prior=Distribution(np.array(document.prior)),
            transition=transition,
            observation=observation,
            state_labels=document.state_labels,
            obs_labels=document.obs_labels,
        )

    @staticmethod
    def report_from_document(document: HmmDocument) -> TopPReport | None:
        if document.top_p is None:
            return None
        report = document.top_p.report
        return TopPReport(
            p=report.p,
            transition_sparsity=report.transition_sparsity,
            observation_sparsity=report.observation_sparsity,
            min_kept_mass=report.min_kept_mass,
            per_column_kept_mass=tuple(report.per_column_kept_mass),
            observation_kept_mass=tuple(report.observation_kept_mass),
            prior_kept_mass=report.prior_kept_mass,
        )

    # -------------------------------------------------
    # FILES
    # -------------------------------------------------
    def save_hmm(self, model: Hmm, path: str | Path, sparse: bool = False) -> Path:
        return self._write(self.to_document(model, sparse), path)

    def save_top_p_hmm(self, topp: TopPHmm, path: str | Path) -> Path:
        return self._write(self.top_p_document(topp), path)

    def load_hmm(self, path: str | Path) -> Hmm:
        return self.from_document(self.read_document(path))

    def load_top_p_hmm(self, path: str | Path) -> tuple[Hmm, TopPReport | None]:
        document = self.read_document(path)
        return self.from_document(document), self.report_from_document(document)

    def read_document(self, path: str | Path) -> HmmDocument:
        path = Path(path)
        try:
            raw = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ModelFileError(f"cannot read model file {path}: {exc}") from exc

        try:
            return HmmDocument.model_validate_json(raw)
        except ValidationError as exc:
            raise ModelFileError(f"malformed model file {path}: {exc}") from exc

    def _write(self, document: HmmDocument, path: str | Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(document.model_dump_json(indent=1) + "\n", encoding="utf-8")
        except OSError as exc:
            raise ModelFileError(f"cannot write model file {path}: {exc}") from exc

        logger.info("wrote %s (%d states, %d observations)", path, document.n_states, document.n_obs)
        return path

    # -------------------------------------------------
    # BLOCKS
    # -------------------------------------------------
    def _block(self, matrix: np.ndarray, sparse: bool):
        if sparse:
            return self._sparse_block(csr_from_dense(matrix))
        return DenseMatrix(rows=matrix.tolist())

    @staticmethod
    def _sparse_block(csr: CsrMatrix) -> SparseMatrix:
        return SparseMatrix(
            n_rows=csr.n_rows,
            n_cols=csr.n_cols,
            row_starts=csr.row_starts.tolist(),
            cols=csr.cols.tolist(),
            vals=csr.vals.tolist(),
        )

    @staticmethod
    def _dense(block: DenseMatrix | SparseMatrix, name: str) -> np.ndarray:
        if isinstance(block, DenseMatrix):
            rows = block.rows
            if not rows or len({len(row) for row in rows}) != 1:
                raise ModelValidationError(f"{name} rows must be non-empty and equally long")
            return np.array(rows, dtype=np.float64)

        try:
            csr = CsrMatrix(
                n_rows=block.n_rows,
                n_cols=block.n_cols,
                row_starts=np.array(block.row_starts, dtype=np.int64),
                cols=np.array(block.cols, dtype=np.int64),
                vals=np.array(block.vals, dtype=np.float64),
            )
        except ParameterError as exc:
            raise ModelValidationError(f"{name}: {exc.message}") from exc
        return densify(csr)
