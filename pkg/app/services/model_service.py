import logging
from typing import Optional, Sequence

from app.core.config import settings
from app.models.hmm import Hmm
from app.models.topp_hmm import TopPHmm
from app.repositories.model_repository import ModelRepository
from app.schemas.analysis_schema import AnalysisReport, BoundRow, ContractionSummary
from app.schemas.experiment_schema import ModelSource
from app.schemas.generator_schema import BellSpec, CorpusSpec, GenerateRequest, GeneratorKind
from app.services.analysis_service import check_contraction, error_bounds, minimal_mixing_rate
from app.services.generator_service import (
    hmm_from_corpus,
    make_bell_hmm,
    make_uniform_hmm,
    make_weather_hmm,
)
from app.services.topp_service import build_top_p_hmm

logger = logging.getLogger(__name__)


class ModelService:
    """
    Generate / train / truncate / analyze, shared by the CLI and the API
    """

    def __init__(self, repository: Optional[ModelRepository] = None):
        self.repository = repository or ModelRepository()

    # -------------------------------------------------
    # BUILD
    # -------------------------------------------------
    def generate(self, request: GenerateRequest) -> Hmm:
        if request.kind is GeneratorKind.BELL:
            return make_bell_hmm(
                BellSpec(
                    n_states=request.states,
                    heavy_count=request.heavy_count,
                    heavy_mass=request.heavy_mass,
                    seed=request.seed,
                )
            )
        if request.kind is GeneratorKind.UNIFORM:
            return make_uniform_hmm(request.states)
        return make_weather_hmm()

    def train(self, spec: CorpusSpec) -> Hmm:
        return hmm_from_corpus(spec)

    def load(self, source: ModelSource) -> Hmm:
        if source.path is not None:
            return self.repository.load_hmm(source.path)
        return self.generate(
            GenerateRequest(
                kind=source.generator,
                states=source.states,
                heavy_count=source.heavy_count,
                heavy_mass=source.heavy_mass,
                seed=source.seed,
            )
        )

    def truncate(self, model: Hmm, p: float) -> TopPHmm:
        topp = build_top_p_hmm(model, p)
        logger.info(
            "top-%s: transition sparsity %.5f, observation sparsity %.5f",
            p, topp.report.transition_sparsity, topp.report.observation_sparsity,
        )
        return topp

    # -------------------------------------------------
    # ANALYZE
    # -------------------------------------------------
    def should_compute_gamma(self, n_states: int, force: Optional[bool]) -> bool:
        if force is not None:
            return force
        if n_states > settings.GAMMA_ON_DEMAND_STATES:
            logger.warning(
                "%d states: skipping gamma (enable explicitly, the scan is cubic)", n_states
            )
            return False
        return True

    def analyze(
        self,
        model: Hmm,
        p_values: Sequence[float],
        horizon: int,
        compute_gamma: Optional[bool] = None,
        contraction_trials: int = 0,
        seed: int = 0,
    ) -> AnalysisReport:
        """
        gamma of the original transition drives the mixing bound; the
        truncated model's gamma is listed per p for comparison.
        """
        gamma = None
        with_gamma = self.should_compute_gamma(model.n_states, compute_gamma)
        if with_gamma:
            gamma = minimal_mixing_rate(model.transition)

        rows = []
        for p in p_values:
            truncated_gamma = None
            if with_gamma:
                truncated_gamma = minimal_mixing_rate(
                    build_top_p_hmm(model, p).transition_csr.kernel.toarray()
                )

            linear = error_bounds(p, 0.0).linear_bound(horizon)
            if gamma is None:
                rows.append(BoundRow(p=p, linear_bound=linear, effective_bound=linear))
                continue

            bounds = error_bounds(p, gamma)
            mixing = bounds.mixing_bound if bounds.has_mixing_guarantee else None
            rows.append(
                BoundRow(
                    p=p,
                    mixing_bound=mixing,
                    linear_bound=linear,
                    effective_bound=bounds.effective_bound(horizon),
                    truncated_gamma=truncated_gamma,
                )
            )

        contraction = None
        if contraction_trials > 0:
            contraction = ContractionSummary.model_validate(
                check_contraction(model.transition, contraction_trials, seed)
            )

        note = None
        if gamma is None:
            note = "gamma not computed"
        elif gamma == 0.0:
            note = "no mixing guarantee"

        return AnalysisReport(
            n_states=model.n_states,
            n_obs=model.n_obs,
            horizon=horizon,
            gamma=gamma,
            mixing_guarantee=bool(gamma is not None and gamma > 0.0),
            note=note,
            bounds=rows,
            contraction=contraction,
        )
