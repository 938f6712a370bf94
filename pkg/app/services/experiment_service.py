import logging
from pathlib import Path
from typing import IO, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from app.models.hmm import Hmm
from app.schemas.experiment_schema import (
    CSV_COLUMNS,
    ExperimentConfig,
    ExperimentRecord,
    RecordStatus,
    StepRecord,
    TruncationMode,
)
from app.services.analysis_service import (
    ErrorBounds,
    check_bounds,
    error_bounds,
    minimal_mixing_rate,
    trajectory_from_messages,
)
from app.services.inference_service import (
    ChainRun,
    observation_schedule,
    run_dense_chain,
    run_topp_chain,
)
from app.services.model_service import ModelService
from app.utils.exceptions import BoundViolationError, DegenerateEvidenceError

logger = logging.getLogger(__name__)


class ExperimentService:
    """
    Runs dense exact inference against top-p inference for every p of a
    configuration and collects per-step TV and cumulative timings.
    Configurations run one after another; every timed loop runs on the
    calling thread.
    """

    def __init__(self, model_service: Optional[ModelService] = None):
        self.model_service = model_service or ModelService()

    # -------------------------------------------------
    # RUN
    # -------------------------------------------------
    def run(self, config: ExperimentConfig) -> list[ExperimentRecord]:
        model = self.model_service.load(config.source)
        return self.run_model(config.source.name, model, config)

    def run_model(self, name: str, model: Hmm, config: ExperimentConfig) -> list[ExperimentRecord]:
        gamma = None
        if self.model_service.should_compute_gamma(model.n_states, config.compute_gamma):
            gamma = minimal_mixing_rate(model.transition)

        observations = None
        if config.obs_period is not None:
            observations = observation_schedule(
                model, config.horizon, config.obs_period, config.seed
            )

        dense = self._timed(
            lambda: run_dense_chain(model, config.horizon, observations),
            config.repetitions,
        )

        records = []
        for p in config.p_values:
            records.append(
                self._run_p(name, model, p, config, dense, observations, gamma)
            )
        return records

    def _run_p(
        self,
        name: str,
        model: Hmm,
        p: float,
        config: ExperimentConfig,
        dense: ChainRun,
        observations: Optional[Mapping[int, int]],
        gamma: Optional[float],
    ) -> ExperimentRecord:
        topp = self.model_service.truncate(model, p)
        bounds = error_bounds(p, gamma) if gamma is not None else None

        common = dict(
            model=name,
            p=p,
            mode=config.mode,
            horizon=config.horizon,
            obs_period=config.obs_period,
            seed=config.seed,
            sparsity=topp.report.transition_sparsity,
            gamma=gamma,
            bound_mixing=_mixing(bounds),
            bound_linear=error_bounds(p, 0.0).linear_bound(config.horizon),
        )

        try:
            approx = self._timed(
                lambda: run_topp_chain(topp, config.horizon, observations, config.mode),
                config.repetitions,
            )
        except DegenerateEvidenceError as exc:
            logger.warning("%s top-%s aborted: %s", name, p, exc.message)
            return ExperimentRecord(**common, status=RecordStatus.FAILED, error=exc.message)

        trajectory = trajectory_from_messages(dense.messages, approx.messages)
        check = check_bounds(trajectory, bounds, config.mode, observations is not None)

        note = None
        if not check.mixing_ok:
            note = "mixing bound exceeded"
        elif not check.linear_ok:
            note = f"linear bound exceeded at step {check.worst_linear_step}"

        speedup = dense.total_ms / approx.total_ms if approx.total_ms > 0 else None

        logger.info(
            "%s top-%s (%s): sparsity %.5f, tv_final %.5f, tv_max %.5f, speedup %s",
            name, p, TruncationMode(config.mode).value, topp.report.transition_sparsity,
            trajectory.final, trajectory.maximum,
            f"{speedup:.2f}x" if speedup is not None else "n/a",
        )

        return ExperimentRecord(
            **common,
            steps=[
                StepRecord(
                    step=t,
                    tv=tv,
                    dense_cumulative_ms=float(dense.cumulative_ms[t]),
                    topp_cumulative_ms=float(approx.cumulative_ms[t]),
                )
                for t, tv in trajectory.points
            ],
            tv_final=trajectory.final,
            tv_max=trajectory.maximum,
            tv_mean=trajectory.mean,
            speedup=speedup,
            bounds_ok=check.passed,
            bound_note=note,
        )

    @staticmethod
    def _timed(run, repetitions: int) -> ChainRun:
        """
        One discarded warm-up, then `repetitions` runs; the cumulative
        times are the per-step median. Messages come from the first
        measured run (they are identical across runs).
        """
        run()
        runs = [run() for _ in range(repetitions)]
        cumulative = np.median(np.vstack([r.cumulative_ms for r in runs]), axis=0)
        return ChainRun(messages=runs[0].messages, cumulative_ms=cumulative)

    # -------------------------------------------------
    # CHECKS
    # -------------------------------------------------
    @staticmethod
    def enforce_bounds(records: Sequence[ExperimentRecord]) -> None:
        failed = [r for r in records if not r.bounds_ok]
        if failed:
            first = failed[0]
            raise BoundViolationError(
                f"{first.model} top-{first.p} ({first.mode.value}): {first.bound_note}"
            )

    # -------------------------------------------------
    # CSV
    # -------------------------------------------------
    @staticmethod
    def to_frame(records: Sequence[ExperimentRecord]) -> pd.DataFrame:
        rows = []
        for record in records:
            mode = record.mode.value
            for step in record.steps:
                rows.append({
                    "kind": "step",
                    "model": record.model,
                    "p": record.p,
                    "mode": mode,
                    "step": step.step,
                    "tv": step.tv,
                    "dense_cumulative_ms": step.dense_cumulative_ms,
                    "topp_cumulative_ms": step.topp_cumulative_ms,
                })

            rows.append({
                "kind": "summary",
                "model": record.model,
                "p": record.p,
                "mode": mode,
                "sparsity": record.sparsity,
                "gamma": record.gamma,
                "bound_mixing": record.bound_mixing,
                "bound_linear": record.bound_linear,
                "tv_final": record.tv_final,
                "tv_max": record.tv_max,
                "tv_mean": record.tv_mean,
                "speedup": record.speedup,
                "status": record.status.value,
                "error": record.error,
            })

        frame = pd.DataFrame(rows, columns=CSV_COLUMNS)
        frame["step"] = frame["step"].astype("Int64")
        return frame

    def write_csv(self, records: Sequence[ExperimentRecord], target: Union[str, Path, IO[str]]) -> None:
        self.to_frame(records).to_csv(target, index=False)


def _mixing(bounds: Optional[ErrorBounds]) -> Optional[float]:
    if bounds is None or not bounds.has_mixing_guarantee:
        return None
    return bounds.mixing_bound
