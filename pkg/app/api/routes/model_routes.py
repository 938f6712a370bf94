from fastapi import APIRouter

from app.schemas.analysis_schema import (
    AnalysisReport,
    AnalyzeRequest,
    TruncateRequest,
    TruncateResponse,
)
from app.schemas.generator_schema import GenerateRequest
from app.schemas.hmm_schema import HmmDocument, TopPReportSchema
from app.services.model_service import ModelService

router = APIRouter(
    prefix="/api/models",
    tags=["Models"]
)

service = ModelService()

# Endpoints are plain `def`: inference is CPU bound and runs in the threadpool.


# -------------------------------------------------
# GENERATE
# -------------------------------------------------
@router.post("/generate", response_model=HmmDocument)
def generate_model(payload: GenerateRequest):
    model = service.generate(payload)
    return service.repository.to_document(model)


# -------------------------------------------------
# TRUNCATE
# -------------------------------------------------
@router.post("/truncate", response_model=TruncateResponse)
def truncate_model(payload: TruncateRequest):
    model = service.repository.from_document(payload.model)
    topp = service.truncate(model, payload.p)
    return TruncateResponse(
        model=service.repository.top_p_document(topp),
        report=TopPReportSchema.model_validate(topp.report),
    )


# -------------------------------------------------
# ANALYZE
# -------------------------------------------------
@router.post("/analyze", response_model=AnalysisReport)
def analyze_model(payload: AnalyzeRequest):
    model = service.repository.from_document(payload.model)
    return service.analyze(
        model,
        p_values=payload.p_values,
        horizon=payload.horizon,
        contraction_trials=payload.contraction_trials,
    )
