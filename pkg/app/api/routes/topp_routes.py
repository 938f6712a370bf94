from fastapi import APIRouter

from app.models.distribution import Distribution
from app.schemas.analysis_schema import (
    TopPRequest,
    TopPResponse,
    TotalVariationRequest,
    TotalVariationResponse,
)
from app.services.dist_service import top_p_distribution, top_p_set, total_variation

router = APIRouter(
    prefix="/api/topp",
    tags=["Top-p"]
)


# -------------------------------------------------
# TOP-P DISTRIBUTION
# -------------------------------------------------
@router.post("/distribution", response_model=TopPResponse)
def truncate_distribution(payload: TopPRequest):
    dist = Distribution(payload.probs)
    result = top_p_distribution(dist, payload.p)
    return TopPResponse(
        distribution=result.distribution.probs.tolist(),
        kept_mass=result.kept_mass,
        kept_indices=list(result.kept_indices),
        top_p_set=list(top_p_set(dist, payload.p)),
    )


# -------------------------------------------------
# TOTAL VARIATION
# -------------------------------------------------
@router.post("/total-variation", response_model=TotalVariationResponse)
def distance(payload: TotalVariationRequest):
    return TotalVariationResponse(
        tv=total_variation(Distribution(payload.a), Distribution(payload.b))
    )
