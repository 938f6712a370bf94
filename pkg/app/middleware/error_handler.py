import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException

from app.utils.exceptions import (
    BoundViolationError,
    DegenerateEvidenceError,
    ModelFileError,
    ParameterError,
    TopPError,
)

logger = logging.getLogger(__name__)

# most specific first; the first match wins
STATUS_BY_ERROR: list[tuple[type[TopPError], int]] = [
    (DegenerateEvidenceError, 409),
    (BoundViolationError, 500),
    (ParameterError, 422),
    (ModelFileError, 422),
]


def status_for(exc: TopPError) -> int:
    for error_type, status_code in STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status_code
    return 500


def register_exception_handlers(app: FastAPI):
    """
    Register global exception handlers
    """

    # -----------------------------------------
    # HTTP Exceptions (raised via HTTPException)
    # -----------------------------------------
    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(
        request: Request,
        exc: StarletteHTTPException
    ):
        return JSONResponse(
            status_code=exc.status_code,
            content={
                "success": False,
                "message": exc.detail
            }
        )

    # -----------------------------------------
    # Request validation errors (Pydantic)
    # -----------------------------------------
    @app.exception_handler(RequestValidationError)
    async def validation_exception_handler(
        request: Request,
        exc: RequestValidationError
    ):
        return JSONResponse(
            status_code=422,
            content={
                "success": False,
                "message": "Validation error",
                "errors": jsonable_errors(exc)
            }
        )

    # -----------------------------------------
    # Domain errors
    # -----------------------------------------
    @app.exception_handler(TopPError)
    async def topp_exception_handler(
        request: Request,
        exc: TopPError
    ):
        status_code = status_for(exc)
        if status_code >= 500:
            logger.error("%s %s: %s", request.method, request.url.path, exc.message)

        content = {
            "success": False,
            "message": exc.message
        }
        if isinstance(exc, DegenerateEvidenceError):
            content["obs"] = exc.obs
            content["time"] = exc.time

        return JSONResponse(status_code=status_code, content=content)

    # -----------------------------------------
    # Unhandled server errors
    # -----------------------------------------
    @app.exception_handler(Exception)
    async def global_exception_handler(
        request: Request,
        exc: Exception
    ):
        logger.exception("unhandled error on %s %s", request.method, request.url.path)
        return JSONResponse(
            status_code=500,
            content={
                "success": False,
                "message": "Internal server error"
            }
        )


def jsonable_errors(exc: RequestValidationError) -> list[dict]:
    # ctx may carry the raw ValueError raised inside a validator
    return [
        {key: value for key, value in error.items() if key != "ctx"}
        for error in exc.errors()
    ]
