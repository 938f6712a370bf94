from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.core.config import settings
from app.core.logger import configure_logging
from app.middleware.logging_middleware import LoggingMiddleware
from app.middleware.error_handler import register_exception_handlers

# -----------------------------
# ROUTERS
# -----------------------------
from app.api.routes.topp_routes import router as topp_router
from app.api.routes.model_routes import router as model_router

from dotenv import load_dotenv
load_dotenv()

VERSION = "1.0.0"


def create_app() -> FastAPI:
    configure_logging()

    app = FastAPI(
        title="Top-p HMM API",
        description="Top-p truncation, sparse inference and error bounds for hidden Markov models",
        version=VERSION
    )

    # -----------------------------
    # CORS
    # -----------------------------
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    # -----------------------------
    # MIDDLEWARE
    # -----------------------------
    app.add_middleware(LoggingMiddleware)

    # -----------------------------
    # EXCEPTION HANDLERS
    # -----------------------------
    register_exception_handlers(app)

    # -----------------------------
    # ROUTERS
    # -----------------------------
    app.include_router(topp_router)
    app.include_router(model_router)

    # -----------------------------
    # HEALTH CHECK
    # -----------------------------
    @app.get("/health", tags=["System"])
    def health_check():
        return {
            "status": "OK",
            "service": "topp-hmm",
            "version": VERSION,
            "environment": settings.ENVIRONMENT
        }

    return app


app = create_app()
