"""Chat-facing HTTP service.

POST /chat runs one message through the pipeline and returns the
decision, trace, and transaction report. Routing state (index, model,
registry) is read-only once serving starts; requests may run
concurrently.
"""

import logging
from contextlib import asynccontextmanager

import uvicorn
from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    EmbeddingProviderError,
    EmptyTextError,
    MisconfigurationError,
)
from .pipeline import Pipeline, PipelineConfig
from .registry import metadata_to_dict

logger = logging.getLogger(__name__)


class ChatRequest(BaseModel):
    message: str


def create_app(pipeline: Pipeline) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        pipeline.close()

    app = FastAPI(title="space control service", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request, exc) -> JSONResponse:
        return JSONResponse({"error": "invalid request body"}, status_code=400)

    @app.post("/chat")
    def chat(request: ChatRequest) -> JSONResponse:
        try:
            response = pipeline.handle_message(request.message)
        except EmptyTextError as exc:
            return JSONResponse(
                {
                    "error": str(exc),
                    "trace": [r.to_dict() for r in (exc.trace or ())],
                },
                status_code=400,
            )
        except EmbeddingProviderError as exc:
            return JSONResponse(
                {"error": f"embedding provider failed: {exc}"}, status_code=502
            )
        except MisconfigurationError as exc:
            logger.error("pipeline misconfiguration: %s", exc)
            return JSONResponse({"error": str(exc)}, status_code=500)
        return JSONResponse(response.to_dict())

    @app.get("/healthz")
    def healthz() -> dict:
        return {
            "status": "ok",
            "exemplars": len(pipeline.index),
            "apis": len(pipeline.registry),
        }

    @app.get("/apis")
    def apis() -> list:
        return [metadata_to_dict(m) for m in pipeline.registry.entries()]

    @app.get("/exemplars")
    def exemplars() -> list:
        return [
            {"record_id": r.record_id, "api_id": r.api_id, "order": r.order}
            for r in pipeline.index.records()
        ]

    return app


def serve(config: PipelineConfig) -> None:
    """Build the pipeline from config and serve until interrupted."""
    pipeline = Pipeline.from_config(config)
    app = create_app(pipeline)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port)
