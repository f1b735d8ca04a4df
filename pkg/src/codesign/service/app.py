"""FastAPI application wrapping the codesign engine."""

from __future__ import annotations

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from ..analysis import critical_path, find_spofs, propagate
from ..errors import (
    AgentError,
    AnalysisError,
    BackendUnavailableError,
    CodesignError,
    ModelError,
    NameCollisionError,
    UnknownNodeRefError,
)
from ..ir import verbalize
from ..model import model_to_xml, to_dot
from ..mutation import replicate_node
from .schemas import (
    ChatRequest,
    ChatResponse,
    HealthResponse,
    HistoryResponse,
    PropagateRequest,
    ReplicateRequest,
    ReplicateResponse,
)
from .state import ServiceConfig, ServiceState


def _status_for(exc: CodesignError) -> int:
    if isinstance(exc, UnknownNodeRefError):
        return 404
    if isinstance(exc, NameCollisionError):
        return 409
    if isinstance(exc, BackendUnavailableError):
        return 502
    if isinstance(exc, (ModelError, AnalysisError, AgentError)):
        return 400
    return 500


def create_app(config: ServiceConfig) -> FastAPI:
    state = ServiceState(config)
    app = FastAPI(title="codesign", version="0.1.0")
    app.state.engine = state

    @app.exception_handler(CodesignError)
    async def codesign_error_handler(request: Request, exc: CodesignError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": {"type": type(exc).__name__, "message": str(exc)}},
        )

    @app.get("/api/health", response_model=HealthResponse)
    def health():
        model = state.document.model
        return HealthResponse(
            status="ok",
            revision=model.revision,
            nodes=len(model.nodes),
            backend=config.backend,
        )

    @app.get("/api/model")
    def get_model(format: str = Query("json", pattern="^(ir|dot|json|xml)$")):
        model = state.document.model
        if format == "ir":
            return PlainTextResponse(verbalize(model).text)
        if format == "dot":
            return PlainTextResponse(to_dot(model))
        if format == "xml":
            return Response(model_to_xml(model), media_type="application/xml")
        return model.to_json_dict()

    @app.get("/api/analysis/spof")
    def spof():
        return find_spofs(state.document.model).to_json_dict()

    @app.post("/api/analysis/propagate")
    def run_propagate(body: PropagateRequest):
        return propagate(state.document.model, body.faults).to_json_dict()

    @app.get("/api/analysis/critical-path")
    def run_critical_path(exclude: str = ""):
        names = [n.strip() for n in exclude.split(",") if n.strip()]
        return critical_path(state.document.model, names).to_json_dict()

    @app.post("/api/model/replicate", response_model=ReplicateResponse)
    def replicate(body: ReplicateRequest):
        with state.document.lock:
            model = state.document.model
            before = set(model.node_names())
            new_model = state.document.commit(
                replicate_node(model, body.target, body.copies)
            )
        return ReplicateResponse(
            target=body.target,
            replicas=[n for n in new_model.node_names() if n not in before],
            revision=new_model.revision,
        )

    @app.post("/api/chat", response_model=ChatResponse)
    def chat(body: ChatRequest):
        session, lock = state.session(body.session)
        with lock:
            reply = state.agent.handle(body.prompt, session)
        return ChatResponse(
            session=body.session,
            response=reply.text,
            result=reply.result,
            trace=reply.trace,
            tool=reply.tool,
            revision=reply.revision,
        )

    @app.get("/api/sessions/{session_id}/history", response_model=HistoryResponse)
    def history(session_id: str):
        session = state.existing_session(session_id)
        if session is None:
            return JSONResponse(
                status_code=404,
                content={
                    "error": {"type": "UnknownSession", "message": session_id}
                },
            )
        return HistoryResponse(
            session=session_id, turns=[t.to_json_dict() for t in session.history]
        )

    if config.static_dir and config.static_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(config.static_dir), html=True), name="ui")
    else:

        @app.get("/")
        def root():
            return {
                "service": "codesign",
                "health": "/api/health",
                "model": "/api/model?format=json|ir|dot|xml",
                "chat": "POST /api/chat",
            }

    return app
