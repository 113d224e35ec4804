"""HTTP JSON API over the engine, for the companion web UI and other clients.

One endpoint per interaction: profile creation/lookup, live suggestions,
dual search, proposal validation, history, engine listing, and evaluation
runs. Error bodies are always {"code", "message"}; stack traces never reach
the wire.
"""
from __future__ import annotations

import os
from typing import Sequence

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .context_store import ContextStore
from .errors import (
    IllegalTransition,
    InvalidField,
    MalformedProviderResponse,
    MalformedRecord,
    MalformedScenarioFile,
    PresyError,
    ProviderUnavailable,
    UnknownEntry,
    UnknownProfile,
    UnknownProvider,
    UnsupportedLanguage,
    WrongRowCount,
)
from .evaluation_harness import EvaluationScenario, report_to_json, run_suite
from .reformulation_engine import suggest
from .search_gateway import DEFAULT_RESULT_LIMIT, ProviderRegistry, dual_search

ADDR_ENV = "PRESY_ADDR"
DEFAULT_ADDR = "127.0.0.1:8750"
CORS_ENV = "PRESY_CORS_ORIGINS"

_STATUS_BY_ERROR = {
    UnknownProfile: 404,
    UnknownEntry: 404,
    UnknownProvider: 404,
    InvalidField: 400,
    UnsupportedLanguage: 400,
    MalformedRecord: 400,
    MalformedScenarioFile: 400,
    WrongRowCount: 400,
    IllegalTransition: 409,
    ProviderUnavailable: 502,
    MalformedProviderResponse: 502,
}


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(
    store: ContextStore,
    registry: ProviderRegistry,
    cors_origins: Sequence[str] | None = None,
) -> FastAPI:
    app = FastAPI(title="presy", docs_url=None, redoc_url=None)
    if cors_origins is None:
        cors_origins = os.environ.get(CORS_ENV, "*").split(",")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.registry = registry

    @app.exception_handler(PresyError)
    async def _domain_error(_request: Request, exc: PresyError) -> JSONResponse:
        status = next(
            (code for cls, code in _STATUS_BY_ERROR.items() if isinstance(exc, cls)), 400
        )
        return _error_response(status, exc.code, str(exc))

    def _profile_payload(profile_id: str) -> dict:
        profile = store.get_profile(profile_id)
        entries = store.query_entries(profile_id, "", {"proposed", "validated", "rejected"})
        payload = profile.to_dict()
        payload["entries"] = [entry.to_dict() for entry in entries]
        return payload

    @app.post("/profiles")
    def create_profile(body: dict) -> JSONResponse:
        idempotency_key = body.get("idempotency_key")
        if not idempotency_key or not isinstance(idempotency_key, str):
            return _error_response(400, "missing_idempotency_key", "profile creation needs an idempotency_key")
        if "language" not in body:
            return _error_response(400, "missing_field", "language is required")
        if "age" not in body:
            return _error_response(400, "missing_field", "age is required")
        profile = store.create_profile(
            age=body["age"],
            sex=body.get("sex", "unspecified"),
            language=body["language"],
            domains=body.get("domains", []),
            specialty=body.get("specialty", ""),
            profession=body.get("profession", ""),
            study_level=body.get("study_level", "unspecified"),
            idempotency_key=idempotency_key,
        )
        return JSONResponse(status_code=201, content=_profile_payload(profile.id))

    @app.get("/profiles/{profile_id}")
    def get_profile(profile_id: str) -> dict:
        return _profile_payload(profile_id)

    @app.get("/profiles/{profile_id}/suggest")
    def get_suggestions(profile_id: str, q: str | None = None, limit: int = 10):
        if q is None:
            return _error_response(400, "missing_query", "query parameter 'q' is required")
        if limit < 1:
            return _error_response(400, "invalid_limit", "limit must be >= 1")
        store.get_profile(profile_id)  # 404 before any work
        if not q.strip():
            return {"query": q, "suggestions": []}
        suggestions = suggest(store, profile_id, q, limit)
        return {"query": q, "suggestions": [s.to_dict() for s in suggestions]}

    @app.post("/profiles/{profile_id}/search")
    def post_search(profile_id: str, body: dict):
        query = body.get("query")
        engine = body.get("engine")
        mode = body.get("mode", "off")
        if not isinstance(query, str) or not query.strip():
            return _error_response(400, "missing_query", "body field 'query' is required")
        if not isinstance(engine, str) or not engine:
            return _error_response(400, "missing_engine", "body field 'engine' is required")
        if mode not in ("off", "auto", "manual"):
            return _error_response(400, "invalid_mode", "mode must be off, auto, or manual")
        limit = body.get("limit", DEFAULT_RESULT_LIMIT)
        provider = registry.get(engine)
        result = dual_search(
            store,
            profile_id,
            query,
            provider,
            mode=mode,
            terms=body.get("terms"),
            limit=limit,
        )
        return result.to_dict()

    @app.post("/profiles/{profile_id}/context/validate")
    def post_validate(profile_id: str, body: list[dict]):
        store.get_profile(profile_id)
        results = []
        for item in body:
            entry_id = item.get("entry_id", "")
            decision = item.get("decision", "")
            try:
                entry = store.get_entry(entry_id)
                if entry.profile_id != profile_id:
                    raise UnknownEntry(f"entry {entry_id!r} does not belong to this profile")
                updated = store.set_entry_status(entry_id, decision)
                results.append({"entry_id": entry_id, "status": updated.status})
            except (UnknownEntry, IllegalTransition, InvalidField) as exc:
                results.append({"entry_id": entry_id, "code": exc.code, "message": str(exc)})
        return {"results": results}

    @app.get("/profiles/{profile_id}/history")
    def get_history(profile_id: str) -> dict:
        records = store.read_history(profile_id)
        return {"records": [record.to_dict() for record in records]}

    @app.get("/engines")
    def get_engines() -> dict:
        return {"engines": registry.list()}

    @app.post("/eval/run")
    def post_eval_run(body: dict) -> Response:
        engine = body.get("engine")
        profile_id = body.get("profile_id")
        if not engine:
            return _error_response(400, "missing_engine", "body field 'engine' is required")
        if not profile_id:
            return _error_response(400, "missing_profile", "body field 'profile_id' is required")
        raw = body.get("scenarios")
        if not isinstance(raw, list):
            return _error_response(400, "malformed_scenarios", "body field 'scenarios' must be a list")
        scenarios = [
            EvaluationScenario(
                id=str(item.get("id", "")),
                query=str(item.get("query", "")),
                category=str(item.get("class", "")),
                judgments={str(k): bool(v) for k, v in item.get("judgments", {}).items()},
            )
            for item in raw
        ]
        provider = registry.get(engine)
        modes = body.get("modes", ["without", "with"])
        report = run_suite(store, scenarios, provider, profile_id, modes)
        return Response(content=report_to_json(report), media_type="application/json")

    return app


def parse_addr(addr: str | None = None) -> tuple[str, int]:
    """Split host:port from the argument or the PRESY_ADDR env var."""
    addr = addr or os.environ.get(ADDR_ENV, DEFAULT_ADDR)
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"bad listen address {addr!r}; expected host:port")
    return host, int(port)
