"""HTTP face of the registry.

    POST /np                TriG body -> 201 {"uri": ...} | 400 | 422
    GET  /np/{code}         -> TriG | 404
    GET  /np/{code}/template-> code template for a step nanopub
    GET  /search?q=...      -> JSON array of hits
    GET  /list?kind=...     -> JSON array
    POST /query             query text -> {"vars": [...], "rows": [[...]]}
    POST /publish           manifest YAML -> {"uris": [...]}  (server signs)

POST /publish exists for thin clients (the web UI): they edit manifests and
never hold keys, so the server resolves, signs, and publishes on their
behalf using its own profile. It returns 503 when the server runs without
a profile.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path

import yaml
from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .errors import (
    ManifestError,
    NanopubError,
    NotFoundError,
    PlexflowError,
    PublicationError,
    QueryParseError,
    TrigParseError,
)
from .manifest import emit_code_template, parse_step_manifest, parse_workflow_manifest
from .model import step_from_rdf
from .nanopub import URI_PREFIX, Profile
from .query import evaluate, parse_query
from .registry import KINDS, RegistryStore, publish_step, publish_workflow, resolve_manifest

TRIG_MEDIA_TYPE = "application/trig"


def create_app(
    store: RegistryStore,
    profile: Profile | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="plexflow registry", docs_url=None, redoc_url=None)

    @app.post("/np")
    async def post_np(request: Request):
        text = (await request.body()).decode("utf-8")
        try:
            uri = store.publish_text(text)
        except (TrigParseError, NanopubError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        except PublicationError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        return JSONResponse({"uri": uri}, status_code=201)

    @app.get("/np/{code}")
    def get_np(code: str):
        try:
            text = store.fetch_text(URI_PREFIX[: -len("RA")] + code)
        except NotFoundError:
            return JSONResponse({"error": f"unknown nanopub {code}"}, status_code=404)
        return Response(text, media_type=TRIG_MEDIA_TYPE)

    @app.get("/np/{code}/template")
    def get_template(code: str):
        uri = URI_PREFIX[: -len("RA")] + code
        try:
            np = store.fetch(uri)
            step = step_from_rdf(np.assertion, uri + "#step")
        except NotFoundError:
            return JSONResponse({"error": f"unknown nanopub {code}"}, status_code=404)
        except PlexflowError as exc:
            return JSONResponse({"error": f"not a step nanopub: {exc}"}, status_code=400)
        return PlainTextResponse(emit_code_template(step))

    @app.get("/search")
    def search(q: str = Query(default="")):
        return [asdict(hit) for hit in store.search_text(q)]

    @app.get("/list")
    def list_kind(kind: str = Query(default="step")):
        if kind not in KINDS:
            return JSONResponse(
                {"error": f"kind must be one of {', '.join(KINDS)}"}, status_code=400
            )
        return [asdict(hit) for hit in store.list_kind(kind)]

    @app.post("/query")
    async def query(request: Request):
        text = (await request.body()).decode("utf-8")
        try:
            table = evaluate(parse_query(text), store)
        except QueryParseError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return {"vars": list(table.vars), "rows": [list(row) for row in table.rows]}

    @app.post("/publish")
    async def publish_manifest(request: Request):
        if profile is None or not profile.private_key:
            return JSONResponse(
                {"error": "server has no signing profile; publish signed TriG to /np instead"},
                status_code=503,
            )
        text = (await request.body()).decode("utf-8")
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            return JSONResponse({"error": f"invalid YAML: {exc}"}, status_code=400)
        try:
            if isinstance(doc, dict) and "workflow" in doc:
                w = resolve_manifest(parse_workflow_manifest(text), store)
                uris = publish_workflow(w, profile, store)
            elif isinstance(doc, dict) and "step" in doc:
                step = parse_step_manifest(text).to_step()
                uris = [publish_step(step, profile, store)]
            else:
                return JSONResponse(
                    {"error": "manifest must have a top-level 'step' or 'workflow' key"},
                    status_code=400,
                )
        except (ManifestError, NanopubError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        except PublicationError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        return JSONResponse({"uris": uris}, status_code=201)

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
