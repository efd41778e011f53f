"""Registry access for the CLI: an embedded local store or a remote service.

`open_registry` accepts either a filesystem path (embedded store, the
default) or an http(s) URL (remote service). Both results satisfy the
publish/fetch surface the publication flows need; `run_query` dispatches a
query to whichever side can evaluate it.
"""

from __future__ import annotations

import json

import httpx

from .errors import NotFoundError, PublicationError, QueryParseError, RegistryError
from .nanopub import Nanopub, nanopub_from_dataset
from .query import ResultTable, evaluate, parse_query
from .rdf import parse_trig, serialize_trig
from .registry import RegistryStore, SearchHit
from .server import TRIG_MEDIA_TYPE


class HttpRegistry:
    """Thin client for a remote registry service."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self._http = httpx.Client(base_url=self.base_url, timeout=timeout)

    def _code(self, uri: str) -> str:
        return uri.split("#", 1)[0].rsplit("/", 1)[1]

    def publish(self, np: Nanopub) -> str:
        return self.publish_text(serialize_trig(np.to_dataset()))

    def publish_text(self, text: str) -> str:
        response = self._http.post("/np", content=text, headers={"content-type": TRIG_MEDIA_TYPE})
        if response.status_code != 201:
            raise PublicationError(f"registry refused publication: {_error(response)}")
        return response.json()["uri"]

    def fetch_text(self, uri: str) -> str:
        response = self._http.get(f"/np/{self._code(uri)}")
        if response.status_code == 404:
            raise NotFoundError(f"not in registry: {uri}")
        response.raise_for_status()
        return response.text

    def fetch(self, uri: str) -> Nanopub:
        return nanopub_from_dataset(parse_trig(self.fetch_text(uri)))

    def fetch_template(self, uri: str) -> str:
        response = self._http.get(f"/np/{self._code(uri)}/template")
        if response.status_code == 404:
            raise NotFoundError(f"not in registry: {uri}")
        if response.status_code != 200:
            raise RegistryError(_error(response))
        return response.text

    def search_text(self, q: str) -> list[SearchHit]:
        response = self._http.get("/search", params={"q": q})
        response.raise_for_status()
        return [SearchHit(**hit) for hit in response.json()]

    def list_kind(self, kind: str) -> list[SearchHit]:
        response = self._http.get("/list", params={"kind": kind})
        response.raise_for_status()
        return [SearchHit(**hit) for hit in response.json()]

    def query_table(self, text: str) -> ResultTable:
        response = self._http.post("/query", content=text)
        if response.status_code == 400:
            raise QueryParseError(_error(response), 0)
        response.raise_for_status()
        doc = response.json()
        return ResultTable(vars=tuple(doc["vars"]), rows=tuple(tuple(r) for r in doc["rows"]))

    def close(self):
        self._http.close()


def _error(response: httpx.Response) -> str:
    try:
        return response.json()["error"]
    except (json.JSONDecodeError, KeyError):
        return f"HTTP {response.status_code}"


def run_query(registry, text: str) -> ResultTable:
    if isinstance(registry, HttpRegistry):
        return registry.query_table(text)
    return evaluate(parse_query(text), registry)


def open_registry(spec: str) -> RegistryStore | HttpRegistry:
    if spec.startswith("http://") or spec.startswith("https://"):
        return HttpRegistry(spec)
    return RegistryStore(spec)
