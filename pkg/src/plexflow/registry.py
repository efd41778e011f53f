"""Publication store, text search, and the N+1 publication flows.

The store keeps one verified nanopub per content-hash URI, optionally
persisted as one TriG file per record under `<dir>/np/<code>.trig` with a
rebuildable token index in `<dir>/index/`. Publication is idempotent:
republishing identical content returns the same URI and leaves the store
unchanged.

Publishing a workflow emits one nanopub per step (its pubinfo introduces
the step; reused steps carry a wasDerivedFrom provenance triple pointing at
their origin) and then one nanopub for the plan referencing the final step
URIs: N+1 publications, in that order. Publishing an execution mirrors
this: one nanopub per activity, then one for the run.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Protocol

from . import vocab
from .errors import IntegrityError, NanopubError, NotFoundError, PublicationError
from .manifest import WorkflowManifest, resolve
from .model import (
    FairStep,
    FairWorkflow,
    WorkflowExecution,
    step_execution_to_rdf,
    step_from_rdf,
    step_to_rdf,
    validate_workflow,
    workflow_execution_to_rdf,
    workflow_from_rdf,
    workflow_to_rdf,
)
from .nanopub import Nanopub, Profile, assemble, nanopub_from_dataset, sign, verify
from .rdf import Dataset, Quad, iri, parse_trig, serialize_trig

_TOKEN_RE = re.compile(r"[a-z0-9]+")

KINDS = ("step", "workflow", "execution", "other")


def _tokens(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.lower()))


@dataclass(frozen=True)
class SearchHit:
    uri: str
    label: str
    kind: str
    description: str
    score: float


def _assertion_summary(np: Nanopub) -> tuple[str, str, str]:
    """(kind, label, description) judged from the assertion's rdf:type quads."""
    types: dict[str, list] = {}
    for q in np.assertion:
        if q.predicate.value == vocab.RDF_TYPE:
            types.setdefault(q.object.value, []).append(q.subject)
    if vocab.PPLAN_PLAN in types:
        kind, subject = "workflow", types[vocab.PPLAN_PLAN][0]
    elif vocab.PPLAN_STEP in types:
        kind, subject = "step", types[vocab.PPLAN_STEP][0]
    elif vocab.PROV_BUNDLE in types:
        kind, subject = "execution", types[vocab.PROV_BUNDLE][0]
    elif vocab.PPLAN_ACTIVITY in types:
        kind, subject = "execution", types[vocab.PPLAN_ACTIVITY][0]
    else:
        return "other", "", ""
    label = ""
    description = ""
    for q in np.assertion:
        if q.subject == subject and q.predicate.value == vocab.RDFS_LABEL:
            label = q.object.value
        elif q.subject == subject and q.predicate.value == vocab.DCT_DESCRIPTION:
            description = q.object.value
    return kind, label, description


class RegistryStore:
    """Single-node nanopub store with a token index and a union dataset."""

    def __init__(self, data_dir: str | Path | None = None):
        self._lock = threading.RLock()
        self._records: dict[str, Nanopub] = {}
        self._texts: dict[str, str] = {}
        self._meta: dict[str, SearchHit] = {}  # score field unused in metadata
        self._index: dict[str, set[str]] = {}
        self._union: Dataset | None = None
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self._load()

    # -- persistence --------------------------------------------------------

    def _np_dir(self) -> Path:
        return self.data_dir / "np"

    def _index_file(self) -> Path:
        return self.data_dir / "index" / "index.json"

    def _load(self) -> None:
        self._np_dir().mkdir(parents=True, exist_ok=True)
        for path in sorted(self._np_dir().glob("*.trig")):
            text = path.read_text()
            np = nanopub_from_dataset(parse_trig(text))
            self._records[np.uri] = np
            self._texts[np.uri] = text
        index_file = self._index_file()
        if index_file.exists():
            try:
                raw = json.loads(index_file.read_text())
                self._index = {t: set(us) for t, us in raw["tokens"].items()}
                self._meta = {
                    u: SearchHit(**m) for u, m in raw["meta"].items() if u in self._records
                }
                if set(self._meta) == set(self._records):
                    return
            except (KeyError, TypeError, ValueError):
                pass
        self.rebuild_index()

    def _save_index(self) -> None:
        if not self.data_dir:
            return
        index_file = self._index_file()
        index_file.parent.mkdir(parents=True, exist_ok=True)
        index_file.write_text(
            json.dumps(
                {
                    "tokens": {t: sorted(us) for t, us in self._index.items()},
                    "meta": {u: asdict(m) for u, m in self._meta.items()},
                },
                indent=2,
                sort_keys=True,
            )
        )

    def rebuild_index(self) -> None:
        """Recompute the token index and metadata from the stored records."""
        with self._lock:
            self._index = {}
            self._meta = {}
            for uri, np in self._records.items():
                self._index_record(uri, np)
            self._save_index()

    def _index_record(self, uri: str, np: Nanopub) -> None:
        kind, label, description = _assertion_summary(np)
        self._meta[uri] = SearchHit(uri=uri, label=label, kind=kind, description=description, score=0.0)
        for token in _tokens(label) | _tokens(description):
            self._index.setdefault(token, set()).add(uri)

    # -- core operations ----------------------------------------------------

    def __len__(self) -> int:
        return len(self._records)

    def uris(self) -> tuple[str, ...]:
        return tuple(self._records)

    def publish(self, np: Nanopub) -> str:
        report = verify(np)
        if not report.ok:
            raise PublicationError(
                "nanopub failed verification:\n" + report.summary(), report=report
            )
        text = serialize_trig(np.to_dataset())
        with self._lock:
            existing = self._texts.get(np.uri)
            if existing is not None:
                if existing == text:
                    return np.uri  # idempotent republication
                raise IntegrityError(f"conflicting content under {np.uri}")
            self._records[np.uri] = np
            self._texts[np.uri] = text
            self._index_record(np.uri, np)
            self._union = None
            if self.data_dir:
                self._np_dir().mkdir(parents=True, exist_ok=True)
                code = np.uri.rsplit("/", 1)[1]
                (self._np_dir() / f"{code}.trig").write_text(text)
                self._save_index()
        return np.uri

    def publish_text(self, text: str) -> str:
        """Publish a TriG document (the HTTP POST /np path)."""
        np = nanopub_from_dataset(parse_trig(text))
        return self.publish(np)

    def fetch(self, uri: str) -> Nanopub:
        np = self._records.get(uri)
        if np is None:
            raise NotFoundError(f"not in registry: {uri}")
        return np

    def fetch_text(self, uri: str) -> str:
        text = self._texts.get(uri)
        if text is None:
            raise NotFoundError(f"not in registry: {uri}")
        return text

    def search_text(self, q: str) -> list[SearchHit]:
        query_tokens = _tokens(q)
        if not query_tokens:
            return []
        scores: dict[str, int] = {}
        for token in query_tokens:
            for uri in self._index.get(token, ()):
                scores[uri] = scores.get(uri, 0) + 1
        hits = [
            SearchHit(
                uri=uri,
                label=self._meta[uri].label,
                kind=self._meta[uri].kind,
                description=self._meta[uri].description,
                score=float(score),
            )
            for uri, score in scores.items()
        ]
        hits.sort(key=lambda h: (-h.score, h.label, h.uri))
        return hits

    def list_kind(self, kind: str) -> list[SearchHit]:
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        hits = [m for m in self._meta.values() if m.kind == kind]
        hits.sort(key=lambda h: (h.label, h.uri))
        return hits

    def union_dataset(self) -> Dataset:
        """Union of every graph of every stored nanopub (query substrate)."""
        with self._lock:
            if self._union is None:
                self._union = Dataset.union(
                    [np.to_dataset() for np in self._records.values()]
                )
            return self._union


class RegistryClient(Protocol):
    """What the publication flows need; satisfied by RegistryStore and the HTTP client."""

    def publish(self, np: Nanopub) -> str: ...

    def fetch(self, uri: str) -> Nanopub: ...


# ---------------------------------------------------------------------------
# Publication flows
# ---------------------------------------------------------------------------


def _temp_uri() -> str:
    return f"http://purl.org/np/temp/{uuid.uuid4().hex}"


def publish_step(
    step: FairStep, profile: Profile, registry: RegistryClient, at: datetime | None = None
) -> str:
    """Publish one step nanopub; returns the nanopub URI (step IRI is uri#step)."""
    temp = _temp_uri()
    assertion = step_to_rdf(step, temp)
    provenance = []
    if step.derived_from:
        provenance.append(
            (iri(temp + "#assertion"), iri(vocab.PROV_DERIVED_FROM), iri(step.derived_from))
        )
    pubinfo = [(iri(temp), iri(vocab.NPX_INTRODUCES), iri(temp + "#step"))]
    np = sign(assemble(assertion, provenance, pubinfo, profile, temp_uri=temp, at=at), profile)
    return registry.publish(np)


def publish_workflow(
    w: FairWorkflow, profile: Profile, registry: RegistryClient, at: datetime | None = None
) -> list[str]:
    """Publish each step, then the plan: N+1 URIs in publication order."""
    validate_workflow(w)
    published: list[str] = []
    step_uris: dict[str, str] = {}
    try:
        for sid, step in w.steps.items():
            np_uri = publish_step(step, profile, registry, at=at)
            published.append(np_uri)
            step_uris[sid] = np_uri + "#step"
        temp = _temp_uri()
        assertion = workflow_to_rdf(w, temp, step_uris)
        pubinfo = [(iri(temp), iri(vocab.NPX_INTRODUCES), iri(temp + "#plan"))]
        np = sign(assemble(assertion, (), pubinfo, profile, temp_uri=temp, at=at), profile)
        published.append(registry.publish(np))
    except Exception as exc:
        raise PublicationError(
            f"workflow publication aborted after {len(published)} of "
            f"{len(w.steps) + 1} nanopubs: {exc}",
            report=published,
        ) from exc
    return published


def publish_retroprov(
    e: WorkflowExecution, profile: Profile, registry: RegistryClient, at: datetime | None = None
) -> list[str]:
    """Publish one nanopub per step execution plus one for the run: N+1 URIs."""
    plan_np = e.plan_uri.split("#", 1)[0]
    try:
        registry.fetch(plan_np)
    except NotFoundError:
        raise PublicationError(f"plan is not published: {e.plan_uri}")
    published: list[str] = []
    activity_uris: list[str] = []
    try:
        for se in e.step_executions:
            temp = _temp_uri()
            assertion = step_execution_to_rdf(se, temp)
            pubinfo = [(iri(temp), iri(vocab.NPX_INTRODUCES), iri(temp + "#activity"))]
            np = sign(assemble(assertion, (), pubinfo, profile, temp_uri=temp, at=at), profile)
            np_uri = registry.publish(np)
            published.append(np_uri)
            activity_uris.append(np_uri + "#activity")
        temp = _temp_uri()
        assertion = workflow_execution_to_rdf(e, temp, activity_uris)
        pubinfo = [(iri(temp), iri(vocab.NPX_INTRODUCES), iri(temp + "#execution"))]
        np = sign(assemble(assertion, (), pubinfo, profile, temp_uri=temp, at=at), profile)
        published.append(registry.publish(np))
    except PublicationError:
        raise
    except Exception as exc:
        raise PublicationError(
            f"retrospective publication aborted after {len(published)} of "
            f"{len(e.step_executions) + 1} nanopubs: {exc}",
            report=published,
        ) from exc
    return published


# ---------------------------------------------------------------------------
# Fetch-and-reconstruct flows
# ---------------------------------------------------------------------------


def _verified(np: Nanopub) -> Nanopub:
    report = verify(np)
    if not report.ok:
        raise PublicationError(f"fetched nanopub fails verification: {np.uri}", report=report)
    return np


def fetch_step(registry: RegistryClient, uri: str) -> FairStep:
    """Fetch and verify a step nanopub; accepts the nanopub URI or uri#step."""
    np_uri, _, fragment = uri.partition("#")
    np = _verified(registry.fetch(np_uri))
    step_iri = f"{np_uri}#{fragment}" if fragment else f"{np_uri}#step"
    return step_from_rdf(np.assertion, step_iri)


def fetch_workflow(registry: RegistryClient, uri: str) -> FairWorkflow:
    """Fetch a plan plus its member steps and reassemble the workflow."""
    np_uri, _, fragment = uri.partition("#")
    np = _verified(registry.fetch(np_uri))
    plan_iri = f"{np_uri}#{fragment}" if fragment else f"{np_uri}#plan"
    quads: list[Quad] = list(np.assertion)
    for q in np.assertion:
        if q.predicate.value == vocab.PPLAN_IS_STEP_OF_PLAN and q.object.value == plan_iri:
            member_np = _verified(registry.fetch(q.subject.value.split("#", 1)[0]))
            quads.extend(member_np.assertion)
    return workflow_from_rdf(quads, plan_iri)


def resolve_manifest(
    m: WorkflowManifest, registry: RegistryClient | None
) -> FairWorkflow:
    """Resolve a workflow manifest, fetching `uses:` steps from the registry."""
    fetcher = (lambda uri: fetch_step(registry, uri)) if registry is not None else None
    return resolve(m, fetch=fetcher)
