"""Nanopublication assembly, minting, signing, and verification.

A nanopub is four named graphs (head, assertion, provenance, pubinfo) under
one URI. Assembly builds the structure against a throwaway placeholder URI;
minting derives the final URI from a SHA-256 over the canonical N-Quads form
with the placeholder masked out, so the identifier is a pure function of
content. Signing happens after minting: the Ed25519 signature covers the
same canonical bytes and is stored alongside (in the pubinfo graph), not
inside the hash. The signer's public key, by contrast, is written into
pubinfo at assembly time and therefore *is* covered by the hash, which pins
the signing identity to the URI.

This scheme keeps the integrity semantics of trusty URIs (any single-quad
change breaks both the URI check and the signature) without implementing
the official transform chain; it is deliberately not wire-compatible with
the public nanopub server network.
"""

from __future__ import annotations

import base64
import hashlib
import re
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

import yaml
from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from . import vocab
from .errors import CanonicalizationError, NanopubError
from .rdf import Dataset, Quad, Term, canonical_nquads, iri, literal, match
from .timeutil import utc_now, xsd_datetime

URI_PREFIX = "http://purl.org/np/RA"
URI_RE = re.compile(r"^http://purl\.org/np/RA[A-Za-z0-9_-]{43}$")
_ORCID_RE = re.compile(r"^https://orcid\.org/\d{4}-\d{4}-\d{4}-\d{3}[\dX]$")


@dataclass(frozen=True)
class Profile:
    """Signer identity: display name, optional ORCID, Ed25519 keypair."""

    name: str
    orcid: str | None = None
    private_key: bytes = b""  # raw 32-byte seed; empty for verify-only profiles
    public_key: bytes = b""

    def __post_init__(self):
        if self.orcid is not None and not _ORCID_RE.match(self.orcid):
            raise NanopubError(f"not an ORCID IRI: {self.orcid!r}")
        if self.private_key:
            derived = (
                Ed25519PrivateKey.from_private_bytes(self.private_key)
                .public_key()
                .public_bytes_raw()
            )
            if self.public_key and derived != self.public_key:
                raise NanopubError("public key does not match private key")
            if not self.public_key:
                object.__setattr__(self, "public_key", derived)

    @property
    def agent(self) -> Term:
        """IRI standing for the signer in attribution triples."""
        if self.orcid:
            return iri(self.orcid)
        slug = re.sub(r"[^a-z0-9]+", "-", self.name.lower()).strip("-") or "anonymous"
        return iri(f"urn:plex:agent:{slug}")


def generate_profile(name: str, orcid: str | None = None) -> Profile:
    key = Ed25519PrivateKey.generate()
    return Profile(
        name=name,
        orcid=orcid,
        private_key=key.private_bytes_raw(),
        public_key=key.public_key().public_bytes_raw(),
    )


def save_profile(profile: Profile, path: str | Path) -> None:
    """Write profile YAML plus base64 key files next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    private_path = path.with_suffix(".key")
    public_path = path.with_suffix(".pub")
    private_path.write_text(base64.b64encode(profile.private_key).decode() + "\n")
    private_path.chmod(0o600)
    public_path.write_text(base64.b64encode(profile.public_key).decode() + "\n")
    doc = {
        "name": profile.name,
        "orcid": profile.orcid,
        "private_key": private_path.name,
        "public_key": public_path.name,
    }
    path.write_text(yaml.safe_dump(doc, sort_keys=False))


def load_profile(path: str | Path) -> Profile:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise NanopubError(f"profile not found: {path}")
    if not isinstance(doc, dict) or "name" not in doc:
        raise NanopubError(f"malformed profile file: {path}")
    base = path.parent

    def read_key(name: str) -> bytes:
        if not doc.get(name):
            return b""
        return base64.b64decode((base / doc[name]).read_text().strip())

    return Profile(
        name=doc["name"],
        orcid=doc.get("orcid") or None,
        private_key=read_key("private_key"),
        public_key=read_key("public_key"),
    )


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnsignedNanopub:
    temp_uri: str
    head: tuple[Quad, ...]
    assertion: tuple[Quad, ...]
    provenance: tuple[Quad, ...]
    pubinfo: tuple[Quad, ...]

    @property
    def assertion_graph(self) -> Term:
        return iri(self.temp_uri + "#assertion")

    def to_dataset(self) -> Dataset:
        return Dataset(
            self.head + self.assertion + self.provenance + self.pubinfo,
            vocab.STANDARD_PREFIXES,
        )


@dataclass(frozen=True)
class Nanopub:
    uri: str
    head: tuple[Quad, ...]
    assertion: tuple[Quad, ...]
    provenance: tuple[Quad, ...]
    pubinfo: tuple[Quad, ...]
    signature: bytes
    public_key: bytes

    @property
    def assertion_graph(self) -> Term:
        return iri(self.uri + "#assertion")

    def to_dataset(self) -> Dataset:
        return Dataset(
            self.head + self.assertion + self.provenance + self.pubinfo,
            vocab.STANDARD_PREFIXES,
        )


def _section(
    items: Iterable[Quad | tuple[Term, Term, Term]],
    graph: Term,
    reserved: set[str],
) -> list[Quad]:
    out = []
    for item in items:
        if isinstance(item, Quad):
            if item.graph.value not in reserved:
                raise NanopubError(
                    f"quad carries graph {item.graph.value!r} outside the four reserved graphs"
                )
            out.append(item)
        else:
            s, p, o = item
            out.append(Quad(s, p, o, graph))
    return out


def _skolemize(sections: list[list[Quad]], temp_uri: str) -> None:
    mapping: dict[str, Term] = {}

    def convert(t: Term) -> Term:
        if not t.is_blank:
            return t
        if t.value not in mapping:
            mapping[t.value] = iri(f"{temp_uri}#_b{len(mapping) + 1}")
        return mapping[t.value]

    for quads in sections:
        for i, q in enumerate(quads):
            quads[i] = Quad(convert(q.subject), q.predicate, convert(q.object), q.graph)


def assemble(
    assertion: Iterable[Quad | tuple[Term, Term, Term]],
    provenance: Iterable[Quad | tuple[Term, Term, Term]] = (),
    pubinfo_extra: Iterable[Quad | tuple[Term, Term, Term]] = (),
    profile: Profile | None = None,
    temp_uri: str | None = None,
    at: datetime | None = None,
) -> UnsignedNanopub:
    """Build the four-graph structure around an assertion.

    Inputs may be bare (s, p, o) triples, which are homed into the proper
    graph, or full quads whose graph must already be one of the four
    reserved graph IRIs under `temp_uri`. Blank nodes are skolemized to
    `temp_uri#_b<n>` in first-seen order. An empty provenance gains a
    generated-at timestamp for the assertion graph; pubinfo always gains
    attribution, timestamp, and the signer's public key.
    """
    if profile is None:
        raise NanopubError("a profile is required to assemble a nanopub")
    temp_uri = temp_uri or f"http://purl.org/np/temp/{uuid.uuid4().hex}"
    at = at or utc_now()
    np_term = iri(temp_uri)
    graphs = {
        "head": iri(temp_uri + "#Head"),
        "assertion": iri(temp_uri + "#assertion"),
        "provenance": iri(temp_uri + "#provenance"),
        "pubinfo": iri(temp_uri + "#pubinfo"),
    }
    reserved = {g.value for g in graphs.values()}

    assertion_quads = _section(assertion, graphs["assertion"], reserved)
    if not assertion_quads:
        raise NanopubError("assertion must not be empty")
    provenance_quads = _section(provenance, graphs["provenance"], reserved)
    pubinfo_quads = _section(pubinfo_extra, graphs["pubinfo"], reserved)

    if not provenance_quads:
        provenance_quads = [
            Quad(graphs["assertion"], iri(vocab.PROV_GENERATED_AT), xsd_datetime(at), graphs["provenance"])
        ]
    pubinfo_quads += [
        Quad(np_term, iri(vocab.PROV_ATTRIBUTED_TO), profile.agent, graphs["pubinfo"]),
        Quad(np_term, iri(vocab.PROV_GENERATED_AT), xsd_datetime(at), graphs["pubinfo"]),
        Quad(np_term, iri(vocab.PLEX_SIGNED_BY), literal(profile.name), graphs["pubinfo"]),
        Quad(
            np_term,
            iri(vocab.PLEX_HAS_PUBLIC_KEY),
            literal(base64.b64encode(profile.public_key).decode()),
            graphs["pubinfo"],
        ),
    ]

    head = (
        Quad(np_term, iri(vocab.RDF_TYPE), iri(vocab.NP_NANOPUBLICATION), graphs["head"]),
        Quad(np_term, iri(vocab.NP_HAS_ASSERTION), graphs["assertion"], graphs["head"]),
        Quad(np_term, iri(vocab.NP_HAS_PROVENANCE), graphs["provenance"], graphs["head"]),
        Quad(np_term, iri(vocab.NP_HAS_PUBINFO), graphs["pubinfo"], graphs["head"]),
    )

    sections = [assertion_quads, provenance_quads, pubinfo_quads]
    _skolemize(sections, temp_uri)
    return UnsignedNanopub(
        temp_uri=temp_uri,
        head=head,
        assertion=tuple(sections[0]),
        provenance=tuple(sections[1]),
        pubinfo=tuple(sections[2]),
    )


# ---------------------------------------------------------------------------
# Minting and signing
# ---------------------------------------------------------------------------


def _hash_code(canonical: str) -> str:
    digest = hashlib.sha256(canonical.encode("utf-8")).digest()
    return base64.urlsafe_b64encode(digest).decode().rstrip("=")


def mint_uri(u: UnsignedNanopub) -> str:
    """Content-hash URI over the placeholder-masked canonical form."""
    canonical = canonical_nquads(u.to_dataset(), u.temp_uri)
    return URI_PREFIX + _hash_code(canonical)


def _rebase(quads: Sequence[Quad], old: str, new: str) -> tuple[Quad, ...]:
    def swap(t: Term) -> Term:
        if t.is_iri and old in t.value:
            return iri(t.value.replace(old, new))
        if t.is_literal and t.datatype and old in t.datatype:
            return literal(t.value, datatype=t.datatype.replace(old, new), language=t.language)
        return t

    return tuple(Quad(swap(q.subject), swap(q.predicate), swap(q.object), swap(q.graph)) for q in quads)


def sign(u: UnsignedNanopub, profile: Profile) -> Nanopub:
    """Mint the URI, rebase the graphs onto it, and sign the canonical bytes."""
    if not profile.private_key:
        raise NanopubError("profile has no private key")
    uri_value = mint_uri(u)
    head = _rebase(u.head, u.temp_uri, uri_value)
    assertion = _rebase(u.assertion, u.temp_uri, uri_value)
    provenance = _rebase(u.provenance, u.temp_uri, uri_value)
    pubinfo = _rebase(u.pubinfo, u.temp_uri, uri_value)

    payload = canonical_nquads(
        Dataset(head + assertion + provenance + pubinfo), uri_value
    ).encode("utf-8")
    key = Ed25519PrivateKey.from_private_bytes(profile.private_key)
    signature = key.sign(payload)
    pubinfo += (
        Quad(
            iri(uri_value),
            iri(vocab.PLEX_HAS_SIGNATURE),
            literal(base64.b64encode(signature).decode()),
            iri(uri_value + "#pubinfo"),
        ),
    )
    return Nanopub(
        uri=uri_value,
        head=head,
        assertion=assertion,
        provenance=provenance,
        pubinfo=pubinfo,
        signature=signature,
        public_key=profile.public_key,
    )


# ---------------------------------------------------------------------------
# Validation and verification
# ---------------------------------------------------------------------------


def validate_structure(d: Dataset) -> list[str]:
    """Check the four-graph contract; an empty list means valid."""
    violations: list[str] = []
    head_graphs = sorted({q.graph.value for q in match(d, (None, iri(vocab.NP_HAS_ASSERTION), None, None))})
    if not head_graphs:
        violations.append("no head graph (np:hasAssertion missing)")
        return violations
    if len(head_graphs) > 1:
        violations.append(f"multiple head graphs: {', '.join(head_graphs)}")
        return violations
    head_graph = iri(head_graphs[0])
    head = d.graph(head_graph)

    np_subjects = {
        q.subject for q in head
        if q.predicate.value == vocab.RDF_TYPE and q.object.value == vocab.NP_NANOPUBLICATION
    }
    if len(np_subjects) != 1:
        violations.append("head must type exactly one np:Nanopublication subject")
        return violations
    np_term = next(iter(np_subjects))

    refs: dict[str, Term] = {}
    for label, pred in (
        ("assertion", vocab.NP_HAS_ASSERTION),
        ("provenance", vocab.NP_HAS_PROVENANCE),
        ("pubinfo", vocab.NP_HAS_PUBINFO),
    ):
        objects = [q.object for q in head if q.subject == np_term and q.predicate.value == pred]
        if len(objects) != 1 or not objects[0].is_iri:
            violations.append(f"head must reference exactly one {label} graph")
            continue
        refs[label] = objects[0]

    if len(head) != 4:
        violations.append(f"head graph must contain exactly the 4 mandatory triples, found {len(head)}")

    for label, graph_term in refs.items():
        if not d.graph(graph_term):
            violations.append(f"{label} graph {graph_term.value} is referenced but absent or empty")

    known = {head_graph} | set(refs.values())
    for g in d.graph_names():
        if g not in known:
            violations.append(f"unexpected graph {g.value}")
    return violations


def nanopub_from_dataset(d: Dataset) -> Nanopub:
    """Reconstruct a Nanopub from a parsed TriG document."""
    violations = validate_structure(d)
    if violations:
        raise NanopubError("invalid nanopub: " + "; ".join(violations))
    head_quad = match(d, (None, iri(vocab.NP_HAS_ASSERTION), None, None))[0]
    uri_value = head_quad.subject.value
    head_graph = head_quad.graph

    def graph_of(pred: str) -> tuple[tuple[Quad, ...], Term]:
        target = match(d, (None, iri(pred), None, head_graph))[0].object
        return d.graph(target), target

    assertion, _ = graph_of(vocab.NP_HAS_ASSERTION)
    provenance, _ = graph_of(vocab.NP_HAS_PROVENANCE)
    pubinfo, pubinfo_graph = graph_of(vocab.NP_HAS_PUBINFO)

    def b64_field(pred: str) -> bytes:
        hits = match(d, (iri(uri_value), iri(pred), None, pubinfo_graph))
        if not hits or not hits[0].object.is_literal:
            return b""
        try:
            return base64.b64decode(hits[0].object.value, validate=True)
        except Exception:
            return b""

    return Nanopub(
        uri=uri_value,
        head=d.graph(head_graph),
        assertion=assertion,
        provenance=provenance,
        pubinfo=pubinfo,
        signature=b64_field(vocab.PLEX_HAS_SIGNATURE),
        public_key=b64_field(vocab.PLEX_HAS_PUBLIC_KEY),
    )


@dataclass(frozen=True)
class VerificationReport:
    structure_ok: bool
    uri_ok: bool
    signature_ok: bool
    problems: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.structure_ok and self.uri_ok and self.signature_ok

    def summary(self) -> str:
        def mark(flag: bool) -> str:
            return "ok" if flag else "FAILED"

        lines = [
            f"structure: {mark(self.structure_ok)}",
            f"uri:       {mark(self.uri_ok)}",
            f"signature: {mark(self.signature_ok)}",
        ]
        lines += [f"  - {p}" for p in self.problems]
        return "\n".join(lines)


def verify(np: Nanopub) -> VerificationReport:
    """Recompute the content hash and check the signature; never raises."""
    problems: list[str] = []
    violations = validate_structure(np.to_dataset())
    structure_ok = not violations
    problems += violations

    hashable = Dataset(
        np.head
        + np.assertion
        + np.provenance
        + tuple(q for q in np.pubinfo if q.predicate.value != vocab.PLEX_HAS_SIGNATURE)
    )
    uri_ok = False
    signature_ok = False
    try:
        canonical = canonical_nquads(hashable, np.uri)
    except CanonicalizationError as exc:
        problems.append(str(exc))
    else:
        expected = URI_PREFIX + _hash_code(canonical)
        uri_ok = expected == np.uri
        if not uri_ok:
            problems.append(f"content hash mismatch: expected {expected}")
        if not np.signature:
            problems.append("no signature present")
        elif not np.public_key:
            problems.append("no public key present")
        else:
            try:
                Ed25519PublicKey.from_public_bytes(np.public_key).verify(
                    np.signature, canonical.encode("utf-8")
                )
                signature_ok = True
            except (InvalidSignature, ValueError):
                problems.append("signature does not verify against embedded public key")
    return VerificationReport(structure_ok, uri_ok, signature_ok, tuple(problems))
