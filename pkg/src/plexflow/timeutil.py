"""UTC timestamps with millisecond precision, as used in all emitted RDF."""

from __future__ import annotations

from datetime import datetime, timezone

from . import vocab
from .rdf import Term, literal


def utc_now() -> datetime:
    """Current UTC time truncated to whole milliseconds."""
    now = datetime.now(timezone.utc)
    return now.replace(microsecond=(now.microsecond // 1000) * 1000)


def to_utc_ms(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    dt = dt.astimezone(timezone.utc)
    return dt.replace(microsecond=(dt.microsecond // 1000) * 1000)


def xsd_datetime(dt: datetime) -> Term:
    dt = to_utc_ms(dt)
    lexical = dt.strftime("%Y-%m-%dT%H:%M:%S") + f".{dt.microsecond // 1000:03d}Z"
    return literal(lexical, datatype=vocab.XSD_DATETIME)


def parse_xsd_datetime(lexical: str) -> datetime:
    text = lexical.replace("Z", "+00:00") if lexical.endswith("Z") else lexical
    return to_utc_ms(datetime.fromisoformat(text))
