"""Mint, sign, and verify a nanopublication, then watch tampering get caught.

Run:  python demos/01_sign_and_verify.py
"""

from plexflow import (
    Dataset,
    assemble,
    generate_profile,
    nanopub_from_dataset,
    parse_trig,
    serialize_trig,
    sign,
    verify,
)
from plexflow.rdf import iri, literal
from plexflow import vocab

profile = generate_profile("Demo Signer", orcid="https://orcid.org/0000-0002-1825-0097")

# The assertion is the claim being published: here, a labelled step.
assertion = [
    (iri("http://example.org/step"), iri(vocab.RDF_TYPE), iri(vocab.PPLAN_STEP)),
    (iri("http://example.org/step"), iri(vocab.RDFS_LABEL), literal("Add blur to image")),
]

unsigned = assemble(assertion, profile=profile)
np = sign(unsigned, profile)
print("minted URI:", np.uri)
print("verification:", "ok" if verify(np).ok else "FAILED")

text = serialize_trig(np.to_dataset())
print("\n--- published TriG ---")
print(text)

# Any single change to the content breaks both the URI check and the signature.
tampered_text = text.replace("Add blur to image", "Add glow to image")
tampered = nanopub_from_dataset(parse_trig(tampered_text))
report = verify(tampered)
print("--- after tampering with one literal ---")
print(report.summary())
