"""Fixed vocabulary table.

Every IRI emitted by the model/publication layers comes from these
namespaces. `PLEX` is the local namespace for the handful of predicates the
standard ontologies do not provide (source code, signatures, orderings).
"""

from __future__ import annotations

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
DCTERMS = "http://purl.org/dc/terms/"
PROV = "http://www.w3.org/ns/prov#"
PPLAN = "http://purl.org/net/p-plan#"
DUL = "http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#"
NP = "http://www.nanopub.org/nschema#"
NPX = "http://purl.org/nanopub/x/"
PLEX = "http://purl.org/plexflow#"

#: Prefix map bound into every dataset the toolkit serializes.
STANDARD_PREFIXES: dict[str, str] = {
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
    "dcterms": DCTERMS,
    "prov": PROV,
    "p-plan": PPLAN,
    "dul": DUL,
    "np": NP,
    "npx": NPX,
    "plex": PLEX,
}

# rdf / rdfs / np / npx
RDF_TYPE = RDF + "type"
RDFS_LABEL = RDFS + "label"
DCT_DESCRIPTION = DCTERMS + "description"
NP_NANOPUBLICATION = NP + "Nanopublication"
NP_HAS_ASSERTION = NP + "hasAssertion"
NP_HAS_PROVENANCE = NP + "hasProvenance"
NP_HAS_PUBINFO = NP + "hasPublicationInfo"
NPX_INTRODUCES = NPX + "introduces"

# prov
PROV_GENERATED_AT = PROV + "generatedAtTime"
PROV_ATTRIBUTED_TO = PROV + "wasAttributedTo"
PROV_DERIVED_FROM = PROV + "wasDerivedFrom"
PROV_STARTED_AT = PROV + "startedAtTime"
PROV_ENDED_AT = PROV + "endedAtTime"
PROV_USED = PROV + "used"
PROV_GENERATED = PROV + "generated"
PROV_BUNDLE = PROV + "Bundle"

# p-plan
PPLAN_STEP = PPLAN + "Step"
PPLAN_PLAN = PPLAN + "Plan"
PPLAN_ACTIVITY = PPLAN + "Activity"
PPLAN_VARIABLE = PPLAN + "Variable"
PPLAN_HAS_INPUT_VAR = PPLAN + "hasInputVar"
PPLAN_HAS_OUTPUT_VAR = PPLAN + "hasOutputVar"
PPLAN_IS_STEP_OF_PLAN = PPLAN + "isStepOfPlan"
PPLAN_IS_VARIABLE_OF_PLAN = PPLAN + "isVariableOfPlan"
PPLAN_CORRESPONDS_TO_STEP = PPLAN + "correspondsToStep"

# dul
DUL_PRECEDES = DUL + "precedes"

# plex (invented plumbing; documented home for what the ontologies lack)
PLEX_SCRIPT_TASK = PLEX + "ScriptTask"
PLEX_MANUAL_TASK = PLEX + "ManualTask"
PLEX_HAS_SOURCE_CODE = PLEX + "hasSourceCode"
PLEX_CODE_KIND = PLEX + "codeKind"
PLEX_POSITION = PLEX + "position"
PLEX_HAS_STEP_ID = PLEX + "hasStepId"
PLEX_BOUND_TO = PLEX + "boundTo"
PLEX_HAS_OUTPUT = PLEX + "hasOutput"
PLEX_HAS_VALUE = PLEX + "hasValue"
PLEX_CONTENT_DIGEST = PLEX + "contentDigest"
PLEX_INCLUDES_ACTIVITY = PLEX + "includesActivity"
PLEX_HAS_SIGNATURE = PLEX + "hasSignature"
PLEX_HAS_PUBLIC_KEY = PLEX + "hasPublicKey"
PLEX_SIGNED_BY = PLEX + "signedBy"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATETIME = XSD + "dateTime"
