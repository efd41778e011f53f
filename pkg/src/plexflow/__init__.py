"""plexflow: FAIR workflows as signed, content-addressed nanopublications.

Declaratively described workflows are turned into semantically annotated
nanopublications (prospective provenance), executed with linked
retrospective provenance, and made searchable and analyzable through a
registry, a query engine, a CLI, and a web UI.
"""

from .engine import ExecutionResult, build_graph, builtin_eval, execute
from .errors import PlexflowError
from .manifest import (
    emit_code_template,
    parse_step_manifest,
    parse_workflow_manifest,
    resolve,
)
from .model import (
    FairStep,
    FairWorkflow,
    StepExecution,
    Variable,
    WorkflowExecution,
    mark_derivation,
    retroprov_to_rdf,
    step_from_rdf,
    step_to_rdf,
    workflow_from_rdf,
    workflow_to_rdf,
)
from .nanopub import (
    Nanopub,
    Profile,
    UnsignedNanopub,
    assemble,
    generate_profile,
    load_profile,
    mint_uri,
    nanopub_from_dataset,
    save_profile,
    sign,
    validate_structure,
    verify,
)
from .query import ResultTable, evaluate, parse_query
from .rdf import Dataset, Quad, Term, canonical_nquads, match, parse_trig, serialize_trig
from .registry import (
    RegistryStore,
    SearchHit,
    fetch_step,
    fetch_workflow,
    publish_retroprov,
    publish_step,
    publish_workflow,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
