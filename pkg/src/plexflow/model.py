"""Semantic model of steps, plans, and executions.

Plans and steps (what a workflow *will* do) are described with P-Plan plus
a few local `plex:` terms; executions (what *happened*) use PROV activities
tied back to their plan steps via `p-plan:correspondsToStep`. Emitters are
pure functions from model values to quad sets; the matching parsers are
faithful inverses so a fetched description can be edited and republished.

IRI layout within one description, relative to a base URI `B`:

    B#step                the step            B#plan          the plan
    B#in.<n>  B#out.<n>   input/output variables (fragment carries the name)
    B#bind.<sid>.<input>  a binding slot of step usage <sid>
    B#ref.<sid>.<output>  a step-output reference inside a binding
    B#activity            an execution activity   B#execution  the run
    B#used.<n> B#gen.<n>  value nodes attached to an activity

Fragments carry the names, which is why variable and step-id names are
restricted to identifier characters.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Iterable, Mapping, Sequence

from . import vocab
from .errors import CycleError, ModelError
from .rdf import Quad, Term, iri, literal
from .timeutil import xsd_datetime

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
CODE_KINDS = ("builtin", "shell", "external")

INLINE_VALUE_LIMIT = 256  # bytes; larger renderings are stored as digests


def _require_name(name: str, what: str) -> str:
    if not _NAME_RE.match(name):
        raise ModelError(f"invalid {what} name {name!r}")
    return name


@dataclass(frozen=True)
class Variable:
    """A named input or output slot with optional semantic types."""

    name: str
    semantic_types: tuple[str, ...] = ()
    description: str = ""

    def __post_init__(self):
        _require_name(self.name, "variable")
        # RDF loses declaration order of types; keep them canonical here
        object.__setattr__(self, "semantic_types", tuple(sorted(set(self.semantic_types))))
        for t in self.semantic_types:
            iri(t)


@dataclass(frozen=True)
class FairStep:
    """One computational (or manual) step of a workflow."""

    label: str
    description: str = ""
    code: str = ""
    code_kind: str = "builtin"
    inputs: tuple[Variable, ...] = ()
    outputs: tuple[Variable, ...] = ()
    is_manual: bool = False
    derived_from: str | None = None
    uri: str | None = None

    def __post_init__(self):
        if not self.label:
            raise ModelError("step label must not be empty")
        if self.code_kind not in CODE_KINDS:
            raise ModelError(f"unknown code_kind {self.code_kind!r}")
        for label, variables in (("input", self.inputs), ("output", self.outputs)):
            names = [v.name for v in variables]
            dupes = {n for n in names if names.count(n) > 1}
            if dupes:
                raise ModelError(f"duplicate {label} name(s): {sorted(dupes)}")
        if self.derived_from is not None:
            iri(self.derived_from)

    def input(self, name: str) -> Variable:
        for v in self.inputs:
            if v.name == name:
                return v
        raise ModelError(f"step {self.label!r} has no input {name!r}")


def mark_derivation(new_step: FairStep, origin: str) -> FairStep:
    """Record that `new_step` was fetched/copied from a published step.

    Only the immediate origin is kept: republishing a derived step points at
    the step it was taken from, not at the root of the chain.
    """
    try:
        iri(origin)
    except ValueError as exc:
        raise ModelError(f"derivation origin must be an IRI: {exc}")
    return replace(new_step, derived_from=origin)


# --- binding sources --------------------------------------------------------


@dataclass(frozen=True)
class WorkflowInput:
    name: str


@dataclass(frozen=True)
class Constant:
    value: str | int | float | bool


@dataclass(frozen=True)
class StepOutput:
    step: str
    output: str

    @property
    def ref(self) -> str:
        return f"{self.step}.{self.output}"


Source = WorkflowInput | Constant | StepOutput


def constant_term(value: str | int | float | bool) -> Term:
    if isinstance(value, bool):
        return literal("true" if value else "false", datatype=vocab.XSD_BOOLEAN)
    if isinstance(value, int):
        return literal(str(value), datatype=vocab.XSD_INTEGER)
    if isinstance(value, float):
        return literal(str(value), datatype=vocab.XSD_DOUBLE)
    return literal(value)


def constant_value(t: Term) -> str | int | float | bool:
    if t.datatype == vocab.XSD_BOOLEAN:
        return t.value == "true"
    if t.datatype == vocab.XSD_INTEGER:
        return int(t.value)
    if t.datatype in (vocab.XSD_DOUBLE, vocab.XSD_DECIMAL):
        return float(t.value)
    return t.value


@dataclass
class FairWorkflow:
    """A plan: an ordered set of step usages wired together by bindings.

    `steps` maps a usage id to its step; `bindings` maps (step id, input
    name) to where the value comes from. `after_edges` adds ordering with no
    data flow. Workflow outputs are `"<step id>.<output>"` references, kept
    sorted (their order carries no meaning).
    """

    label: str
    description: str = ""
    steps: dict[str, FairStep] = field(default_factory=dict)
    bindings: dict[tuple[str, str], Source] = field(default_factory=dict)
    workflow_inputs: tuple[Variable, ...] = ()
    workflow_outputs: tuple[str, ...] = ()
    after_edges: dict[str, tuple[str, ...]] = field(default_factory=dict)
    uri: str | None = None

    def __post_init__(self):
        if not self.label:
            raise ModelError("workflow label must not be empty")
        for sid in self.steps:
            _require_name(sid, "step id")
        self.workflow_outputs = tuple(sorted(self.workflow_outputs))
        # after edges already implied by data flow are redundant; drop them so
        # the model has one canonical form (RDF cannot tell the two apart)
        data = {
            (source.step, sid)
            for (sid, _n), source in self.bindings.items()
            if isinstance(source, StepOutput)
        }
        cleaned = {}
        for sid, preds in self.after_edges.items():
            kept = tuple(sorted(p for p in set(preds) if (p, sid) not in data))
            if kept:
                cleaned[sid] = kept
        self.after_edges = cleaned

    def input_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.workflow_inputs)


def dependency_edges(w: FairWorkflow) -> list[tuple[str, str]]:
    """Data-flow plus `after` ordering edges, deduplicated, in a stable order."""
    edges: list[tuple[str, str]] = []
    seen = set()
    for (sid, _input), source in w.bindings.items():
        if isinstance(source, StepOutput):
            e = (source.step, sid)
            if e not in seen:
                seen.add(e)
                edges.append(e)
    for sid, preds in w.after_edges.items():
        for p in preds:
            e = (p, sid)
            if e not in seen:
                seen.add(e)
                edges.append(e)
    return edges


def find_cycle(nodes: Sequence[str], edges: Iterable[tuple[str, str]]) -> list[str] | None:
    """Return one cycle as a node sequence (first == last), or None."""
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in succ}
    stack: list[str] = []

    def visit(n: str) -> list[str] | None:
        color[n] = GREY
        stack.append(n)
        for m in succ[n]:
            if color[m] == GREY:
                return stack[stack.index(m):] + [m]
            if color[m] == WHITE:
                found = visit(m)
                if found:
                    return found
        stack.pop()
        color[n] = BLACK
        return None

    for n in list(succ):
        if color[n] == WHITE:
            found = visit(n)
            if found:
                return found
    return None


def validate_workflow(w: FairWorkflow) -> None:
    """Check binding references, input coverage, and acyclicity."""
    input_names = set(w.input_names())
    for (sid, input_name), source in w.bindings.items():
        where = f"binding {sid}.{input_name}"
        if sid not in w.steps:
            raise ModelError(f"{where}: unknown step {sid!r}")
        w.steps[sid].input(input_name)
        if isinstance(source, WorkflowInput) and source.name not in input_names:
            raise ModelError(f"{where}: unknown workflow input {source.name!r}")
        if isinstance(source, StepOutput):
            if source.step not in w.steps:
                raise ModelError(f"{where}: unknown source step {source.step!r}")
            if source.output not in {v.name for v in w.steps[source.step].outputs}:
                raise ModelError(f"{where}: step {source.step!r} has no output {source.output!r}")
    for sid, step in w.steps.items():
        for v in step.inputs:
            if (sid, v.name) not in w.bindings:
                raise ModelError(f"unbound input {sid}.{v.name}")
    for sid, preds in w.after_edges.items():
        for p in preds:
            if sid not in w.steps or p not in w.steps:
                raise ModelError(f"after edge references unknown step: {p!r} -> {sid!r}")
    for ref in w.workflow_outputs:
        sid, _, out = ref.partition(".")
        if sid not in w.steps or out not in {v.name for v in w.steps[sid].outputs}:
            raise ModelError(f"workflow output {ref!r} does not name a step output")
    cycle = find_cycle(list(w.steps), dependency_edges(w))
    if cycle:
        raise CycleError(cycle)


# ---------------------------------------------------------------------------
# Prospective RDF
# ---------------------------------------------------------------------------


def _var_quads(
    owner: Term,
    link_pred: str,
    variables: Sequence[Variable],
    base: str,
    g: Term,
    tag: str,
    var_is_subject: bool = False,
) -> list[Quad]:
    quads = []
    for position, v in enumerate(variables):
        node = iri(f"{base}#{tag}.{v.name}")
        if var_is_subject:  # ⟨var, p-plan:isVariableOfPlan, plan⟩
            quads.append(Quad(node, iri(link_pred), owner, g))
        else:  # ⟨step, p-plan:hasInputVar, var⟩
            quads.append(Quad(owner, iri(link_pred), node, g))
        quads.append(Quad(node, iri(vocab.RDF_TYPE), iri(vocab.PPLAN_VARIABLE), g))
        for t in v.semantic_types:
            quads.append(Quad(node, iri(vocab.RDF_TYPE), iri(t), g))
        if v.description:
            quads.append(Quad(node, iri(vocab.DCT_DESCRIPTION), literal(v.description), g))
        quads.append(
            Quad(node, iri(vocab.PLEX_POSITION), literal(str(position), datatype=vocab.XSD_INTEGER), g)
        )
    return quads


def step_to_rdf(s: FairStep, base: str) -> tuple[Quad, ...]:
    """Assertion quads describing one step, homed under `base`."""
    if not s.label:
        raise ModelError("step label must not be empty")
    g = iri(base + "#assertion")
    step = iri(base + "#step")
    quads = [
        Quad(step, iri(vocab.RDF_TYPE), iri(vocab.PPLAN_STEP), g),
        Quad(
            step,
            iri(vocab.RDF_TYPE),
            iri(vocab.PLEX_MANUAL_TASK if s.is_manual else vocab.PLEX_SCRIPT_TASK),
            g,
        ),
        Quad(step, iri(vocab.RDFS_LABEL), literal(s.label), g),
        Quad(step, iri(vocab.PLEX_CODE_KIND), literal(s.code_kind), g),
    ]
    if s.description:
        quads.append(Quad(step, iri(vocab.DCT_DESCRIPTION), literal(s.description), g))
    if s.code:
        quads.append(Quad(step, iri(vocab.PLEX_HAS_SOURCE_CODE), literal(s.code), g))
    if s.derived_from:
        quads.append(Quad(step, iri(vocab.PROV_DERIVED_FROM), iri(s.derived_from), g))
    quads += _var_quads(step, vocab.PPLAN_HAS_INPUT_VAR, s.inputs, base, g, tag="in")
    quads += _var_quads(step, vocab.PPLAN_HAS_OUTPUT_VAR, s.outputs, base, g, tag="out")
    return tuple(quads)


def _fragment(value: str) -> str:
    return value.rsplit("#", 1)[1] if "#" in value else value


def _parse_variables(
    quads: Sequence[Quad], owner: Term, link_pred: str, tag: str, var_is_subject: bool = False
) -> tuple[Variable, ...]:
    entries = []
    for link in quads:
        if link.predicate.value != link_pred:
            continue
        if var_is_subject:
            if link.object != owner or not link.subject.is_iri:
                continue
            node = link.subject
        else:
            if link.subject != owner or not link.object.is_iri:
                continue
            node = link.object
        types = []
        description = ""
        position = 1 << 30
        for q in quads:
            if q.subject != node:
                continue
            if q.predicate.value == vocab.RDF_TYPE and q.object.value != vocab.PPLAN_VARIABLE:
                types.append(q.object.value)
            elif q.predicate.value == vocab.DCT_DESCRIPTION:
                description = q.object.value
            elif q.predicate.value == vocab.PLEX_POSITION:
                position = int(q.object.value)
        name = _fragment(node.value).removeprefix(tag + ".")
        entries.append((position, Variable(name, tuple(types), description)))
    entries.sort(key=lambda e: (e[0], e[1].name))
    return tuple(v for _, v in entries)


def _object_of(quads: Sequence[Quad], subject: Term, pred: str) -> Term | None:
    for q in quads:
        if q.subject == subject and q.predicate.value == pred:
            return q.object
    return None


def step_from_rdf(quads: Iterable[Quad], step_uri: str) -> FairStep:
    """Inverse of step_to_rdf; unrelated quads in the input are ignored."""
    quads = tuple(quads)
    step = iri(step_uri)
    types = {q.object.value for q in quads if q.subject == step and q.predicate.value == vocab.RDF_TYPE}
    if vocab.PPLAN_STEP not in types:
        raise ModelError(f"missing rdf:type p-plan:Step for {step_uri}")
    label = _object_of(quads, step, vocab.RDFS_LABEL)
    if label is None:
        raise ModelError(f"missing label for {step_uri}")
    description = _object_of(quads, step, vocab.DCT_DESCRIPTION)
    code = _object_of(quads, step, vocab.PLEX_HAS_SOURCE_CODE)
    kind = _object_of(quads, step, vocab.PLEX_CODE_KIND)
    derived = _object_of(quads, step, vocab.PROV_DERIVED_FROM)
    code_text = code.value if code else ""
    if kind is not None:
        code_kind = kind.value
    else:
        code_kind = "builtin" if code_text.startswith("builtin:") else "external"
    return FairStep(
        label=label.value,
        description=description.value if description else "",
        code=code_text,
        code_kind=code_kind,
        inputs=_parse_variables(quads, step, vocab.PPLAN_HAS_INPUT_VAR, tag="in"),
        outputs=_parse_variables(quads, step, vocab.PPLAN_HAS_OUTPUT_VAR, tag="out"),
        is_manual=vocab.PLEX_MANUAL_TASK in types,
        derived_from=derived.value if derived else None,
        uri=step_uri,
    )


def _source_term(source: Source, base: str) -> Term:
    if isinstance(source, WorkflowInput):
        return iri(f"{base}#in.{source.name}")
    if isinstance(source, StepOutput):
        return iri(f"{base}#ref.{source.ref}")
    return constant_term(source.value)


def workflow_to_rdf(w: FairWorkflow, base: str, step_uris: Mapping[str, str]) -> tuple[Quad, ...]:
    """Assertion quads describing a plan whose steps live at `step_uris`."""
    validate_workflow(w)
    for sid in w.steps:
        if sid not in step_uris:
            raise ModelError(f"no published URI for step {sid!r}")
    g = iri(base + "#assertion")
    plan = iri(base + "#plan")
    quads = [
        Quad(plan, iri(vocab.RDF_TYPE), iri(vocab.PPLAN_PLAN), g),
        Quad(plan, iri(vocab.RDFS_LABEL), literal(w.label), g),
    ]
    if w.description:
        quads.append(Quad(plan, iri(vocab.DCT_DESCRIPTION), literal(w.description), g))
    for position, sid in enumerate(w.steps):
        su = iri(step_uris[sid])
        quads += [
            Quad(su, iri(vocab.PPLAN_IS_STEP_OF_PLAN), plan, g),
            Quad(su, iri(vocab.PLEX_HAS_STEP_ID), literal(sid), g),
            Quad(su, iri(vocab.PLEX_POSITION), literal(str(position), datatype=vocab.XSD_INTEGER), g),
        ]
    for a, b in dependency_edges(w):
        quads.append(Quad(iri(step_uris[a]), iri(vocab.DUL_PRECEDES), iri(step_uris[b]), g))
    quads += _var_quads(
        plan, vocab.PPLAN_IS_VARIABLE_OF_PLAN, w.workflow_inputs, base, g, tag="in", var_is_subject=True
    )
    for ref in w.workflow_outputs:
        quads.append(Quad(plan, iri(vocab.PLEX_HAS_OUTPUT), literal(ref), g))
    for (sid, input_name), source in sorted(w.bindings.items()):
        slot = iri(f"{base}#bind.{sid}.{input_name}")
        quads.append(Quad(slot, iri(vocab.PLEX_BOUND_TO), _source_term(source, base), g))
    return tuple(quads)


def _parse_source(t: Term) -> Source:
    if t.is_literal:
        return Constant(constant_value(t))
    fragment = _fragment(t.value)
    if fragment.startswith("ref."):
        sid, _, out = fragment.removeprefix("ref.").partition(".")
        return StepOutput(sid, out)
    if fragment.startswith("in."):
        return WorkflowInput(fragment.removeprefix("in."))
    raise ModelError(f"unrecognized binding source {t.value!r}")


def workflow_from_rdf(quads: Iterable[Quad], plan_uri: str) -> FairWorkflow:
    """Inverse of workflow_to_rdf.

    The quads must also contain each member step's description (fetch the
    step nanopubs and pass the union when reading from a registry).
    """
    quads = tuple(quads)
    plan = iri(plan_uri)
    base = plan_uri.rsplit("#", 1)[0]
    types = {q.object.value for q in quads if q.subject == plan and q.predicate.value == vocab.RDF_TYPE}
    if vocab.PPLAN_PLAN not in types:
        raise ModelError(f"missing rdf:type p-plan:Plan for {plan_uri}")
    label = _object_of(quads, plan, vocab.RDFS_LABEL)
    if label is None:
        raise ModelError(f"missing label for {plan_uri}")
    description = _object_of(quads, plan, vocab.DCT_DESCRIPTION)

    usages = []  # (position, sid, step_uri)
    for q in quads:
        if q.predicate.value == vocab.PPLAN_IS_STEP_OF_PLAN and q.object == plan:
            su = q.subject
            sid = _object_of(quads, su, vocab.PLEX_HAS_STEP_ID)
            pos = _object_of(quads, su, vocab.PLEX_POSITION)
            if sid is None:
                raise ModelError(f"plan member {su.value} lacks a step id")
            usages.append((int(pos.value) if pos else 1 << 30, sid.value, su.value))
    usages.sort()
    steps = {sid: step_from_rdf(quads, su) for _, sid, su in usages}
    uri_to_sid = {su: sid for _, sid, su in usages}

    bindings: dict[tuple[str, str], Source] = {}
    for q in quads:
        if q.predicate.value != vocab.PLEX_BOUND_TO:
            continue
        fragment = _fragment(q.subject.value)
        if not q.subject.value.startswith(base + "#") or not fragment.startswith("bind."):
            continue
        sid, _, input_name = fragment.removeprefix("bind.").partition(".")
        bindings[(sid, input_name)] = _parse_source(q.object)

    data_edges = set()
    for (sid, _n), source in bindings.items():
        if isinstance(source, StepOutput):
            data_edges.add((source.step, sid))
    after_edges: dict[str, list[str]] = {}
    for q in quads:
        if q.predicate.value == vocab.DUL_PRECEDES and q.subject.value in uri_to_sid:
            a, b = uri_to_sid[q.subject.value], uri_to_sid.get(q.object.value)
            if b is not None and (a, b) not in data_edges:
                after_edges.setdefault(b, []).append(a)

    outputs = tuple(sorted(q.object.value for q in quads if q.subject == plan and q.predicate.value == vocab.PLEX_HAS_OUTPUT))
    return FairWorkflow(
        label=label.value,
        description=description.value if description else "",
        steps=steps,
        bindings=bindings,
        workflow_inputs=_parse_variables(
            quads, plan, vocab.PPLAN_IS_VARIABLE_OF_PLAN, tag="in", var_is_subject=True
        ),
        workflow_outputs=outputs,
        after_edges={k: tuple(sorted(v)) for k, v in after_edges.items()},
        uri=plan_uri,
    )


# ---------------------------------------------------------------------------
# Retrospective records and RDF
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValueRecord:
    """Captured runtime value: inline rendering, or a digest if too large."""

    kind: str  # "inline" | "digest"
    content: str
    datatype: str | None = None

    @staticmethod
    def capture(value: str | int | float | bool) -> "ValueRecord":
        term = constant_term(value)
        if len(term.value.encode("utf-8")) <= INLINE_VALUE_LIMIT:
            return ValueRecord("inline", term.value, term.datatype)
        return ValueRecord("digest", hashlib.sha256(term.value.encode("utf-8")).hexdigest())

    def value_quad(self, node: Term, g: Term) -> Quad:
        if self.kind == "inline":
            return Quad(node, iri(vocab.PLEX_HAS_VALUE), literal(self.content, self.datatype), g)
        return Quad(node, iri(vocab.PLEX_CONTENT_DIGEST), literal(self.content), g)


@dataclass(frozen=True)
class StepExecution:
    activity_uri: str
    step_uri: str
    started: datetime
    ended: datetime
    input_values: Mapping[str, ValueRecord] = field(default_factory=dict)
    output_values: Mapping[str, ValueRecord] = field(default_factory=dict)

    def __post_init__(self):
        if self.started > self.ended:
            raise ModelError("step execution started after it ended")


@dataclass(frozen=True)
class WorkflowExecution:
    execution_uri: str
    plan_uri: str
    step_executions: tuple[StepExecution, ...]
    started: datetime
    ended: datetime
    outputs: Mapping[str, ValueRecord] = field(default_factory=dict)


def step_execution_to_rdf(se: StepExecution, base: str) -> tuple[Quad, ...]:
    """Assertion quads for one activity, homed under `base`."""
    g = iri(base + "#assertion")
    act = iri(base + "#activity")
    quads = [
        Quad(act, iri(vocab.RDF_TYPE), iri(vocab.PPLAN_ACTIVITY), g),
        Quad(act, iri(vocab.PPLAN_CORRESPONDS_TO_STEP), iri(se.step_uri), g),
        Quad(act, iri(vocab.PROV_STARTED_AT), xsd_datetime(se.started), g),
        Quad(act, iri(vocab.PROV_ENDED_AT), xsd_datetime(se.ended), g),
    ]
    for name in sorted(se.input_values):
        node = iri(f"{base}#used.{name}")
        quads.append(Quad(act, iri(vocab.PROV_USED), node, g))
        quads.append(se.input_values[name].value_quad(node, g))
    for name in sorted(se.output_values):
        node = iri(f"{base}#gen.{name}")
        quads.append(Quad(act, iri(vocab.PROV_GENERATED), node, g))
        quads.append(se.output_values[name].value_quad(node, g))
    return tuple(quads)


def workflow_execution_to_rdf(
    e: WorkflowExecution, base: str, activity_uris: Sequence[str]
) -> tuple[Quad, ...]:
    """Assertion quads for the run as a whole, referencing its activities."""
    g = iri(base + "#assertion")
    ex = iri(base + "#execution")
    quads = [
        Quad(ex, iri(vocab.RDF_TYPE), iri(vocab.PROV_BUNDLE), g),
        Quad(ex, iri(vocab.PROV_DERIVED_FROM), iri(e.plan_uri), g),
        Quad(ex, iri(vocab.PROV_STARTED_AT), xsd_datetime(e.started), g),
        Quad(ex, iri(vocab.PROV_ENDED_AT), xsd_datetime(e.ended), g),
    ]
    for act in activity_uris:
        quads.append(Quad(ex, iri(vocab.PLEX_INCLUDES_ACTIVITY), iri(act), g))
    for name in sorted(e.outputs):
        node = iri(f"{base}#res.{name}")
        quads.append(Quad(ex, iri(vocab.PROV_GENERATED), node, g))
        quads.append(e.outputs[name].value_quad(node, g))
    return tuple(quads)


def retroprov_to_rdf(e: WorkflowExecution) -> list[tuple[Quad, ...]]:
    """One assertion set per step execution, plus one for the run: N+1 total."""
    if not e.plan_uri:
        raise ModelError("execution references no plan")
    sets = []
    for se in e.step_executions:
        base = se.activity_uri.rsplit("#", 1)[0]
        sets.append(step_execution_to_rdf(se, base))
    base = e.execution_uri.rsplit("#", 1)[0]
    sets.append(
        workflow_execution_to_rdf(e, base, [se.activity_uri for se in e.step_executions])
    )
    return sets
