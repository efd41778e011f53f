"""Declarative step/workflow manifests (YAML) and code-template emission.

One document per file, top-level key `step:` or `workflow:`. Bindings use
the compact forms `workflow.<input>`, `const:<value>` (with optional
`int:` / `float:` / `bool:` type prefix), and `<step_id>.<output>`.
Parsing applies all defaults and validates references; `to_yaml` re-emits
the normalized form byte-stably.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Callable

import yaml

from .errors import ManifestError, ModelError
from .model import (
    Constant,
    FairStep,
    FairWorkflow,
    Source,
    StepOutput,
    Variable,
    WorkflowInput,
    find_cycle,
    mark_derivation,
    validate_workflow,
)

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_BUILTIN_CODE_RE = re.compile(r"^builtin:[a-z_]+$")


@dataclass(frozen=True)
class VariableSpec:
    name: str
    semantic_type: str | None = None
    description: str | None = None

    def to_variable(self) -> Variable:
        return Variable(
            self.name,
            semantic_types=(self.semantic_type,) if self.semantic_type else (),
            description=self.description or "",
        )


@dataclass(frozen=True)
class StepManifest:
    label: str
    description: str = ""
    code_kind: str = "builtin"
    code: str = ""
    is_manual: bool = False
    inputs: tuple[VariableSpec, ...] = ()
    outputs: tuple[VariableSpec, ...] = ()

    def to_step(self) -> FairStep:
        return FairStep(
            label=self.label,
            description=self.description,
            code=self.code,
            code_kind=self.code_kind,
            inputs=tuple(v.to_variable() for v in self.inputs),
            outputs=tuple(v.to_variable() for v in self.outputs),
            is_manual=self.is_manual,
        )


@dataclass(frozen=True)
class StepEntry:
    id: str
    uses: str | None = None
    step: StepManifest | None = None
    bind: dict[str, str] = field(default_factory=dict)
    after: tuple[str, ...] = ()


@dataclass(frozen=True)
class WorkflowManifest:
    label: str
    description: str = ""
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    steps: tuple[StepEntry, ...] = ()


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _load_yaml(text: str) -> dict:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ManifestError(f"invalid YAML: {exc}")
    if not isinstance(doc, dict):
        raise ManifestError("manifest must be a mapping")
    return doc


def _str_field(mapping: dict, key: str, path: str, default: str | None = None) -> str:
    value = mapping.get(key, default)
    if value is None:
        raise ManifestError("required field missing", f"{path}.{key}")
    if not isinstance(value, str):
        raise ManifestError(f"expected a string, got {type(value).__name__}", f"{path}.{key}")
    return value


def _name_field(mapping: dict, key: str, path: str) -> str:
    value = _str_field(mapping, key, path)
    if not _NAME_RE.match(value):
        raise ManifestError(f"not a valid identifier: {value!r}", f"{path}.{key}")
    return value


def _parse_variable_specs(doc: dict, key: str, path: str, with_description: bool) -> tuple[VariableSpec, ...]:
    raw = doc.get(key, [])
    if raw is None:
        raw = []
    if not isinstance(raw, list):
        raise ManifestError("expected a list", f"{path}.{key}")
    specs = []
    for i, item in enumerate(raw):
        item_path = f"{path}.{key}[{i}]"
        if not isinstance(item, dict):
            raise ManifestError("expected a mapping with a 'name'", item_path)
        name = _name_field(item, "name", item_path)
        semantic_type = item.get("semantic_type")
        if semantic_type is not None and not isinstance(semantic_type, str):
            raise ManifestError("expected an IRI string", f"{item_path}.semantic_type")
        description = item.get("description") if with_description else None
        allowed = {"name", "semantic_type"} | ({"description"} if with_description else set())
        unknown = set(item) - allowed
        if unknown:
            raise ManifestError(f"unknown field(s): {sorted(unknown)}", item_path)
        specs.append(VariableSpec(name, semantic_type, description))
    return tuple(specs)


def _parse_step_block(doc: dict, path: str) -> StepManifest:
    if not isinstance(doc, dict):
        raise ManifestError("expected a step mapping", path)
    unknown = set(doc) - {"label", "description", "code_kind", "code", "is_manual", "inputs", "outputs"}
    if unknown:
        raise ManifestError(f"unknown field(s): {sorted(unknown)}", path)
    label = _str_field(doc, "label", path)
    if not label:
        raise ManifestError("label must not be empty", f"{path}.label")
    code_kind = doc.get("code_kind", "builtin")
    if code_kind not in ("builtin", "shell", "external"):
        raise ManifestError(f"must be builtin, shell, or external, got {code_kind!r}", f"{path}.code_kind")
    code = _str_field(doc, "code", path, default="")
    is_manual = doc.get("is_manual", False)
    if not isinstance(is_manual, bool):
        raise ManifestError("expected a boolean", f"{path}.is_manual")
    if not code and not is_manual:
        raise ManifestError("non-manual steps need code", f"{path}.code")
    if code_kind == "builtin" and code and not _BUILTIN_CODE_RE.match(code):
        raise ManifestError(f"builtin code must match 'builtin:<op>', got {code!r}", f"{path}.code")
    return StepManifest(
        label=label,
        description=_str_field(doc, "description", path, default=""),
        code_kind=code_kind,
        code=code,
        is_manual=is_manual,
        inputs=_parse_variable_specs(doc, "inputs", path, with_description=True),
        outputs=_parse_variable_specs(doc, "outputs", path, with_description=False),
    )


def parse_step_manifest(text: str) -> StepManifest:
    doc = _load_yaml(text)
    if set(doc) != {"step"}:
        raise ManifestError("expected exactly one top-level key 'step'")
    return _parse_step_block(doc["step"], "step")


def parse_binding(spec: str) -> Source:
    """Parse one bind value: workflow.<name> | const:<v> | <step>.<output>."""
    if spec.startswith("const:"):
        value = spec.removeprefix("const:")
        for prefix, convert in (("int:", int), ("float:", float), ("bool:", None)):
            if value.startswith(prefix):
                body = value.removeprefix(prefix)
                if prefix == "bool:":
                    if body not in ("true", "false"):
                        raise ManifestError(f"bool constant must be true/false, got {body!r}")
                    return Constant(body == "true")
                try:
                    return Constant(convert(body))
                except ValueError:
                    raise ManifestError(f"not a valid {prefix[:-1]} constant: {body!r}")
        return Constant(value)
    owner, dot, name = spec.partition(".")
    if not dot or not _NAME_RE.match(owner) or not _NAME_RE.match(name):
        raise ManifestError(f"not a valid binding source: {spec!r}")
    if owner == "workflow":
        return WorkflowInput(name)
    return StepOutput(owner, name)


def binding_spec(source: Source) -> str:
    """Inverse of parse_binding."""
    if isinstance(source, WorkflowInput):
        return f"workflow.{source.name}"
    if isinstance(source, StepOutput):
        return source.ref
    v = source.value
    if isinstance(v, bool):
        return f"const:bool:{'true' if v else 'false'}"
    if isinstance(v, int):
        return f"const:int:{v}"
    if isinstance(v, float):
        return f"const:float:{v}"
    return f"const:{v}"


def parse_workflow_manifest(text: str) -> WorkflowManifest:
    doc = _load_yaml(text)
    if set(doc) != {"workflow"}:
        raise ManifestError("expected exactly one top-level key 'workflow'")
    w = doc["workflow"]
    if not isinstance(w, dict):
        raise ManifestError("expected a workflow mapping", "workflow")
    path = "workflow"
    unknown = set(w) - {"label", "description", "inputs", "outputs", "steps"}
    if unknown:
        raise ManifestError(f"unknown field(s): {sorted(unknown)}", path)
    label = _str_field(w, "label", path)

    raw_inputs = w.get("inputs", []) or []
    if not isinstance(raw_inputs, list):
        raise ManifestError("expected a list of input names", f"{path}.inputs")
    inputs = []
    for i, name in enumerate(raw_inputs):
        if not isinstance(name, str) or not _NAME_RE.match(name):
            raise ManifestError(f"not a valid identifier: {name!r}", f"{path}.inputs[{i}]")
        inputs.append(name)

    raw_steps = w.get("steps", []) or []
    if not isinstance(raw_steps, list) or not raw_steps:
        raise ManifestError("a workflow needs at least one step", f"{path}.steps")
    entries: list[StepEntry] = []
    seen_ids: set[str] = set()
    for i, item in enumerate(raw_steps):
        entry_path = f"{path}.steps[{i}]"
        if not isinstance(item, dict):
            raise ManifestError("expected a step entry mapping", entry_path)
        sid = _name_field(item, "id", entry_path)
        if sid in seen_ids:
            raise ManifestError(f"duplicate step id {sid!r}", f"{entry_path}.id")
        seen_ids.add(sid)
        entry_path = f"{path}.steps.{sid}"
        unknown = set(item) - {"id", "uses", "step", "bind", "after"}
        if unknown:
            raise ManifestError(f"unknown field(s): {sorted(unknown)}", entry_path)
        uses = item.get("uses")
        inline = item.get("step")
        if (uses is None) == (inline is None):
            raise ManifestError("exactly one of 'uses' or 'step' is required", entry_path)
        if uses is not None and not isinstance(uses, str):
            raise ManifestError("expected a nanopub IRI", f"{entry_path}.uses")
        step = _parse_step_block(inline, f"{entry_path}.step") if inline is not None else None
        raw_bind = item.get("bind", {}) or {}
        if not isinstance(raw_bind, dict):
            raise ManifestError("expected a mapping", f"{entry_path}.bind")
        bind: dict[str, str] = {}
        for input_name, spec in raw_bind.items():
            bind_path = f"{entry_path}.bind.{input_name}"
            if not isinstance(input_name, str) or not _NAME_RE.match(input_name):
                raise ManifestError(f"not a valid input name: {input_name!r}", bind_path)
            if not isinstance(spec, str):
                raise ManifestError("expected a binding string", bind_path)
            parse_binding(spec)  # syntax check; reference check below
            bind[input_name] = spec
        raw_after = item.get("after", []) or []
        if not isinstance(raw_after, list) or not all(isinstance(a, str) for a in raw_after):
            raise ManifestError("expected a list of step ids", f"{entry_path}.after")
        entries.append(StepEntry(sid, uses, step, bind, tuple(raw_after)))

    raw_outputs = w.get("outputs", []) or []
    if not isinstance(raw_outputs, list):
        raise ManifestError("expected a list of step output refs", f"{path}.outputs")

    manifest = WorkflowManifest(
        label=label,
        description=_str_field(w, "description", path, default=""),
        inputs=tuple(inputs),
        outputs=tuple(raw_outputs),
        steps=tuple(entries),
    )
    _check_references(manifest)
    return manifest


def _check_references(m: WorkflowManifest) -> None:
    ids = {e.id for e in m.steps}
    for e in m.steps:
        for input_name, spec in e.bind.items():
            source = parse_binding(spec)
            where = f"workflow.steps.{e.id}.bind.{input_name}"
            if isinstance(source, WorkflowInput) and source.name not in m.inputs:
                raise ManifestError(f"dangling bind target: no workflow input {source.name!r}", where)
            if isinstance(source, StepOutput) and source.step not in ids:
                raise ManifestError(f"dangling bind target: no step {source.step!r}", where)
            if isinstance(source, StepOutput) and source.step == e.id:
                raise ManifestError("step cannot bind to its own output", where)
        for a in e.after:
            if a not in ids:
                raise ManifestError(f"unknown step id {a!r}", f"workflow.steps.{e.id}.after")
    for i, ref in enumerate(m.outputs):
        if not isinstance(ref, str) or ref.partition(".")[0] not in ids or not ref.partition(".")[2]:
            raise ManifestError(f"not a <step_id>.<output> ref: {ref!r}", f"workflow.outputs[{i}]")
    edges = []
    for e in m.steps:
        for spec in e.bind.values():
            source = parse_binding(spec)
            if isinstance(source, StepOutput):
                edges.append((source.step, e.id))
        edges.extend((a, e.id) for a in e.after)
    cycle = find_cycle(sorted(ids), edges)
    if cycle:
        raise ManifestError("cycle: " + " -> ".join(cycle), "workflow.steps")


# ---------------------------------------------------------------------------
# Resolution to the executable model
# ---------------------------------------------------------------------------


def resolve(m: WorkflowManifest, fetch: Callable[[str], FairStep] | None = None) -> FairWorkflow:
    """Turn a manifest into a validated FairWorkflow.

    Published steps named by `uses:` are fetched and marked as derived from
    their origin; the copies lose their URI so publication mints new ones.
    """
    steps: dict[str, FairStep] = {}
    for e in m.steps:
        if e.uses is not None:
            if fetch is None:
                raise ManifestError(f"step {e.id!r} uses {e.uses} but no fetcher is available")
            fetched = fetch(e.uses)
            steps[e.id] = replace(mark_derivation(fetched, fetched.uri or e.uses), uri=None)
        else:
            steps[e.id] = e.step.to_step()

    bindings: dict[tuple[str, str], Source] = {}
    for e in m.steps:
        for input_name, spec in e.bind.items():
            bindings[(e.id, input_name)] = parse_binding(spec)

    w = FairWorkflow(
        label=m.label,
        description=m.description,
        steps=steps,
        bindings=bindings,
        workflow_inputs=tuple(Variable(n) for n in m.inputs),
        workflow_outputs=tuple(m.outputs),
        after_edges={e.id: e.after for e in m.steps if e.after},
    )
    try:
        validate_workflow(w)
    except ModelError as exc:
        raise ManifestError(str(exc))
    return w


# ---------------------------------------------------------------------------
# Normalized emission
# ---------------------------------------------------------------------------


def _variable_spec_doc(v: VariableSpec) -> dict:
    doc: dict = {"name": v.name}
    if v.semantic_type:
        doc["semantic_type"] = v.semantic_type
    if v.description:
        doc["description"] = v.description
    return doc


def _step_block_doc(s: StepManifest) -> dict:
    doc: dict = {"label": s.label}
    if s.description:
        doc["description"] = s.description
    if s.code_kind != "builtin":
        doc["code_kind"] = s.code_kind
    if s.code:
        doc["code"] = s.code
    if s.is_manual:
        doc["is_manual"] = True
    if s.inputs:
        doc["inputs"] = [_variable_spec_doc(v) for v in s.inputs]
    if s.outputs:
        doc["outputs"] = [_variable_spec_doc(v) for v in s.outputs]
    return doc


def step_manifest_to_yaml(s: StepManifest) -> str:
    return yaml.safe_dump({"step": _step_block_doc(s)}, sort_keys=False, allow_unicode=True)


def workflow_manifest_to_yaml(m: WorkflowManifest) -> str:
    steps = []
    for e in m.steps:
        entry: dict = {"id": e.id}
        if e.uses is not None:
            entry["uses"] = e.uses
        else:
            entry["step"] = _step_block_doc(e.step)
        if e.bind:
            entry["bind"] = dict(e.bind)
        if e.after:
            entry["after"] = list(e.after)
        steps.append(entry)
    doc: dict = {"label": m.label}
    if m.description:
        doc["description"] = m.description
    if m.inputs:
        doc["inputs"] = list(m.inputs)
    if m.outputs:
        doc["outputs"] = list(m.outputs)
    doc["steps"] = steps
    return yaml.safe_dump({"workflow": doc}, sort_keys=False, allow_unicode=True)


# ---------------------------------------------------------------------------
# Code templates (the "inject" flow)
# ---------------------------------------------------------------------------


def emit_code_template(s: FairStep) -> str:
    """Comment header (identity, variables, lineage) followed by the code."""

    def var_line(v: Variable) -> str:
        types = f" ({', '.join(v.semantic_types)})" if v.semantic_types else ""
        desc = f" -- {v.description}" if v.description else ""
        return f"#   {v.name}{types}{desc}"

    lines = [f"# plexflow step: {s.uri or '(unpublished)'}"]
    lines.append(f"# label: {s.label}")
    if s.description:
        lines.append(f"# description: {s.description}")
    if s.is_manual:
        lines.append("# MANUAL TASK: executed by a human, no code")
    lines.append(f"# kind: {s.code_kind}")
    if s.inputs:
        lines.append("# inputs:")
        lines += [var_line(v) for v in s.inputs]
    if s.outputs:
        lines.append("# outputs:")
        lines += [var_line(v) for v in s.outputs]
    if s.derived_from:
        lines.append(f"# derived from: {s.derived_from}")
    body = s.code if s.code else ""
    return "\n".join(lines) + "\n" + (body + "\n" if body else "")
