"""Dependency-graph construction and workflow execution.

Steps run sequentially in a deterministic topological order (ties broken by
declaration order). Every run records retrospective provenance: one
StepExecution per executed step plus the surrounding WorkflowExecution,
so a workflow of N steps always yields N+1 retrospective assertion sets.
A failed run raises ExecutionError carrying a well-formed partial record
covering the steps that completed.

Values crossing the engine boundary are scalars and strings only; larger
payloads travel as file paths handled by shell steps. Shell steps speak a
JSON protocol: the input map arrives as one JSON object on stdin, and
stdout must be a JSON object with every declared output (exit 0 required;
`PLEXFLOW_STEP_URI` is set in the environment when the step has a URI).
"""

from __future__ import annotations

import json
import os
import subprocess
import uuid
from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import CycleError, ExecutionError, ModelError
from .model import (
    Constant,
    FairStep,
    FairWorkflow,
    StepExecution,
    StepOutput,
    ValueRecord,
    WorkflowExecution,
    WorkflowInput,
    dependency_edges,
    find_cycle,
    validate_workflow,
)
from .timeutil import utc_now

Value = str | int | float | bool
DEFAULT_TIMEOUT = 30.0


@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def predecessors(self, node: str) -> tuple[str, ...]:
        return tuple(a for a, b in self.edges if b == node)


def build_graph(w: FairWorkflow) -> DependencyGraph:
    """Call graph of a workflow: data-flow bindings plus `after` edges."""
    validate_workflow(w)
    nodes = tuple(w.steps)
    edges = tuple(dependency_edges(w))
    cycle = find_cycle(nodes, edges)
    if cycle:
        raise CycleError(cycle)
    return DependencyGraph(nodes, edges)


def topological_order(graph: DependencyGraph) -> tuple[str, ...]:
    """Kahn's algorithm; among ready nodes, declaration order wins."""
    remaining = dict.fromkeys(graph.nodes)
    done: set[str] = set()
    order: list[str] = []
    while remaining:
        ready = [n for n in remaining if all(p in done for p in graph.predecessors(n))]
        if not ready:
            raise CycleError(list(remaining))
        nxt = ready[0]
        order.append(nxt)
        done.add(nxt)
        del remaining[nxt]
    return tuple(order)


# ---------------------------------------------------------------------------
# Executors
# ---------------------------------------------------------------------------

BUILTIN_OPS = ("add", "mul", "neg", "concat", "upper", "lower", "repeat", "len", "identity")


def _need_numbers(op: str, args: tuple[Value, ...]) -> list[int | float]:
    out = []
    for a in args:
        if isinstance(a, bool) or not isinstance(a, (int, float)):
            raise ExecutionError(f"builtin:{op} expects numbers, got {type(a).__name__}")
        out.append(a)
    return out


def _need_strings(op: str, args: tuple[Value, ...]) -> list[str]:
    for a in args:
        if not isinstance(a, str):
            raise ExecutionError(f"builtin:{op} expects strings, got {type(a).__name__}")
    return list(args)


_UNBOUNDED = -1


def _arity(op: str, args: tuple[Value, ...], low: int, high: int = 0):
    high = low if high == 0 else high
    if len(args) < low or (high != _UNBOUNDED and len(args) > high):
        raise ExecutionError(
            f"builtin:{op} takes {low}{'+' if high == _UNBOUNDED else ''} argument(s), got {len(args)}"
        )


def builtin_eval(op: str, args: tuple[Value, ...] | list[Value]) -> Value:
    """Toy step vocabulary: arithmetic on numbers, string transforms."""
    args = tuple(args)
    if op == "add":
        _arity(op, args, 2, _UNBOUNDED)
        return sum(_need_numbers(op, args))
    if op == "mul":
        _arity(op, args, 2, _UNBOUNDED)
        out: int | float = 1
        for a in _need_numbers(op, args):
            out *= a
        return out
    if op == "neg":
        _arity(op, args, 1)
        return -_need_numbers(op, args)[0]
    if op == "concat":
        _arity(op, args, 2, _UNBOUNDED)
        return "".join(_need_strings(op, args))
    if op == "upper":
        _arity(op, args, 1)
        return _need_strings(op, args)[0].upper()
    if op == "lower":
        _arity(op, args, 1)
        return _need_strings(op, args)[0].lower()
    if op == "repeat":
        _arity(op, args, 2)
        text, count = args
        if not isinstance(text, str) or isinstance(count, bool) or not isinstance(count, int):
            raise ExecutionError("builtin:repeat expects (string, int)")
        return text * count
    if op == "len":
        _arity(op, args, 1)
        return len(_need_strings(op, args)[0])
    if op == "identity":
        _arity(op, args, 1)
        return args[0]
    raise ExecutionError(f"unknown builtin operation {op!r}")


def run_builtin(step: FairStep, inputs: Mapping[str, Value]) -> dict[str, Value]:
    """Apply a `builtin:<op>` step: args in declared input order, one output."""
    if not step.code.startswith("builtin:"):
        raise ExecutionError(f"step {step.label!r} has no builtin code")
    op = step.code.removeprefix("builtin:")
    args = tuple(inputs[v.name] for v in step.inputs)
    if len(step.outputs) != 1:
        raise ExecutionError(f"builtin step {step.label!r} must declare exactly one output")
    return {step.outputs[0].name: builtin_eval(op, args)}


def shell_execute(
    step: FairStep,
    inputs: Mapping[str, Value],
    timeout: float = DEFAULT_TIMEOUT,
    step_uri: str | None = None,
) -> dict[str, Value]:
    """Run the step's code as a shell command speaking the JSON protocol."""
    if step.code_kind != "shell":
        raise ExecutionError(f"step {step.label!r} is not a shell step")
    env = dict(os.environ)
    if step_uri:
        env["PLEXFLOW_STEP_URI"] = step_uri
    try:
        proc = subprocess.run(
            step.code,
            shell=True,
            input=json.dumps(dict(inputs)),
            capture_output=True,
            text=True,
            timeout=timeout,
            env=env,
        )
    except subprocess.TimeoutExpired:
        raise ExecutionError(f"step {step.label!r} timed out after {timeout}s")
    if proc.returncode != 0:
        raise ExecutionError(
            f"step {step.label!r} exited with {proc.returncode}: {proc.stderr.strip()}"
        )
    try:
        payload = json.loads(proc.stdout)
    except json.JSONDecodeError as exc:
        raise ExecutionError(f"step {step.label!r} wrote malformed output JSON: {exc}")
    if not isinstance(payload, dict):
        raise ExecutionError(f"step {step.label!r} must write a JSON object on stdout")
    for v in step.outputs:
        if v.name not in payload:
            raise ExecutionError(f"step {step.label!r} did not produce declared output {v.name!r}")
    return payload


PromptFn = Callable[[str], "str | None"]


def terminal_prompt(message: str) -> str | None:
    try:
        return input(message)
    except (EOFError, KeyboardInterrupt):
        return None


def manual_execute(
    step: FairStep, inputs: Mapping[str, Value], prompt: PromptFn = terminal_prompt
) -> dict[str, Value]:
    """Guide a human through a manual task, collecting one value per output."""
    if not step.is_manual:
        raise ExecutionError(f"step {step.label!r} is not a manual task")
    header = [f"MANUAL TASK: {step.label}"]
    if step.description:
        header.append(step.description)
    for name in sorted(inputs):
        header.append(f"  input {name} = {inputs[name]!r}")
    text = "\n".join(header)
    if not step.outputs:
        if prompt(f"{text}\nPress enter when done: ") is None:
            raise ExecutionError(f"manual task {step.label!r} aborted")
        return {}
    outputs: dict[str, Value] = {}
    for i, v in enumerate(step.outputs):
        lead = text + "\n" if i == 0 else ""
        answer = prompt(f"{lead}Value for output {v.name!r}: ")
        if answer is None:
            raise ExecutionError(f"manual task {step.label!r} aborted")
        outputs[v.name] = answer
    return outputs


@dataclass(frozen=True)
class Executor:
    kind: str
    run: Callable[[FairStep, Mapping[str, Value]], dict[str, Value]]


def default_executors(
    prompt: PromptFn = terminal_prompt, timeout: float = DEFAULT_TIMEOUT
) -> dict[str, Executor]:
    return {
        "builtin": Executor("builtin", run_builtin),
        "shell": Executor(
            "shell",
            lambda step, inputs: shell_execute(step, inputs, timeout=timeout, step_uri=step.uri),
        ),
        "manual": Executor("manual", lambda step, inputs: manual_execute(step, inputs, prompt)),
    }


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExecutionResult:
    outputs: dict[str, Value]
    retroprov: WorkflowExecution


def _check_value(value, where: str) -> Value:
    if isinstance(value, (str, int, float, bool)):
        return value
    raise ExecutionError(f"{where}: unsupported value type {type(value).__name__}")


def execute(
    w: FairWorkflow,
    inputs: Mapping[str, Value],
    executors: Mapping[str, Executor] | None = None,
    prompt: PromptFn = terminal_prompt,
    timeout: float = DEFAULT_TIMEOUT,
) -> ExecutionResult:
    """Run all steps in topological order, recording retrospective provenance."""
    graph = build_graph(w)
    order = topological_order(graph)
    executors = dict(executors) if executors is not None else default_executors(prompt, timeout)

    missing = [n for n in w.input_names() if n not in inputs]
    if missing:
        raise ExecutionError(f"missing workflow input(s): {', '.join(missing)}")

    run_id = uuid.uuid4().hex[:12]
    started = utc_now()
    produced: dict[tuple[str, str], Value] = {}
    records: list[StepExecution] = []

    def partial() -> WorkflowExecution:
        return WorkflowExecution(
            execution_uri=f"urn:plex:run:{run_id}#execution",
            plan_uri=w.uri or "urn:plex:plan:unpublished",
            step_executions=tuple(records),
            started=started,
            ended=utc_now(),
            outputs={},
        )

    for sid in order:
        step = w.steps[sid]
        step_inputs: dict[str, Value] = {}
        for v in step.inputs:
            source = w.bindings[(sid, v.name)]
            if isinstance(source, WorkflowInput):
                step_inputs[v.name] = _check_value(inputs[source.name], f"input {source.name}")
            elif isinstance(source, Constant):
                step_inputs[v.name] = source.value
            elif isinstance(source, StepOutput):
                step_inputs[v.name] = produced[(source.step, source.output)]

        kind = "manual" if step.is_manual else step.code_kind
        executor = executors.get(kind)
        if executor is None:
            raise ExecutionError(f"no executor for kind {kind!r}", step_id=sid, partial=partial())

        step_started = utc_now()
        try:
            outputs = executor.run(step, step_inputs)
        except ExecutionError as exc:
            raise ExecutionError(f"step {sid!r} failed: {exc}", step_id=sid, partial=partial())
        step_ended = utc_now()

        declared = {v.name for v in step.outputs}
        undeclared = set(outputs) - declared
        if undeclared:
            raise ExecutionError(
                f"step {sid!r} returned undeclared output(s): {sorted(undeclared)}",
                step_id=sid,
                partial=partial(),
            )
        absent = declared - set(outputs)
        if absent:
            raise ExecutionError(
                f"step {sid!r} did not return declared output(s): {sorted(absent)}",
                step_id=sid,
                partial=partial(),
            )
        for name, value in outputs.items():
            produced[(sid, name)] = _check_value(value, f"output {sid}.{name}")

        records.append(
            StepExecution(
                activity_uri=f"urn:plex:run:{run_id}:{sid}#activity",
                step_uri=step.uri or f"urn:plex:step:{sid}",
                started=step_started,
                ended=step_ended,
                input_values={k: ValueRecord.capture(v) for k, v in step_inputs.items()},
                output_values={k: ValueRecord.capture(v) for k, v in outputs.items()},
            )
        )

    workflow_outputs: dict[str, Value] = {}
    for ref in w.workflow_outputs:
        sid, _, out = ref.partition(".")
        workflow_outputs[ref] = produced[(sid, out)]

    retro = WorkflowExecution(
        execution_uri=f"urn:plex:run:{run_id}#execution",
        plan_uri=w.uri or "urn:plex:plan:unpublished",
        step_executions=tuple(records),
        started=started,
        ended=utc_now(),
        outputs={k: ValueRecord.capture(v) for k, v in workflow_outputs.items()},
    )
    return ExecutionResult(outputs=workflow_outputs, retroprov=retro)
