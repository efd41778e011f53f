// Composer state -> workflow manifest YAML, with the same validation rules
// the server applies, so "diagnostics empty" means the server will accept it.

export interface InlineStep {
  label: string;
  code: string;
  codeKind?: "builtin" | "shell" | "external";
  inputs: string[];
  outputs: string[];
}

export interface PlacedStep {
  id: string;
  uses?: string; // published step URI
  inline?: InlineStep;
  bind: Record<string, string>;
  after?: string[];
  // input/output names, known from the step card or the inline block
  inputNames: string[];
  outputNames: string[];
}

export interface ComposerState {
  label: string;
  description: string;
  inputs: string[];
  outputs: string[]; // "<step id>.<output>" refs
  steps: PlacedStep[];
}

const NAME = /^[A-Za-z_][A-Za-z0-9_]*$/;

export function validateComposer(state: ComposerState): string[] {
  const diagnostics: string[] = [];
  if (!state.label.trim()) diagnostics.push("workflow needs a label");
  if (state.steps.length === 0) diagnostics.push("add at least one step");

  const ids = new Set<string>();
  for (const step of state.steps) {
    if (!NAME.test(step.id)) diagnostics.push(`step id '${step.id}' is not an identifier`);
    if (ids.has(step.id)) diagnostics.push(`duplicate step id '${step.id}'`);
    ids.add(step.id);
    if (!step.uses && !step.inline) diagnostics.push(`step '${step.id}' has no source`);
  }

  const edges: [string, string][] = [];
  for (const step of state.steps) {
    for (const name of step.inputNames) {
      const spec = step.bind[name];
      if (!spec) {
        diagnostics.push(`unbound input ${step.id}.${name}`);
        continue;
      }
      const problem = checkBinding(spec, step, state, ids);
      if (problem) diagnostics.push(problem);
      const source = parseBindingSource(spec);
      if (source.kind === "step") edges.push([source.step, step.id]);
    }
    for (const dep of step.after ?? []) {
      if (!ids.has(dep)) diagnostics.push(`step '${step.id}' runs after unknown step '${dep}'`);
      else edges.push([dep, step.id]);
    }
  }

  for (const ref of state.outputs) {
    const [sid, out] = splitRef(ref);
    const step = state.steps.find((s) => s.id === sid);
    if (!step || !step.outputNames.includes(out)) {
      diagnostics.push(`workflow output '${ref}' does not name a step output`);
    }
  }

  const cycle = findCycle([...ids], edges);
  if (cycle) diagnostics.push("cycle: " + cycle.join("→"));
  return diagnostics;
}

type BindingSource =
  | { kind: "workflow"; name: string }
  | { kind: "const"; value: string }
  | { kind: "step"; step: string; output: string };

export function parseBindingSource(spec: string): BindingSource {
  if (spec.startsWith("const:")) return { kind: "const", value: spec.slice(6) };
  const dot = spec.indexOf(".");
  const owner = spec.slice(0, dot);
  const name = spec.slice(dot + 1);
  if (owner === "workflow") return { kind: "workflow", name };
  return { kind: "step", step: owner, output: name };
}

function checkBinding(
  spec: string,
  step: PlacedStep,
  state: ComposerState,
  ids: Set<string>,
): string | undefined {
  if (spec.startsWith("const:")) return undefined;
  const dot = spec.indexOf(".");
  if (dot <= 0) return `binding '${spec}' on ${step.id} is not workflow.<x>, const:<v>, or <step>.<out>`;
  const source = parseBindingSource(spec);
  if (source.kind === "workflow" && !state.inputs.includes(source.name)) {
    return `binding on ${step.id} references unknown workflow input '${source.name}'`;
  }
  if (source.kind === "step") {
    if (!ids.has(source.step)) return `binding on ${step.id} references unknown step '${source.step}'`;
    const origin = state.steps.find((s) => s.id === source.step);
    if (origin && !origin.outputNames.includes(source.output)) {
      return `step '${source.step}' has no output '${source.output}'`;
    }
  }
  return undefined;
}

function splitRef(ref: string): [string, string] {
  const dot = ref.indexOf(".");
  return dot < 0 ? [ref, ""] : [ref.slice(0, dot), ref.slice(dot + 1)];
}

export function findCycle(nodes: string[], edges: [string, string][]): string[] | null {
  const succ = new Map<string, string[]>(nodes.map((n) => [n, []]));
  for (const [a, b] of edges) succ.get(a)?.push(b);
  const state = new Map<string, number>(); // 0 unseen, 1 on stack, 2 done
  const stack: string[] = [];

  const visit = (n: string): string[] | null => {
    state.set(n, 1);
    stack.push(n);
    for (const m of succ.get(n) ?? []) {
      if (state.get(m) === 1) return [...stack.slice(stack.indexOf(m)), m];
      if (!state.get(m)) {
        const found = visit(m);
        if (found) return found;
      }
    }
    stack.pop();
    state.set(n, 2);
    return null;
  };

  for (const n of nodes) {
    if (!state.get(n)) {
      const found = visit(n);
      if (found) return found;
    }
  }
  return null;
}

// -- YAML emission -----------------------------------------------------------

const PLAIN_SCALAR = /^[A-Za-z0-9_][A-Za-z0-9_.\- ]*$/;

function quote(value: string): string {
  if (PLAIN_SCALAR.test(value) && !value.endsWith(" ") && !/^(true|false|null|yes|no|on|off)$/i.test(value)) {
    return value;
  }
  return '"' + value.replace(/\\/g, "\\\\").replace(/"/g, '\\"') + '"';
}

export function composerToYaml(state: ComposerState): string {
  const lines: string[] = ["workflow:"];
  lines.push(`  label: ${quote(state.label)}`);
  if (state.description) lines.push(`  description: ${quote(state.description)}`);
  if (state.inputs.length) lines.push(`  inputs: [${state.inputs.join(", ")}]`);
  if (state.outputs.length) lines.push(`  outputs: [${state.outputs.join(", ")}]`);
  lines.push("  steps:");
  for (const step of state.steps) {
    lines.push(`    - id: ${step.id}`);
    if (step.uses) {
      lines.push(`      uses: ${step.uses}`);
    } else if (step.inline) {
      lines.push("      step:");
      lines.push(`        label: ${quote(step.inline.label)}`);
      if (step.inline.codeKind && step.inline.codeKind !== "builtin") {
        lines.push(`        code_kind: ${step.inline.codeKind}`);
      }
      lines.push(`        code: ${quote(step.inline.code)}`);
      if (step.inline.inputs.length) {
        lines.push("        inputs:");
        for (const name of step.inline.inputs) lines.push(`          - {name: ${name}}`);
      }
      if (step.inline.outputs.length) {
        lines.push("        outputs:");
        for (const name of step.inline.outputs) lines.push(`          - {name: ${name}}`);
      }
    }
    const bound = Object.entries(step.bind);
    if (bound.length) {
      lines.push("      bind:");
      for (const [name, spec] of bound) lines.push(`        ${name}: ${quote(spec)}`);
    }
    if (step.after?.length) lines.push(`      after: [${step.after.join(", ")}]`);
  }
  return lines.join("\n") + "\n";
}
