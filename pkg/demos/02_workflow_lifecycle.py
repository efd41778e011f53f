"""Full lifecycle: manifest -> N+1 prospective nanopubs -> execution -> N+1
retrospective nanopubs -> analytics queries.

Run:  python demos/02_workflow_lifecycle.py
"""

from plexflow import RegistryStore, evaluate, execute, generate_profile, parse_query
from plexflow.manifest import parse_workflow_manifest
from plexflow.query import PLAN_SIZES_QUERY, STEP_EXECUTIONS_QUERY
from plexflow.registry import fetch_workflow, publish_retroprov, publish_workflow, resolve_manifest

MANIFEST = """\
workflow:
  label: Convert an image to a pencil sketch
  inputs: [image]
  outputs: [finish.out]
  steps:
    - id: gray
      step:
        label: Convert image to grayscale
        code: builtin:lower
        inputs: [{name: img}]
        outputs: [{name: out}]
      bind: {img: workflow.image}
    - id: soften
      step:
        label: Add blur to image
        code: builtin:concat
        inputs: [{name: img}, {name: mark}]
        outputs: [{name: out}]
      bind: {img: gray.out, mark: "const:~blur"}
    - id: finish
      step:
        label: contrast image by factor
        code: builtin:repeat
        inputs: [{name: img}, {name: factor}]
        outputs: [{name: out}]
      bind: {img: soften.out, factor: "const:int:1"}
"""

store = RegistryStore()  # pass a directory path to persist
profile = generate_profile("Demo Signer")

workflow = resolve_manifest(parse_workflow_manifest(MANIFEST), store)
prospective = publish_workflow(workflow, profile, store)
print(f"prospective nanopubs ({len(workflow.steps)} steps + 1 plan = {len(prospective)}):")
for uri in prospective:
    print(" ", uri)

# Fetch the published plan back so step URIs flow into the provenance record.
runnable = fetch_workflow(store, prospective[-1] + "#plan")
result = execute(runnable, {"image": "IMG"})
print("\noutputs:", result.outputs)

retrospective = publish_retroprov(result.retroprov, profile, store)
print(f"retrospective nanopubs ({len(retrospective)}):")
for uri in retrospective:
    print(" ", uri)

for title, query in (("plan sizes", PLAN_SIZES_QUERY), ("executions per step", STEP_EXECUTIONS_QUERY)):
    table = evaluate(parse_query(query), store)
    print(f"\n{title}:")
    for row in table.rows:
        print(" ", row)
