"""Step reuse: search the registry, compose by URI, track lineage.

Run:  python demos/03_reuse_and_lineage.py
"""

from plexflow import FairStep, RegistryStore, Variable, evaluate, generate_profile, parse_query
from plexflow.manifest import emit_code_template, parse_workflow_manifest
from plexflow.query import STEP_REUSE_QUERY
from plexflow.registry import fetch_step, publish_step, publish_workflow, resolve_manifest

store = RegistryStore()
profile = generate_profile("Demo Signer")

blur = FairStep(
    label="Add blur to image",
    description="soften the image with a gaussian kernel",
    code="builtin:concat",
    inputs=(Variable("img", semantic_types=("http://example.org/imaging#Image",)), Variable("mark")),
    outputs=(Variable("out"),),
)
blur_np = publish_step(blur, profile, store)
print("published step:", blur_np)

hit = store.search_text("blur")[0]
print(f"search 'blur' -> {hit.label!r} (score {hit.score:.0f})")

# The inject flow: fetch the step and render an editable template.
fetched = fetch_step(store, hit.uri)
print("\n--- code template ---")
print(emit_code_template(fetched))

# Compose a workflow that reuses the published step by URI.
manifest = parse_workflow_manifest(
    f"""\
workflow:
  label: reuse demo
  inputs: [image]
  outputs: [s1.out]
  steps:
    - id: s1
      uses: {blur_np}
      bind: {{img: workflow.image, mark: "const:~blur"}}
"""
)
workflow = resolve_manifest(manifest, store)
print("derived from:", workflow.steps["s1"].derived_from)
uris = publish_workflow(workflow, profile, store)
print(f"workflow published as {len(uris)} nanopubs")

table = evaluate(parse_query(STEP_REUSE_QUERY), store)
print("\nstep reuse counts:")
for label, count in table.rows:
    print(f"  {label}: {count}")
