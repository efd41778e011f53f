"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Criteria 1-6 cover the primary component; criterion 7 (web UI
end-to-end) lives in frontend/ and runs under its own test runner, so this
module only reports where it is.
"""

import json
import random
import string
import time
from dataclasses import replace
from pathlib import Path

import pytest

from plexflow.cli import main
from plexflow.engine import build_graph, execute
from plexflow.errors import CycleError, NanopubError
from plexflow.manifest import (
    parse_step_manifest,
    parse_workflow_manifest,
    step_manifest_to_yaml,
    workflow_manifest_to_yaml,
)
from plexflow.model import step_from_rdf, step_to_rdf, workflow_from_rdf, workflow_to_rdf
from plexflow.nanopub import assemble, generate_profile, nanopub_from_dataset, sign, verify
from plexflow.query import (
    PLAN_SIZES_QUERY,
    STEP_EXECUTIONS_QUERY,
    STEP_REUSE_QUERY,
    evaluate,
    parse_query,
)
from plexflow.rdf import Dataset, Quad, iri, literal, parse_trig, serialize_trig
from plexflow.registry import (
    RegistryStore,
    fetch_workflow,
    publish_retroprov,
    publish_workflow,
    resolve_manifest,
)
from plexflow import vocab

from . import oracle
from .corpus import seed_corpus
from .test_nanopub import mutate_quad
from .wfgen import random_dag_workflow

FIXTURES = Path(__file__).parent / "fixtures"


def report(criterion: int, text: str):
    print(f"ACCEPTANCE {criterion}: PASS - {text}")


@pytest.fixture(scope="module")
def signer():
    return generate_profile("Acceptance Signer", orcid="https://orcid.org/0000-0002-1825-0097")


def publish_fixture(name: str, store: RegistryStore, profile) -> tuple[list[str], list[str]]:
    """Publish a fixture workflow and one executed run; returns both URI lists."""
    w = resolve_manifest(parse_workflow_manifest((FIXTURES / name).read_text()), store)
    prospective = publish_workflow(w, profile, store)
    runnable = fetch_workflow(store, prospective[-1] + "#plan")
    inputs = {v.name: f"value-{v.name}" for v in runnable.workflow_inputs}
    result = execute(runnable, inputs)
    retrospective = publish_retroprov(result.retroprov, profile, store)
    return prospective, retrospective


def test_criterion_1_n_plus_one_law(signer):
    """A workflow of N steps publishes as exactly N+1 nanopubs, both ways."""
    started = time.monotonic()
    store = RegistryStore()
    pro5, retro5 = publish_fixture("pencil_sketch.yaml", store, signer)
    assert len(pro5) == 6, f"5-step fixture published {len(pro5)} prospective nanopubs"
    assert len(retro5) == 6, f"5-step fixture published {len(retro5)} retrospective nanopubs"
    pro3, retro3 = publish_fixture("blend.yaml", store, signer)
    assert len(pro3) == 4
    assert len(retro3) == 4
    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"took {elapsed:.2f}s, budget 5s"
    report(1, f"N+1 law: 5-step fixture 6/6, 3-step fixture 4/4 ({elapsed:.2f}s)")


def test_criterion_2_listings_match_oracle(signer):
    """The three analytics queries equal a brute-force join/group oracle."""
    started = time.monotonic()
    store = RegistryStore()
    seed_corpus(store, signer)
    checks = [
        (STEP_REUSE_QUERY, oracle.reuse_table),
        (STEP_EXECUTIONS_QUERY, oracle.executions_table),
        (PLAN_SIZES_QUERY, oracle.plan_sizes_table),
    ]
    for text, reference in checks:
        table = evaluate(parse_query(text), store)
        assert list(table.rows) == reference(store), f"mismatch for {reference.__name__}"
    reuse = dict(evaluate(parse_query(STEP_REUSE_QUERY), store).rows)
    assert reuse["Add blur to image"] == 3
    sizes = dict(evaluate(parse_query(PLAN_SIZES_QUERY), store).rows)
    assert sizes["Convert an image to a pencil sketch"] == 5
    elapsed = time.monotonic() - started
    assert elapsed < 2.0, f"took {elapsed:.2f}s, budget 2s"
    report(2, f"three queries match the brute-force oracle exactly ({elapsed:.2f}s)")


def test_criterion_3_integrity(signer):
    """Every single-quad mutation is rejected; minting is deterministic."""
    assertion = [
        (iri("http://example.org/step"), iri(vocab.RDF_TYPE), iri(vocab.PPLAN_STEP)),
        (iri("http://example.org/step"), iri(vocab.RDFS_LABEL), literal("Add blur to image")),
        (iri("http://example.org/step"), iri(vocab.DCT_DESCRIPTION), literal("soften it")),
    ]
    from datetime import datetime, timezone

    at = datetime(2026, 3, 1, tzinfo=timezone.utc)
    np = sign(assemble(assertion, profile=signer, at=at), signer)
    quads = np.head + np.assertion + np.provenance + np.pubinfo
    rng = random.Random(2026)
    rejected = 0
    total = 500
    while rejected < total:
        idx = rng.randrange(len(quads))
        mutated = list(quads)
        mutated[idx] = mutate_quad(quads[idx], rng)
        if mutated[idx] == quads[idx]:
            continue
        try:
            tampered = nanopub_from_dataset(Dataset(mutated))
        except NanopubError:
            rejected += 1
            continue
        assert not verify(tampered).ok, f"undetected mutation of quad {idx}"
        rejected += 1

    uris = set()
    for _ in range(3):
        u = assemble(assertion, profile=signer, at=at)
        uris.add(sign(u, signer).uri)
    assert len(uris) == 1, f"minting not deterministic: {uris}"
    report(3, f"{total}/{total} single-quad mutations rejected; 3 mints byte-identical")


def _random_term(rng: random.Random, kind: str):
    name = "".join(rng.choices(string.ascii_lowercase + string.digits, k=rng.randint(1, 8)))
    if kind == "iri":
        return iri(f"http://example.org/{name}#{rng.randint(0, 99)}")
    choice = rng.random()
    text = "".join(rng.choices(string.printable[:95] + "é世", k=rng.randint(0, 20)))
    if choice < 0.4:
        return literal(text)
    if choice < 0.7:
        return literal(text, language=rng.choice(["en", "nl", "en-US"]))
    return literal(text, datatype=f"http://example.org/dt/{name}")


def _random_dataset(rng: random.Random) -> Dataset:
    graphs = [_random_term(rng, "iri") for _ in range(rng.randint(1, 3))]
    quads = [
        Quad(
            _random_term(rng, "iri"),
            _random_term(rng, "iri"),
            _random_term(rng, "any"),
            rng.choice(graphs),
        )
        for _ in range(rng.randint(0, 12))
    ]
    prefixes = {"ex": "http://example.org/", "np": vocab.NP}
    return Dataset(quads, prefixes)


def test_criterion_4_round_trips(signer):
    """TriG, model RDF, and manifest round trips are exact."""
    rng = random.Random(404)
    for case in range(1000):
        d = _random_dataset(rng)
        assert parse_trig(serialize_trig(d)) == d, f"TriG round trip failed on case {case}"

    for case in range(100):
        w = random_dag_workflow(rng)
        uris = {sid: f"urn:plex:{sid}#step" for sid in w.steps}
        quads = list(workflow_to_rdf(w, "urn:plex:plan0", uris))
        for sid, step in w.steps.items():
            quads += list(step_to_rdf(step, f"urn:plex:{sid}"))
        back = workflow_from_rdf(quads, "urn:plex:plan0#plan")
        assert back.label == w.label
        assert list(back.steps) == list(w.steps)
        assert {sid: replace(s, uri=None) for sid, s in back.steps.items()} == w.steps
        assert back.bindings == w.bindings
        assert back.after_edges == w.after_edges
        one = next(iter(w.steps.values()))
        again = step_from_rdf(step_to_rdf(one, "urn:plex:x"), "urn:plex:x#step")
        assert replace(again, uri=None) == one

    for name in ("pencil_sketch.yaml", "blend.yaml"):
        m = parse_workflow_manifest((FIXTURES / name).read_text())
        text = workflow_manifest_to_yaml(m)
        assert parse_workflow_manifest(text) == m
        assert workflow_manifest_to_yaml(parse_workflow_manifest(text)) == text
    s = parse_step_manifest((FIXTURES / "blur_step.yaml").read_text())
    assert parse_step_manifest(step_manifest_to_yaml(s)) == s
    report(4, "1000 TriG, 100 workflow-RDF, and all manifest round trips exact")


def test_criterion_5_end_to_end_reuse_loop(tmp_path, capsys):
    """Publish, search, compose-by-URI, publish with lineage, run, count."""
    started = time.monotonic()
    registry = str(tmp_path / "registry")
    profile_path = str(tmp_path / "profile.yaml")
    base = ["--registry", registry, "--profile", profile_path, "--format", "json"]

    def run_cli(*args) -> dict:
        capsys.readouterr()
        code = main(base + list(args))
        out = capsys.readouterr().out
        assert code == 0, f"cli {' '.join(args)} exited {code}"
        return json.loads(out) if out.strip() else {}

    run_cli("profile", "init", "--name", "Loop Tester")
    step_uri = run_cli("publish", str(FIXTURES / "blur_step.yaml"))["uris"][0]

    hits = run_cli("search", "blur")["hits"]
    assert hits and hits[0]["label"] == "Add blur to image"
    assert hits[0]["uri"] == step_uri

    composed = tmp_path / "composed.yaml"
    composed.write_text(
        "workflow:\n"
        "  label: blur reuse loop\n"
        "  inputs: [image]\n"
        "  outputs: [s1.out]\n"
        "  steps:\n"
        "    - id: s1\n"
        f"      uses: {step_uri}\n"
        '      bind: {img: workflow.image, mark: "const:~blur"}\n'
    )
    plan_uris = run_cli("publish", str(composed))["uris"]
    assert len(plan_uris) == 2

    reuse_rows = dict(map(tuple, run_cli("stats", "reuse")["rows"]))
    assert reuse_rows == {"Add blur to image": 1}, "derivation triple missing or miscounted"

    outcome = run_cli(
        "run", plan_uris[-1] + "#plan", "--input", "image=photo", "--publish-prov"
    )
    assert outcome["outputs"] == {"s1.out": "photo~blur"}
    assert len(outcome["retrospective_uris"]) == 2

    exec_rows = dict(map(tuple, run_cli("stats", "executions")["rows"]))
    assert exec_rows == {"Add blur to image": 1}

    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"took {elapsed:.2f}s, budget 10s"
    report(5, f"publish -> search -> compose -> lineage 1 -> run -> executions 1 ({elapsed:.2f}s)")


def test_criterion_6_execution_engine():
    """Topological soundness on 200+ random DAGs; cycles rejected; determinism."""
    rng = random.Random(606)
    dag_count = 0
    while dag_count < 200:
        w = random_dag_workflow(rng)
        r1 = execute(w, {"seed": "s"})
        r2 = execute(w, {"seed": "s"})
        assert r1.outputs == r2.outputs, "builtin execution not deterministic"
        records = r1.retroprov.step_executions
        assert len(records) == len(w.steps)
        position = {
            se.step_uri.removeprefix("urn:plex:step:"): i for i, se in enumerate(records)
        }
        for a, b in build_graph(w).edges:
            assert position[a] < position[b], f"{a} must run before {b}"
            assert records[position[b]].started >= records[position[a]].ended
        dag_count += 1

    cycle_count = 0
    while cycle_count < 50:
        from plexflow.model import FairWorkflow, StepOutput
        from .wfgen import toy_step

        k = rng.randint(1, 5)
        ids = [f"c{i}" for i in range(k)]
        steps = {sid: toy_step(sid, 1) for sid in ids}
        bindings = {
            (sid, "in0"): StepOutput(ids[(i - 1) % k], "out") for i, sid in enumerate(ids)
        }
        with pytest.raises(CycleError):
            build_graph(FairWorkflow(label="cyclic", steps=steps, bindings=bindings))
        cycle_count += 1
    report(6, "200 DAGs topologically sound and deterministic; 50 cycles rejected")


def test_criterion_7_delegated_to_frontend():
    """The web UI end-to-end suite lives in frontend/ (vitest)."""
    print(
        "ACCEPTANCE 7: SKIP here - web UI end-to-end runs via "
        "`npm test` in frontend/ against a served registry"
    )
