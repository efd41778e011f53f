"""Tests for the step/workflow/execution model and its RDF emitters."""

import random
from dataclasses import replace
from datetime import datetime, timedelta, timezone

import pytest

from plexflow import vocab
from plexflow.errors import CycleError, ModelError
from plexflow.model import (
    Constant,
    FairStep,
    FairWorkflow,
    StepExecution,
    StepOutput,
    ValueRecord,
    Variable,
    WorkflowExecution,
    WorkflowInput,
    dependency_edges,
    mark_derivation,
    retroprov_to_rdf,
    step_from_rdf,
    step_to_rdf,
    validate_workflow,
    workflow_from_rdf,
    workflow_to_rdf,
)
from plexflow.rdf import Dataset, iri, literal, match

from .wfgen import linear_workflow, random_dag_workflow, toy_step

BASE = "urn:plex:test:np1"
T0 = datetime(2026, 3, 1, 12, 0, 0, tzinfo=timezone.utc)


def count(quads, predicate=None, subject=None):
    d = Dataset(quads)
    return len(
        match(
            d,
            (
                iri(subject) if subject else None,
                iri(predicate) if predicate else None,
                None,
                None,
            ),
        )
    )


def blur_step():
    return FairStep(
        label="Add blur to image",
        code="builtin:identity",
        inputs=(Variable("img", semantic_types=("http://example.org/Image",)),),
        outputs=(Variable("out"),),
    )


class TestVariables:
    def test_name_validated(self):
        with pytest.raises(ModelError):
            Variable("not a name")

    def test_semantic_types_normalized(self):
        v = Variable("x", semantic_types=("http://b.org/T", "http://a.org/T", "http://b.org/T"))
        assert v.semantic_types == ("http://a.org/T", "http://b.org/T")

    def test_duplicate_input_names_rejected(self):
        with pytest.raises(ModelError, match="duplicate"):
            FairStep(label="s", inputs=(Variable("x"), Variable("x")))

    def test_same_name_across_inputs_and_outputs_allowed(self):
        s = FairStep(label="echo", inputs=(Variable("out"),), outputs=(Variable("out"),))
        assert s.inputs[0].name == s.outputs[0].name


class TestStepRdf:
    def test_blur_step_quad_shape(self):
        quads = step_to_rdf(blur_step(), BASE)
        step = BASE + "#step"
        assert count(quads, vocab.RDFS_LABEL, step) == 1
        assert count(quads, vocab.PPLAN_HAS_INPUT_VAR, step) == 1
        assert count(quads, vocab.PPLAN_HAS_OUTPUT_VAR, step) == 1
        assert count(quads, vocab.PLEX_HAS_SOURCE_CODE, step) == 1
        assert count(quads, vocab.RDF_TYPE, step) == 2  # p-plan:Step + plex:ScriptTask
        type_values = {q.object.value for q in quads if q.subject.value == step and q.predicate.value == vocab.RDF_TYPE}
        assert type_values == {vocab.PPLAN_STEP, vocab.PLEX_SCRIPT_TASK}

    def test_semantic_types_attached_to_variables(self):
        quads = step_to_rdf(blur_step(), BASE)
        var = BASE + "#in.img"
        types = {q.object.value for q in quads if q.subject.value == var and q.predicate.value == vocab.RDF_TYPE}
        assert types == {vocab.PPLAN_VARIABLE, "http://example.org/Image"}

    def test_manual_step_has_no_code_quad(self):
        s = FairStep(label="inspect result", is_manual=True, code="")
        quads = step_to_rdf(s, BASE)
        assert count(quads, vocab.PLEX_HAS_SOURCE_CODE) == 0
        types = {q.object.value for q in quads if q.predicate.value == vocab.RDF_TYPE}
        assert vocab.PLEX_MANUAL_TASK in types

    def test_round_trip(self):
        s = FairStep(
            label="Blend two images",
            description="overlay foreground on background",
            code="builtin:concat",
            inputs=(Variable("fg"), Variable("bg", description="backdrop")),
            outputs=(Variable("out", semantic_types=("http://example.org/Image",)),),
        )
        back = step_from_rdf(step_to_rdf(s, BASE), BASE + "#step")
        assert replace(back, uri=None) == s

    def test_round_trip_preserves_declaration_order(self):
        s = FairStep(
            label="ordered",
            code="builtin:concat",
            inputs=(Variable("zeta"), Variable("alpha")),
            outputs=(Variable("out"),),
        )
        back = step_from_rdf(step_to_rdf(s, BASE), BASE + "#step")
        assert [v.name for v in back.inputs] == ["zeta", "alpha"]

    def test_missing_label_is_an_error(self):
        quads = [q for q in step_to_rdf(blur_step(), BASE) if q.predicate.value != vocab.RDFS_LABEL]
        with pytest.raises(ModelError, match="label"):
            step_from_rdf(quads, BASE + "#step")

    def test_missing_type_is_an_error(self):
        quads = [
            q
            for q in step_to_rdf(blur_step(), BASE)
            if not (q.predicate.value == vocab.RDF_TYPE and q.object.value == vocab.PPLAN_STEP)
        ]
        with pytest.raises(ModelError, match="type"):
            step_from_rdf(quads, BASE + "#step")

    def test_unrelated_quads_ignored(self):
        from plexflow.rdf import Quad

        noise = Quad(iri("urn:plex:other"), iri(vocab.RDFS_LABEL), literal("noise"), iri(BASE + "#assertion"))
        back = step_from_rdf(step_to_rdf(blur_step(), BASE) + (noise,), BASE + "#step")
        assert back.label == "Add blur to image"


class TestDerivation:
    def test_mark_sets_origin(self):
        origin = "http://purl.org/np/RAxyz#step"
        s = mark_derivation(blur_step(), origin)
        assert s.derived_from == origin

    def test_derivation_survives_round_trip(self):
        s = mark_derivation(blur_step(), "http://purl.org/np/RAxyz#step")
        back = step_from_rdf(step_to_rdf(s, BASE), BASE + "#step")
        assert back.derived_from == "http://purl.org/np/RAxyz#step"

    def test_fresh_step_emits_no_derivation(self):
        assert count(step_to_rdf(blur_step(), BASE), vocab.PROV_DERIVED_FROM) == 0

    def test_chain_is_not_flattened(self):
        a = "urn:plex:a#step"
        b_step = mark_derivation(blur_step(), a)
        # republish of B acquires its own uri; deriving C from B points at B only
        c_step = mark_derivation(replace(b_step, uri="urn:plex:b#step"), "urn:plex:b#step")
        assert c_step.derived_from == "urn:plex:b#step"

    def test_origin_must_be_iri(self):
        with pytest.raises(ModelError, match="IRI"):
            mark_derivation(blur_step(), "not an iri")


class TestWorkflowRdf:
    def uris(self, w):
        return {sid: f"urn:plex:{sid}#step" for sid in w.steps}

    def test_five_step_plan_membership(self):
        w = linear_workflow(5, label="Convert an image to a pencil sketch")
        quads = workflow_to_rdf(w, BASE, self.uris(w))
        assert count(quads, vocab.PPLAN_IS_STEP_OF_PLAN) == 5

    def test_single_step_no_precedes(self):
        w = linear_workflow(1)
        quads = workflow_to_rdf(w, BASE, self.uris(w))
        assert count(quads, vocab.PPLAN_IS_STEP_OF_PLAN) == 1
        assert count(quads, vocab.DUL_PRECEDES) == 0

    def test_linear_three_chain_has_two_precedes(self):
        w = linear_workflow(3)
        quads = workflow_to_rdf(w, BASE, self.uris(w))
        assert count(quads, vocab.DUL_PRECEDES) == 2

    def test_workflow_inputs_are_plan_variables(self):
        w = linear_workflow(2)
        quads = workflow_to_rdf(w, BASE, self.uris(w))
        hits = match(Dataset(quads), (None, iri(vocab.PPLAN_IS_VARIABLE_OF_PLAN), None, None))
        assert [h.subject.value for h in hits] == [BASE + "#in.seed"]

    def test_cycle_rejected(self):
        w = linear_workflow(2)
        w.bindings[("s1", "text")] = StepOutput("s2", "out")
        with pytest.raises(CycleError):
            workflow_to_rdf(w, BASE, self.uris(w))

    def test_unbound_input_rejected(self):
        w = linear_workflow(2)
        del w.bindings[("s2", "text")]
        with pytest.raises(ModelError, match="unbound input s2.text"):
            workflow_to_rdf(w, BASE, self.uris(w))

    def round_trip(self, w):
        uris = {sid: f"urn:plex:{sid}#step" for sid in w.steps}
        quads = list(workflow_to_rdf(w, BASE, uris))
        for sid, step in w.steps.items():
            quads += list(step_to_rdf(step, f"urn:plex:{sid}"))
        return workflow_from_rdf(quads, BASE + "#plan")

    def strip(self, w):
        w2 = FairWorkflow(
            label=w.label,
            description=w.description,
            steps={sid: replace(s, uri=None) for sid, s in w.steps.items()},
            bindings=dict(w.bindings),
            workflow_inputs=w.workflow_inputs,
            workflow_outputs=w.workflow_outputs,
            after_edges={k: tuple(sorted(v)) for k, v in w.after_edges.items() if v},
        )
        return w2

    def test_round_trip_linear(self):
        w = linear_workflow(3)
        back = self.round_trip(w)
        assert self.strip(back) == self.strip(w)
        assert list(back.steps) == ["s1", "s2", "s3"]

    def test_round_trip_random_dags(self):
        rng = random.Random(7)
        for _ in range(40):
            w = random_dag_workflow(rng)
            back = self.round_trip(w)
            assert self.strip(back) == self.strip(w), w.label

    def test_round_trip_preserves_constants(self):
        w = linear_workflow(1)
        w.steps["s1"] = replace(
            w.steps["s1"],
            inputs=w.steps["s1"].inputs + (Variable("n"), Variable("f"), Variable("b")),
            code="builtin:concat",
        )
        w.bindings[("s1", "n")] = Constant(3)
        w.bindings[("s1", "f")] = Constant(2.5)
        w.bindings[("s1", "b")] = Constant(True)
        back = self.round_trip(w)
        assert back.bindings[("s1", "n")] == Constant(3)
        assert back.bindings[("s1", "f")] == Constant(2.5)
        assert back.bindings[("s1", "b")] == Constant(True)


class TestRetroProv:
    def execution(self, n_steps):
        ses = tuple(
            StepExecution(
                activity_uri=f"urn:plex:run:1:s{i}#activity",
                step_uri=f"urn:plex:s{i}#step",
                started=T0,
                ended=T0 + timedelta(milliseconds=5),
                input_values={"x": ValueRecord.capture("v")},
                output_values={"out": ValueRecord.capture(i)},
            )
            for i in range(1, n_steps + 1)
        )
        return WorkflowExecution(
            execution_uri="urn:plex:run:1#execution",
            plan_uri="urn:plex:plan#plan",
            step_executions=ses,
            started=T0,
            ended=T0 + timedelta(seconds=1),
            outputs={"s1.out": ValueRecord.capture("done")},
        )

    def test_five_step_execution_yields_six_sets(self):
        assert len(retroprov_to_rdf(self.execution(5))) == 6

    def test_zero_step_execution_yields_one_set(self):
        assert len(retroprov_to_rdf(self.execution(0))) == 1

    def test_activity_quads(self):
        sets = retroprov_to_rdf(self.execution(1))
        act_quads = sets[0]
        assert count(act_quads, vocab.PPLAN_CORRESPONDS_TO_STEP) == 1
        assert count(act_quads, vocab.PROV_USED) == 1
        assert count(act_quads, vocab.PROV_GENERATED) == 1
        assert count(act_quads, vocab.PROV_STARTED_AT) == 1
        types = {q.object.value for q in act_quads if q.predicate.value == vocab.RDF_TYPE}
        assert types == {vocab.PPLAN_ACTIVITY}

    def test_workflow_set_links_plan_and_activities(self):
        sets = retroprov_to_rdf(self.execution(3))
        wf_quads = sets[-1]
        assert count(wf_quads, vocab.PROV_DERIVED_FROM) == 1
        assert count(wf_quads, vocab.PLEX_INCLUDES_ACTIVITY) == 3
        types = {q.object.value for q in wf_quads if q.predicate.value == vocab.RDF_TYPE}
        assert types == {vocab.PROV_BUNDLE}

    def test_started_after_ended_rejected(self):
        with pytest.raises(ModelError):
            StepExecution(
                activity_uri="urn:plex:a#activity",
                step_uri="urn:plex:s#step",
                started=T0,
                ended=T0 - timedelta(seconds=1),
            )


class TestValueRecord:
    def test_small_value_inline(self):
        vr = ValueRecord.capture("x" * 256)
        assert vr.kind == "inline"
        assert vr.content == "x" * 256

    def test_large_value_digested(self):
        vr = ValueRecord.capture("x" * 257)
        assert vr.kind == "digest"
        assert len(vr.content) == 64

    def test_inline_round_trips_exactly(self):
        from plexflow.model import constant_value

        for v in ("text", 42, 2.5, True, False):
            vr = ValueRecord.capture(v)
            assert constant_value(literal(vr.content, vr.datatype)) == v

    def test_utf8_boundary_counted_in_bytes(self):
        vr = ValueRecord.capture("é" * 129)  # 258 utf-8 bytes
        assert vr.kind == "digest"


class TestValidation:
    def test_dangling_binding_step(self):
        w = linear_workflow(1)
        w.bindings[("ghost", "x")] = Constant("1")
        with pytest.raises(ModelError, match="unknown step"):
            validate_workflow(w)

    def test_unknown_source_output(self):
        w = linear_workflow(2)
        w.bindings[("s2", "text")] = StepOutput("s1", "nope")
        with pytest.raises(ModelError, match="no output"):
            validate_workflow(w)

    def test_edges_deduplicated(self):
        w = linear_workflow(1)
        w.steps["s2"] = toy_step("two-in", 2, op="concat")
        w.bindings[("s2", "in0")] = StepOutput("s1", "out")
        w.bindings[("s2", "in1")] = StepOutput("s1", "out")
        assert dependency_edges(w) == [("s1", "s2")]
