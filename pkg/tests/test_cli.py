"""CLI tests, run through the real entry point to check the exit-code contract."""

import json
from pathlib import Path

import pytest

from plexflow.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


class Cli:
    """Invoke main() with a pinned registry/profile, capturing output."""

    def __init__(self, capsys, tmp_path):
        self.capsys = capsys
        self.registry = str(tmp_path / "registry")
        self.profile = str(tmp_path / "profile.yaml")

    def run(self, *args, fmt=None):
        base = ["--registry", self.registry, "--profile", self.profile]
        if fmt:
            base += ["--format", fmt]
        self.capsys.readouterr()  # drop anything pending
        code = main(base + list(args))
        captured = self.capsys.readouterr()
        return code, captured.out, captured.err


@pytest.fixture
def cli(capsys, tmp_path):
    harness = Cli(capsys, tmp_path)
    code, _, _ = harness.run("profile", "init", "--name", "CLI Tester")
    assert code == 0
    return harness


ADDER = """\
workflow:
  label: adder
  inputs: [a, b]
  outputs: [s1.out]
  steps:
    - id: s1
      step:
        label: sum of two numbers
        code: builtin:add
        inputs: [{name: a}, {name: b}]
        outputs: [{name: out}]
      bind: {a: workflow.a, b: workflow.b}
"""


class TestProfile:
    def test_init_writes_keypair(self, cli, tmp_path):
        assert (tmp_path / "profile.yaml").exists()
        assert (tmp_path / "profile.key").exists()
        assert (tmp_path / "profile.pub").exists()

    def test_second_init_needs_force(self, cli):
        code, _, err = cli.run("profile", "init", "--name", "Again")
        assert code == 1
        assert "exists" in err
        assert cli.run("profile", "init", "--name", "Again", "--force")[0] == 0


class TestPublish:
    def test_three_step_manifest_prints_four_uris(self, cli):
        code, out, _ = cli.run("publish", str(FIXTURES / "blend.yaml"))
        assert code == 0
        uris = out.strip().splitlines()
        assert len(uris) == 4
        assert all(u.startswith("http://purl.org/np/RA") for u in uris)

    def test_five_step_manifest_prints_six_uris(self, cli):
        code, out, _ = cli.run("publish", str(FIXTURES / "pencil_sketch.yaml"))
        assert code == 0
        assert len(out.strip().splitlines()) == 6

    def test_dry_run_prints_trig_and_stores_nothing(self, cli):
        code, out, _ = cli.run("publish", "--dry-run", str(FIXTURES / "blur_step.yaml"))
        assert code == 0
        assert "@prefix np:" in out
        code, out, _ = cli.run("search", "blur")
        assert "no results" in out

    def test_dry_run_then_publish_same_uris(self, cli):
        at = ["--at", "2026-03-01T12:00:00+00:00"]
        code, out, _ = cli.run("publish", "--dry-run", str(FIXTURES / "blend.yaml"), *at, fmt="json")
        assert code == 0
        dry = json.loads(out)["uris"]
        code, out, _ = cli.run("publish", str(FIXTURES / "blend.yaml"), *at, fmt="json")
        assert code == 0
        real = json.loads(out)["uris"]
        assert dry == real

    def test_missing_file_is_user_error(self, cli):
        code, _, err = cli.run("publish", "no-such-file.yaml")
        assert code == 1

    def test_publish_without_profile_is_user_error(self, capsys, tmp_path):
        bare = Cli(capsys, tmp_path / "other")
        code, _, err = bare.run("publish", str(FIXTURES / "blur_step.yaml"))
        assert code == 1
        assert "profile" in err


class TestSearchFetchInject:
    def test_search_finds_published_step(self, cli):
        cli.run("publish", str(FIXTURES / "blur_step.yaml"))
        code, out, _ = cli.run("search", "blur")
        assert code == 0
        assert "Add blur to image" in out

    def test_search_json_is_single_document(self, cli):
        cli.run("publish", str(FIXTURES / "blur_step.yaml"))
        code, out, _ = cli.run("search", "blur", fmt="json")
        doc = json.loads(out)
        assert doc["hits"][0]["label"] == "Add blur to image"

    def test_fetch_round_trip_and_verify(self, cli, tmp_path):
        _, out, _ = cli.run("publish", str(FIXTURES / "blur_step.yaml"))
        uri = out.strip()
        target = tmp_path / "fetched.trig"
        code, _, _ = cli.run("fetch", uri, "-o", str(target))
        assert code == 0
        assert cli.run("verify", str(target))[0] == 0

    def test_verify_tampered_file_fails(self, cli, tmp_path):
        _, out, _ = cli.run("publish", str(FIXTURES / "blur_step.yaml"))
        uri = out.strip()
        target = tmp_path / "fetched.trig"
        cli.run("fetch", uri, "-o", str(target))
        target.write_text(target.read_text().replace("gaussian", "boxcar"))
        code, out, _ = cli.run("verify", str(target))
        assert code == 1
        assert "FAILED" in out

    def test_inject_emits_template_with_uri(self, cli):
        _, out, _ = cli.run("publish", str(FIXTURES / "blur_step.yaml"))
        uri = out.strip()
        code, out, _ = cli.run("inject", uri)
        assert code == 0
        assert out.startswith(f"# plexflow step: {uri}#step")
        assert out.rstrip().endswith("builtin:concat")

    def test_fetch_unknown_uri_is_user_error(self, cli):
        code, _, err = cli.run("fetch", "http://purl.org/np/RA" + "q" * 43)
        assert code == 1


class TestRun:
    def test_builtin_add(self, cli, tmp_path):
        manifest = tmp_path / "adder.yaml"
        manifest.write_text(ADDER)
        code, out, _ = cli.run(
            "run", str(manifest), "--input", "a=int:2", "--input", "b=int:3"
        )
        assert code == 0
        assert "s1.out = 5" in out

    def test_run_json_output(self, cli, tmp_path):
        manifest = tmp_path / "adder.yaml"
        manifest.write_text(ADDER)
        code, out, _ = cli.run(
            "run", str(manifest), "--input", "a=int:2", "--input", "b=int:3", fmt="json"
        )
        doc = json.loads(out)
        assert doc["outputs"] == {"s1.out": 5}
        assert doc["steps_executed"] == 1

    def test_publish_prov_records_full_loop(self, cli):
        code, out, _ = cli.run(
            "run",
            str(FIXTURES / "blend.yaml"),
            "--input", "foreground=parrot",
            "--input", "background=field",
            "--publish-prov",
            fmt="json",
        )
        assert code == 0
        doc = json.loads(out)
        assert len(doc["prospective_uris"]) == 4
        assert len(doc["retrospective_uris"]) == 4
        assert doc["outputs"] == {"contrast.out": "parrotfield~blur"}

    def test_run_published_workflow_by_uri(self, cli):
        _, out, _ = cli.run("publish", str(FIXTURES / "blend.yaml"))
        plan_uri = out.strip().splitlines()[-1]
        code, out, _ = cli.run(
            "run", plan_uri,
            "--input", "foreground=p", "--input", "background=f",
            fmt="json",
        )
        assert code == 0
        assert json.loads(out)["outputs"] == {"contrast.out": "pf~blur"}

    def test_missing_input_is_user_error(self, cli, tmp_path):
        manifest = tmp_path / "adder.yaml"
        manifest.write_text(ADDER)
        code, _, err = cli.run("run", str(manifest), "--input", "a=int:2")
        assert code == 1
        assert "missing workflow input" in err


class TestStatsAndQuery:
    def seed(self, cli):
        cli.run("run", str(FIXTURES / "pencil_sketch.yaml"),
                "--input", "image=IMG", "--publish-prov")

    def test_stats_plan_sizes(self, cli):
        self.seed(cli)
        code, out, _ = cli.run("stats", "plan-sizes", fmt="json")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert ["Convert an image to a pencil sketch", 5] in rows

    def test_stats_executions(self, cli):
        self.seed(cli)
        code, out, _ = cli.run("stats", "executions", fmt="json")
        rows = dict(map(tuple, json.loads(out)["rows"]))
        assert rows["Add blur to image"] == 1

    def test_query_from_file(self, cli, tmp_path):
        self.seed(cli)
        qfile = tmp_path / "q.rq"
        qfile.write_text(
            "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
            'SELECT ?s WHERE { ?s rdfs:label "Add blur to image" }\n'
        )
        code, out, _ = cli.run("query", str(qfile))
        assert code == 0
        assert "#step" in out

    def test_query_parse_error_is_user_error(self, cli, tmp_path):
        qfile = tmp_path / "bad.rq"
        qfile.write_text("SELECT ?s WHERE { FILTER(?s) }")
        code, _, err = cli.run("query", str(qfile))
        assert code == 1
        assert "unsupported" in err


class TestExitCodes:
    def test_unknown_command(self, cli):
        assert cli.run("frobnicate")[0] == 1

    def test_usage_error(self, cli):
        assert cli.run("publish")[0] == 1

    def test_internal_error_is_exit_two(self, cli, monkeypatch):
        import plexflow.cli as cli_module

        def boom(spec):
            raise RuntimeError("registry backend exploded")

        monkeypatch.setattr(cli_module, "open_registry", boom)
        code, _, err = cli.run("search", "blur")
        assert code == 2
        assert "internal error" in err


class TestEnvPrecedence:
    def test_env_vars_supply_defaults_and_flags_override(
        self, capsys, tmp_path, monkeypatch
    ):
        env_cli = Cli(capsys, tmp_path / "envside")
        assert env_cli.run("profile", "init", "--name", "Env User")[0] == 0
        env_cli.run("publish", str(FIXTURES / "blur_step.yaml"))

        monkeypatch.setenv("PLEXFLOW_REGISTRY", env_cli.registry)
        monkeypatch.setenv("PLEXFLOW_PROFILE", env_cli.profile)
        capsys.readouterr()
        code = main(["--format", "json", "search", "blur"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["hits"][0]["label"] == "Add blur to image"

        # an explicit flag beats the environment: empty registry, no hits
        capsys.readouterr()
        code = main(
            ["--registry", str(tmp_path / "elsewhere"), "--format", "json", "search", "blur"]
        )
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["hits"] == []

    def test_human_logs_go_to_stderr_with_json_format(self, cli):
        code, out, err = cli.run("publish", str(FIXTURES / "blur_step.yaml"), fmt="json")
        assert code == 0
        json.loads(out)
        assert "published" in err
