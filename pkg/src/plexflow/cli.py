"""Command-line interface.

Exit codes: 0 success, 1 user error (bad input, failed verification,
unknown command), 2 internal error. With `--format json` every command
writes exactly one JSON document to stdout; progress notes go to stderr.

The registry is an embedded local store by default (a data directory); set
`--registry`/`PLEXFLOW_REGISTRY` to an http(s) URL to talk to a served
registry instead. Flags override environment variables.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import click
import yaml

from .client import open_registry, run_query
from .engine import execute
from .errors import ManifestError, NotFoundError, PlexflowError
from .manifest import emit_code_template, parse_step_manifest, parse_workflow_manifest
from .nanopub import (
    Nanopub,
    Profile,
    generate_profile,
    load_profile,
    nanopub_from_dataset,
    save_profile,
    validate_structure,
    verify,
)
from .query import PLAN_SIZES_QUERY, STEP_EXECUTIONS_QUERY, STEP_REUSE_QUERY, ResultTable
from .rdf import parse_trig, serialize_trig
from .registry import (
    fetch_step,
    fetch_workflow,
    publish_retroprov,
    publish_step,
    publish_workflow,
    resolve_manifest,
)
from .timeutil import to_utc_ms

DEFAULT_HOME = Path.home() / ".plexflow"

STATS_QUERIES = {
    "reuse": STEP_REUSE_QUERY,
    "executions": STEP_EXECUTIONS_QUERY,
    "plan-sizes": PLAN_SIZES_QUERY,
}


@dataclass
class CliConfig:
    registry_spec: str
    profile_path: Path
    output_format: str
    _registry: object = field(default=None, repr=False)

    @property
    def registry(self):
        if self._registry is None:
            self._registry = open_registry(self.registry_spec)
        return self._registry

    def profile(self) -> Profile:
        return load_profile(self.profile_path)


def info(message: str) -> None:
    click.echo(message, err=True)


def emit(cfg: CliConfig, data: dict, human: str) -> None:
    if cfg.output_format == "json":
        click.echo(json.dumps(data, indent=2))
    elif human:
        click.echo(human)


def format_table(table: ResultTable) -> str:
    headers = list(table.vars)
    rows = [[str(v) for v in row] for row in table.rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(r[i].ljust(widths[i]) for i in range(len(headers))) for r in rows]
    return "\n".join(lines)


def parse_at(value: str | None) -> datetime | None:
    if value is None:
        return None
    try:
        return to_utc_ms(datetime.fromisoformat(value))
    except ValueError:
        raise click.UsageError(f"--at must be an ISO-8601 timestamp, got {value!r}")


def parse_input_value(raw: str):
    for prefix, convert in (("int:", int), ("float:", float)):
        if raw.startswith(prefix):
            try:
                return convert(raw.removeprefix(prefix))
            except ValueError:
                raise click.UsageError(f"not a valid {prefix[:-1]} value: {raw!r}")
    if raw.startswith("bool:"):
        body = raw.removeprefix("bool:")
        if body not in ("true", "false"):
            raise click.UsageError(f"bool inputs must be true or false, got {body!r}")
        return body == "true"
    return raw


@click.group()
@click.option(
    "--registry",
    envvar="PLEXFLOW_REGISTRY",
    default=str(DEFAULT_HOME / "registry"),
    help="Registry data directory or http(s) URL of a served registry.",
)
@click.option(
    "--profile",
    "profile_path",
    envvar="PLEXFLOW_PROFILE",
    default=str(DEFAULT_HOME / "profile.yaml"),
    help="Profile file used for signing.",
)
@click.option("--format", "output_format", type=click.Choice(["human", "json"]), default="human")
@click.pass_context
def cli(ctx, registry, profile_path, output_format):
    """Publish, search, reuse, and run FAIR workflows as nanopublications."""
    ctx.obj = CliConfig(registry, Path(profile_path), output_format)


@cli.group()
def profile():
    """Manage the signing profile."""


@profile.command("init")
@click.option("--name", required=True)
@click.option("--orcid", default=None)
@click.option("--force", is_flag=True, help="Overwrite an existing profile.")
@click.pass_obj
def profile_init(cfg: CliConfig, name, orcid, force):
    """Generate a keypair and write the profile file."""
    path = cfg.profile_path
    if path.exists() and not force:
        raise click.UsageError(f"profile already exists at {path} (use --force to replace)")
    prof = generate_profile(name, orcid=orcid)
    save_profile(prof, path)
    info(f"wrote {path} (keys alongside)")
    emit(cfg, {"profile": str(path), "name": name, "orcid": orcid}, str(path))


class _CollectingRegistry:
    """Dry-run sink: verifies and collects nanopubs, fetches from the real registry."""

    def __init__(self, backend):
        self.backend = backend
        self.collected: list[Nanopub] = []

    def publish(self, np: Nanopub) -> str:
        from .nanopub import verify as verify_np

        report = verify_np(np)
        if not report.ok:
            raise PlexflowError("dry-run nanopub failed verification:\n" + report.summary())
        self.collected.append(np)
        return np.uri

    def fetch(self, uri: str):
        for np in self.collected:
            if np.uri == uri.split("#", 1)[0]:
                return np
        return self.backend.fetch(uri)


def _load_manifest_file(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ManifestError(f"invalid YAML in {path}: {exc}")
    if isinstance(doc, dict) and "workflow" in doc:
        return "workflow", parse_workflow_manifest(text)
    if isinstance(doc, dict) and "step" in doc:
        return "step", parse_step_manifest(text)
    raise ManifestError(f"{path} has no top-level 'step' or 'workflow' key")


@cli.command()
@click.argument("manifest", type=click.Path(exists=True, path_type=Path))
@click.option("--dry-run", is_flag=True, help="Mint and print TriG without storing anything.")
@click.option("--at", default=None, help="Publication timestamp (ISO-8601); defaults to now.")
@click.pass_obj
def publish(cfg: CliConfig, manifest: Path, dry_run, at):
    """Publish a step or workflow manifest (a workflow of N steps mints N+1 nanopubs)."""
    at_dt = parse_at(at)
    prof = cfg.profile()
    kind, parsed = _load_manifest_file(manifest)
    registry = _CollectingRegistry(cfg.registry) if dry_run else cfg.registry
    if kind == "workflow":
        w = resolve_manifest(parsed, cfg.registry)
        uris = publish_workflow(w, prof, registry, at=at_dt)
    else:
        uris = [publish_step(parsed.to_step(), prof, registry, at=at_dt)]
    documents = [serialize_trig(np.to_dataset()) for np in registry.collected] if dry_run else []
    verb = "minted (dry run)" if dry_run else "published"
    info(f"{verb} {len(uris)} nanopub(s)")
    if cfg.output_format == "json":
        emit(cfg, {"uris": uris, "dry_run": dry_run, "documents": documents}, "")
    elif dry_run:
        for uri in uris:
            info(uri)
        click.echo("".join(documents), nl=False)
    else:
        click.echo("\n".join(uris))


@cli.command()
@click.argument("query_text", metavar="QUERY")
@click.pass_obj
def search(cfg: CliConfig, query_text):
    """Full-text search over published labels and descriptions."""
    hits = cfg.registry.search_text(query_text)
    data = {"hits": [hit.__dict__ for hit in hits]}
    table = ResultTable(
        vars=("label", "kind", "score", "uri"),
        rows=tuple((h.label, h.kind, int(h.score), h.uri) for h in hits),
    )
    emit(cfg, data, format_table(table) if hits else "no results")


@cli.command()
@click.argument("uri")
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def fetch(cfg: CliConfig, uri, output):
    """Fetch a nanopub as TriG."""
    text = cfg.registry.fetch_text(uri)
    if output:
        output.write_text(text)
        info(f"wrote {output}")
        emit(cfg, {"uri": uri, "file": str(output)}, "")
    else:
        emit(cfg, {"uri": uri, "trig": text}, text.rstrip("\n"))


@cli.command()
@click.argument("uri")
@click.pass_obj
def inject(cfg: CliConfig, uri):
    """Print an editable code template for a published step."""
    step = fetch_step(cfg.registry, uri)
    template = emit_code_template(step)
    emit(cfg, {"uri": uri, "template": template}, template.rstrip("\n"))


@cli.command()
@click.argument("target")
@click.option("--input", "inputs", multiple=True, metavar="NAME=VALUE",
              help="Workflow input; value may carry an int:/float:/bool: prefix.")
@click.option("--publish-prov", is_flag=True,
              help="Publish the workflow (if local) and its retrospective provenance.")
@click.option("--timeout", type=float, default=30.0, show_default=True,
              help="Per-step timeout for shell steps, in seconds.")
@click.option("--at", default=None, help="Publication timestamp (ISO-8601); defaults to now.")
@click.pass_obj
def run(cfg: CliConfig, target, inputs, publish_prov, timeout, at):
    """Execute a workflow manifest file or a published workflow URI."""
    at_dt = parse_at(at)
    input_map = {}
    for item in inputs:
        name, eq, raw = item.partition("=")
        if not eq:
            raise click.UsageError(f"--input takes NAME=VALUE, got {item!r}")
        input_map[name] = parse_input_value(raw)

    path = Path(target)
    published: list[str] = []
    if path.exists():
        kind, parsed = _load_manifest_file(path)
        if kind != "workflow":
            raise click.UsageError(f"{target} is a step manifest; run takes a workflow")
        if publish_prov:
            prof = cfg.profile()
            w = resolve_manifest(parsed, cfg.registry)
            published = publish_workflow(w, prof, cfg.registry, at=at_dt)
            info(f"published workflow as {len(published)} nanopub(s)")
            workflow = fetch_workflow(cfg.registry, published[-1] + "#plan")
        else:
            workflow = resolve_manifest(parsed, cfg.registry)
    else:
        if not target.startswith("http"):
            raise click.UsageError(f"no such file or URI: {target}")
        workflow = fetch_workflow(cfg.registry, target)

    result = execute(workflow, input_map, timeout=timeout)
    retro_uris: list[str] = []
    if publish_prov:
        retro_uris = publish_retroprov(result.retroprov, cfg.profile(), cfg.registry, at=at_dt)
        info(f"published retrospective provenance as {len(retro_uris)} nanopub(s)")

    human = [f"{name} = {value}" for name, value in result.outputs.items()]
    human.append(f"[{len(result.retroprov.step_executions)} step(s) executed]")
    human += [f"  prospective: {u}" for u in published]
    human += [f"  retrospective: {u}" for u in retro_uris]
    emit(
        cfg,
        {
            "outputs": result.outputs,
            "steps_executed": len(result.retroprov.step_executions),
            "prospective_uris": published,
            "retrospective_uris": retro_uris,
        },
        "\n".join(human),
    )


@cli.command()
@click.argument("name", type=click.Choice(sorted(STATS_QUERIES)))
@click.pass_obj
def stats(cfg: CliConfig, name):
    """Run a canned analytics query: reuse, executions, or plan-sizes."""
    table = run_query(cfg.registry, STATS_QUERIES[name])
    emit(cfg, {"vars": list(table.vars), "rows": [list(r) for r in table.rows]}, format_table(table))


@cli.command()
@click.argument("query_file", type=click.Path(exists=True, allow_dash=True, path_type=Path))
@click.pass_obj
def query(cfg: CliConfig, query_file: Path):
    """Run a query from a file ('-' reads stdin)."""
    text = sys.stdin.read() if str(query_file) == "-" else query_file.read_text()
    table = run_query(cfg.registry, text)
    emit(cfg, {"vars": list(table.vars), "rows": [list(r) for r in table.rows]}, format_table(table))


@cli.command("verify")
@click.argument("target")
@click.pass_context
def verify_cmd(ctx, target):
    """Verify a nanopub file or URI; nonzero exit when verification fails."""
    cfg: CliConfig = ctx.obj
    path = Path(target)
    text = path.read_text() if path.exists() else cfg.registry.fetch_text(target)
    dataset = parse_trig(text)
    violations = validate_structure(dataset)
    if violations:
        emit(cfg, {"ok": False, "structure_ok": False, "problems": violations},
             "structure: FAILED\n" + "\n".join(f"  - {v}" for v in violations))
        ctx.exit(1)
    report = verify(nanopub_from_dataset(dataset))
    emit(
        cfg,
        {
            "ok": report.ok,
            "structure_ok": report.structure_ok,
            "uri_ok": report.uri_ok,
            "signature_ok": report.signature_ok,
            "problems": list(report.problems),
        },
        report.summary(),
    )
    if not report.ok:
        ctx.exit(1)


@cli.command()
@click.option("--port", type=int, default=8480, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data", "data_dir", type=click.Path(path_type=Path), required=True,
              help="Registry data directory.")
@click.option("--ui", "ui_dir", type=click.Path(exists=True, path_type=Path), default=None,
              flag_value="frontend/dist", is_flag=False,
              help="Serve the web UI from this directory.")
@click.pass_obj
def serve(cfg: CliConfig, port, host, data_dir, ui_dir):
    """Serve the registry (and optionally the web UI) over HTTP."""
    import uvicorn

    from .registry import RegistryStore
    from .server import create_app

    store = RegistryStore(data_dir)
    try:
        prof = cfg.profile()
    except PlexflowError:
        prof = None
        info("no profile found; POST /publish will be unavailable")
    app = create_app(store, profile=prof, ui_dir=ui_dir)
    info(f"registry at http://{host}:{port} (data: {data_dir})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    try:
        # with standalone_mode off, click returns ctx.exit codes instead of raising
        rv = cli.main(args=argv, standalone_mode=False, prog_name="plexflow")
        if isinstance(rv, int) and rv:
            return rv
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except PlexflowError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
