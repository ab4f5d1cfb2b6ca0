"""Command-line entry points. Each command is a thin wrapper over the
workspace operations; `serve` exposes the same workspace over HTTP."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .testkit import (
    CorpusSpec,
    generate_corpus,
    score_pipeline,
    write_corpus,
)
from .workspace import Workspace, WorkspaceError, create_demo_workspace


@click.group()
def main():
    """Smart-city knowledge base toolkit."""


def _workspace(path: str) -> Workspace:
    try:
        return Workspace(path)
    except WorkspaceError as exc:
        raise click.ClickException(str(exc))


workspace_option = click.option(
    "--workspace", "-w", "workspace_path", default=".", show_default=True,
    help="Workspace directory (holds workspace.conf).",
)


@main.command()
@workspace_option
@click.option("--dataset", required=True, help="Dataset id from the workspace config.")
@click.option("--once", is_flag=True, default=True, help="Single ingestion run.")
def ingest(workspace_path, dataset, once):
    """Retrieve one dataset and version its records."""
    ws = _workspace(workspace_path)
    report = ws.ingest(dataset)
    ws.save_store()
    if report.error:
        raise click.ClickException(report.error)
    if report.skipped:
        click.echo(f"{dataset}: unchanged, skipped")
    else:
        click.echo(f"{dataset}: version {report.new_version}, {report.record_count} records")
    for issue in report.issues[:10]:
        click.echo(f"  row {issue.row}: {issue.message}", err=True)


@main.command("map")
@workspace_option
@click.option("--dataset", required=True)
@click.option("--version", type=int, default=None, help="Record version (default: latest).")
def map_cmd(workspace_path, dataset, version):
    """Apply the dataset's mapping model and load the statements."""
    ws = _workspace(workspace_path)
    try:
        output = ws.map_dataset(dataset, version)
    except WorkspaceError as exc:
        raise click.ClickException(str(exc))
    ws.refresh_inference()
    ws.save_store()
    click.echo(f"{dataset}: {len(output.quads)} statements mapped")
    for issue in output.issues[:10]:
        click.echo(f"  row {issue.row_index} [{issue.column}]: {issue.message}", err=True)
    if len(output.issues) > 10:
        click.echo(f"  ... and {len(output.issues) - 10} more", err=True)


@main.command()
@workspace_option
@click.option("--all", "do_all", is_flag=True, help="Reconcile every service.")
@click.option("--service", "service_iri", default=None, help="Reconcile one service IRI.")
@click.option("--truth", "truth_path", default=None, type=click.Path(exists=True),
              help="Ground truth JSON for scoring (testkit corpora).")
def reconcile(workspace_path, do_all, service_iri, truth_path):
    """Connect services to the street guide; ambiguous cases queue for review."""
    if not do_all and not service_iri:
        raise click.ClickException("pass --all or --service <iri>")
    ws = _workspace(workspace_path)
    if service_iri:
        outcome = ws.reconcile_service(service_iri)
        ws.save_store()
        click.echo(f"{service_iri}: {outcome.level}"
                   + (f" (step {outcome.step})" if outcome.step else ""))
        return
    outcomes = ws.reconcile_all()
    ws.refresh_inference()
    ws.save_store()
    counts: dict[str, int] = {}
    steps: dict[str, int] = {}
    for outcome in outcomes.values():
        counts[outcome.level] = counts.get(outcome.level, 0) + 1
        if outcome.level in ("street-number", "street"):
            steps[str(outcome.step)] = steps.get(str(outcome.step), 0) + 1
    click.echo(f"{'level':16} {'count':>6}")
    for level in ("street-number", "street", "pending-review", "unresolved"):
        click.echo(f"{level:16} {counts.get(level, 0):>6}")
    if steps:
        click.echo("accepted per step: " + ", ".join(f"{k}: {v}" for k, v in sorted(steps.items())))
    if truth_path:
        from .testkit import TruthEntry

        raw = json.loads(Path(truth_path).read_text())
        truth = {k: TruthEntry(**v) for k, v in raw.items()}
        report = score_pipeline(outcomes, truth)
        click.echo(report.to_text())


@main.command()
@workspace_option
@click.option("--baseline", default=None, help="Run id to diff against (default: previous run).")
@click.option("--json", "as_json", is_flag=True, help="Emit the run as JSON.")
def validate(workspace_path, baseline, as_json):
    """Run the verification suite and report regressions."""
    ws = _workspace(workspace_path)
    try:
        run, report = ws.validate(baseline)
    except WorkspaceError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        payload = run.to_json()
        if report:
            payload["diff"] = report.to_json()
        click.echo(json.dumps(payload, indent=1))
        return
    click.echo(f"run {run.run_id} at {run.timestamp}")
    for result in run.results:
        marker = "ok " if result.violation_count == 0 else "VIOL"
        click.echo(f"  {marker} {result.check_id}: {result.violation_count}")
    if report:
        if not report.regressions and not report.improvements:
            click.echo(f"no change since {report.baseline_run_id}")
        for entry in report.regressions:
            click.echo(f"REGRESSION {entry.check_id}: {entry.baseline} -> {entry.current}")
        for entry in report.improvements:
            click.echo(f"improved   {entry.check_id}: {entry.baseline} -> {entry.current}")
    sys.exit(1 if any(r.violation_count and r.severity == "error" for r in run.results) else 0)


@main.command("gen-corpus")
@click.option("--spec", "spec_path", default=None, type=click.Path(exists=True),
              help="Corpus spec JSON; defaults are used when omitted.")
@click.option("--seed", type=int, default=None, help="Override the spec seed.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def gen_corpus(spec_path, seed, out_dir):
    """Generate a synthetic street guide + services corpus with ground truth."""
    if spec_path:
        spec = CorpusSpec.from_json(json.loads(Path(spec_path).read_text()))
    else:
        spec = CorpusSpec()
    if seed is not None:
        from dataclasses import replace

        spec = replace(spec, seed=seed)
    corpus = generate_corpus(spec)
    paths = write_corpus(corpus, out_dir)
    click.echo(f"{len(corpus.street_guide_quads)} street-guide statements, "
               f"{len(corpus.service_records)} services -> {out_dir}")
    for kind, path in sorted(paths.items()):
        click.echo(f"  {kind}: {path}")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--services", type=int, default=400, show_default=True)
def demo(out_dir, seed, services):
    """Build a ready-to-serve demo workspace with a pending review queue."""
    workspace, _ = create_demo_workspace(out_dir, seed=seed, services=services)
    pending = workspace.review_queue.counts().get("pending", 0)
    click.echo(f"workspace at {out_dir}: {len(workspace.store)} statements, "
               f"{pending} reviews pending")


@main.command()
@workspace_option
@click.option("--port", type=int, default=8088, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--frontend", "frontend_dir", default=None, type=click.Path(),
              help="Static console bundle to serve at /.")
def serve(workspace_path, port, host, frontend_dir):
    """Start the HTTP service for this workspace."""
    import uvicorn

    from .service.app import create_app

    ws = _workspace(workspace_path)
    default_frontend = Path(workspace_path) / "console"
    bundle = frontend_dir or (str(default_frontend) if default_frontend.is_dir() else None)
    app = create_app(ws, bundle)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@workspace_option
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--dataset", default=None, help="Export a single dataset's active graph.")
def export(workspace_path, out_path, dataset):
    """Write the store (or one graph) as an N-Quads file."""
    ws = _workspace(workspace_path)
    graph = None
    if dataset:
        version = ws.store.active_version(dataset)
        if version is None:
            raise click.ClickException(f"no active graph for dataset {dataset!r}")
        from .terms import GraphId

        graph = GraphId(dataset, version)
    count = ws.store.export_nquads(out_path, graph)
    click.echo(f"{count} statements -> {out_path}")


if __name__ == "__main__":
    main()
