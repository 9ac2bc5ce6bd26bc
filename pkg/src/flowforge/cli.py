"""Batch command-line interface.

Exit codes: 0 on success, 1 on domain errors, 2 on usage errors.  The
diagnostic stream carries human-readable messages; machine consumers should
prefer the HTTP API.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .config import ServiceConfig, load_config
from .errors import FlowForgeError


def domain_errors(f):
    """Map FlowForgeError onto exit code 1 with the message on stderr."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except FlowForgeError as exc:
            click.echo(f"error [{exc.code}]: {exc.message}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
@click.option("--data-dir", type=click.Path(path_type=Path), default=None,
              help="Repository directory (FLOWFORGE_DATA_DIR).")
@click.option("--config", "config_file", type=click.Path(path_type=Path), default=None,
              help="Config file, JSON or YAML (FLOWFORGE_CONFIG).")
@click.pass_context
def main(ctx: click.Context, data_dir: Path | None, config_file: Path | None):
    """Deconstruct n8n workflows into reusable segments and build new ones."""
    ctx.ensure_object(dict)
    ctx.obj["cfg_factory"] = lambda **overrides: load_config(
        config_file=config_file,
        overrides={"data_dir": data_dir, **overrides},
    )


def get_cfg(ctx: click.Context, **overrides) -> ServiceConfig:
    return ctx.obj["cfg_factory"](**overrides)


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.pass_context
@domain_errors
def ingest(ctx, files):
    """Parse and store workflow files (.json/.yml/.yaml)."""
    from .pipeline import ingest_path

    repo = get_cfg(ctx).build_repository()
    for path in files:
        result = ingest_path(repo, path)
        status = "created" if result.created else "already present"
        click.echo(f"{result.workflow_id}  {path.name}  ({status}, "
                   f"{result.node_count} nodes, {result.edge_count} edges)")


@main.command()
@click.argument("workflow_id")
@click.pass_context
@domain_errors
def decompose(ctx, workflow_id):
    """Decompose a stored workflow and commit its reusable segments."""
    from .pipeline import extract_and_store

    cfg = get_cfg(ctx)
    repo = cfg.build_repository()
    decomposition, report, stored = extract_and_store(
        repo, workflow_id, max_inflight=cfg.max_inflight_llm)
    click.echo(f"segments: {len(decomposition.segments)}  stored: {len(stored)}")
    click.echo(f"node_coverage: {report.node_coverage:.3f}  "
               f"edge_validity: {report.edge_validity:.3f}  "
               f"reconstructible: {str(report.reconstructible).lower()}")
    for sid in stored:
        click.echo(f"  {sid}")


@main.group()
def segments():
    """Inspect stored segments."""


@segments.command("list")
@click.pass_context
@domain_errors
def segments_list(ctx):
    repo = get_cfg(ctx).build_repository()
    for s in repo.list_segments():
        click.echo(f"{s.segment_id}  {len(s.graph.nodes):3d} nodes  {s.description.segment_name}")


@segments.command("show")
@click.argument("segment_id")
@click.pass_context
@domain_errors
def segments_show(ctx, segment_id):
    from .extraction import segment_to_dict

    repo = get_cfg(ctx).build_repository()
    click.echo(json.dumps(segment_to_dict(repo.fetch_segment(segment_id)), indent=2))


@main.command()
@click.argument("text")
@click.option("--k", type=int, default=None, help="Maximum candidates.")
@click.option("--theta", type=float, default=None, help="Similarity threshold (strict).")
@click.pass_context
@domain_errors
def query(ctx, text, k, theta):
    """Retrieve segments semantically matching TEXT."""
    cfg = get_cfg(ctx, **{kk: vv for kk, vv in (("k", k), ("theta", theta)) if vv is not None})
    repo = cfg.build_repository()
    for match in repo.retrieve(text, cfg.retrieval_config()):
        name = repo.fetch_segment(match.segment_id).description.segment_name
        click.echo(f"{match.score:.4f} {match.segment_id} {name}")


@main.command()
@click.argument("requirement")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Write the deployable document here instead of stdout.")
@click.option("--k", type=int, default=None)
@click.option("--theta", type=float, default=None)
@click.pass_context
@domain_errors
def construct(ctx, requirement, out, k, theta):
    """Build a deployable workflow from a natural-language REQUIREMENT."""
    from .construction import construct as construct_flow

    cfg = get_cfg(ctx, **{kk: vv for kk, vv in (("k", k), ("theta", theta)) if vv is not None})
    repo = cfg.build_repository()
    result = construct_flow(requirement, repo, cfg.retrieval_config(),
                            max_inflight=cfg.max_inflight_llm)
    for res in result.resolutions:
        badge = f"retrieved {res.score:.3f}" if res.route == "retrieved" else "generated"
        click.echo(f"unit {res.unit_id}: {badge}  {res.segment.description.segment_name}",
                   err=True)
    click.echo(f"connectors inserted: {result.connectors_inserted}", err=True)
    payload = result.deploy_doc.data.decode("utf-8")
    if out:
        out.write_text(payload, "utf-8")
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(payload)


@main.command()
@click.argument("workflow_id")
@click.option("--platform", default="n8n", show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.pass_context
@domain_errors
def export(ctx, workflow_id, platform, out):
    """Emit a stored workflow as a deployable platform document."""
    from .construction import adapt_platform

    repo = get_cfg(ctx).build_repository()
    doc = adapt_platform(repo.get_workflow(workflow_id), platform)
    payload = doc.data.decode("utf-8")
    if out:
        out.write_text(payload, "utf-8")
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(payload)


@main.command(name="eval")
@click.option("--corpus", type=click.Path(exists=True, path_type=Path), default=None,
              help="Corpus directory (defaults to the bundled corpus).")
@click.option("--out-dir", type=click.Path(path_type=Path), default=Path("eval-out"),
              show_default=True, help="Where to write the report bundle.")
@click.pass_context
@domain_errors
def eval_cmd(ctx, corpus, out_dir):
    """Run the extraction and construction evaluation over a corpus."""
    from .evaluation import (
        RETRIEVAL_AUGMENTED,
        ZERO_SHOT_GENERATIVE,
        bundled_corpus_dir,
        eval_construction,
        eval_extraction,
        format_table,
        write_report_bundle,
    )

    corpus = corpus or bundled_corpus_dir()
    extraction = eval_extraction(corpus)
    retrieval = eval_construction(corpus, RETRIEVAL_AUGMENTED)
    zero_shot = eval_construction(corpus, ZERO_SHOT_GENERATIVE)
    click.echo(format_table(retrieval))
    click.echo("")
    click.echo(f"extraction: mean coverage {extraction.mean_node_coverage:.3f}, "
               f"mean edge validity {extraction.mean_edge_validity:.3f}, "
               f"all reconstructible: {str(extraction.all_reconstructible).lower()}")
    click.echo(f"strategy node-type F1: retrieval {retrieval.mean_node_type_f1:.3f} "
               f"vs zero-shot {zero_shot.mean_node_type_f1:.3f}")
    paths = write_report_bundle(out_dir, extraction, retrieval, zero_shot)
    for label, path in paths.items():
        click.echo(f"{label}: {path}")


@main.command()
@click.option("--listen", "listen_addr", default=None, help="host:port to bind.")
@click.pass_context
@domain_errors
def serve(ctx, listen_addr):
    """Run the HTTP service."""
    from .service import run_server

    cfg = get_cfg(ctx, **({"listen_addr": listen_addr} if listen_addr else {}))
    run_server(cfg)


if __name__ == "__main__":
    main()
