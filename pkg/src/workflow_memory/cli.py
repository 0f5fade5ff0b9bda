"""Command line entry points: serve, replay, bootstrap, match."""

from __future__ import annotations

import os
from pathlib import Path

import click

from .crew import bootstrap_memory, chemist_mock_llm, load_chemist_crew
from .embedding import make_embedder
from .llm import HttpLLMClient
from .model import StepKind, deserialize, render_text
from .retrieval import RetrievalConfig, retrieve
from .session import SessionGateway
from .store import DirectoryStore
from .trajectory import compile_trajectory, read_jsonl

DEFAULT_STORE_DIR = "./workflow-store"


def _store_dir(cli_value: str) -> Path:
    # The environment variable wins so deployments can pin the store
    # location regardless of how the command line was assembled.
    return Path(os.environ.get("WORKFLOW_STORE_DIR") or cli_value)


def build_gateway(
    store_dir: Path,
    threshold: float = 0.65,
    max_results: int = 10,
    llm: str = "mock",
    llm_endpoint: str = "",
    embedder: str = "builtin",
    embedder_endpoint: str = "",
) -> SessionGateway:
    if llm == "external":
        if not llm_endpoint:
            raise click.UsageError("--llm external requires --llm-endpoint")
        llm_client = HttpLLMClient(llm_endpoint)
    else:
        llm_client = chemist_mock_llm()
    return SessionGateway(
        store=DirectoryStore(store_dir),
        crews={"chemist": load_chemist_crew()},
        llm=llm_client,
        embedder=make_embedder(embedder, endpoint=embedder_endpoint),
        retrieval=RetrievalConfig(threshold=threshold, max_results=max_results),
    )


@click.group()
def main() -> None:
    """Episodic workflow memory for agent crews."""


@main.command()
@click.option("--store", default=DEFAULT_STORE_DIR, show_default=True, help="Store directory.")
@click.option("--threshold", default=0.65, show_default=True, type=float)
@click.option("--max-results", default=10, show_default=True, type=int)
@click.option("--llm", default="mock", show_default=True, type=click.Choice(["mock", "external"]))
@click.option("--llm-endpoint", default="", help="Completion endpoint for --llm external.")
@click.option("--embedder", default="builtin", show_default=True, type=click.Choice(["builtin", "external"]))
@click.option("--embedder-endpoint", default="", help="Embedding endpoint for --embedder external.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--ui", default="", help="Directory of static UI files to mount at /ui.")
def serve(
    store: str,
    threshold: float,
    max_results: int,
    llm: str,
    llm_endpoint: str,
    embedder: str,
    embedder_endpoint: str,
    host: str,
    port: int,
    ui: str,
) -> None:
    """Serve the session API over HTTP."""
    import uvicorn

    from .api import create_app

    gateway = build_gateway(
        _store_dir(store),
        threshold=threshold,
        max_results=max_results,
        llm=llm,
        llm_endpoint=llm_endpoint,
        embedder=embedder,
        embedder_endpoint=embedder_endpoint,
    )
    app = create_app(gateway, static_dir=Path(ui) if ui else None)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.argument("trajectory", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Print the workflow document instead of text.")
def replay(trajectory: Path, as_json: bool) -> None:
    """Compile a trajectory JSON-Lines file into a workflow."""
    events = read_jsonl(trajectory.read_text(encoding="utf-8"))
    workflow = compile_trajectory(events)
    if as_json:
        from .model import serialize

        click.echo(serialize(workflow).decode("utf-8"), nl=False)
    else:
        click.echo(render_text(workflow))
        click.echo(f"({workflow.step_count} steps compiled from {len(events)} events)")


@main.command()
@click.option("--count", default=20, show_default=True, type=int)
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--store", default=DEFAULT_STORE_DIR, show_default=True)
def bootstrap(count: int, seed: int, store: str) -> None:
    """Seed the store with generated memory workflows."""
    directory = _store_dir(store)
    record_ids = bootstrap_memory(count, seed, DirectoryStore(directory))
    click.echo(
        f"bootstrapped {count} workflows into {directory} "
        f"({len(set(record_ids))} distinct records)"
    )


@main.command()
@click.argument("workflow_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--store", default=DEFAULT_STORE_DIR, show_default=True)
@click.option("--threshold", default=0.65, show_default=True, type=float)
@click.option("--max-results", default=10, show_default=True, type=int)
def match(workflow_file: Path, store: str, threshold: float, max_results: int) -> None:
    """Print stored workflows similar to the given workflow document."""
    workflow = deserialize(workflow_file.read_bytes())
    directory_store = DirectoryStore(_store_dir(store))
    matches = retrieve(
        workflow,
        directory_store,
        RetrievalConfig(threshold=threshold, max_results=max_results),
        make_embedder("builtin"),
    )
    if not matches:
        click.echo("no matches")
        return
    for rank, found in enumerate(matches, start=1):
        labels = [
            step.name if step.kind is StepKind.FUNCTION_CALL else step.instruction
            for step in found.continuation
        ]
        continuation = ", ".join(labels) if labels else "(none)"
        click.echo(
            f"{rank}. {found.record_id}  score={found.score:.2f}  "
            f"window=[{found.window_start},{found.window_end})  next: {continuation}"
        )


if __name__ == "__main__":
    main()
