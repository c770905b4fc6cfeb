"""Command-line entry points.

Exit codes: 0 success (route: accepted), 1 configuration or fixture
error, 2 runtime error, 3 rejected message (route only).
"""

import dataclasses
import json
import logging
import sys
from pathlib import Path

import click
import uvicorn

from . import service
from .classifier import ACCEPTED, train
from .embeddings import PROVIDER_LOCAL_HASH, PROVIDER_REMOTE, make_provider
from .errors import (
    EmbeddingProviderError,
    EmptyTextError,
    FixtureLoadError,
    MisconfigurationError,
    RegistryValidationError,
    SchemaError,
    UnknownFixtureError,
)
from .index import save_index
from .pipeline import Pipeline, PipelineConfig, load_config, load_exemplar_index
from .registry import load_registry
from .simulator import BuildingSimulator, create_simulator_app

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_REJECTED = 3

CONFIG_ERRORS = (
    MisconfigurationError,
    SchemaError,
    RegistryValidationError,
    FixtureLoadError,
    UnknownFixtureError,
)

DEFAULT_CONFIG_PATH = "fixtures/config.json"

_PROVIDER_CHOICES = {"local": PROVIDER_LOCAL_HASH, "remote": PROVIDER_REMOTE}


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    raise SystemExit(code)


def _load_config_with_overrides(ctx_obj: dict) -> PipelineConfig:
    try:
        config = load_config(ctx_obj["config_path"])
        if ctx_obj["tau"] is not None:
            config = dataclasses.replace(config, tau=ctx_obj["tau"])
        if ctx_obj["provider"] is not None:
            try:
                provider = dataclasses.replace(
                    config.provider, kind=_PROVIDER_CHOICES[ctx_obj["provider"]]
                )
            except ValueError as exc:
                raise MisconfigurationError(str(exc))
            config = dataclasses.replace(config, provider=provider)
        if ctx_obj["dry_run"]:
            config = dataclasses.replace(config, dry_run=True)
    except CONFIG_ERRORS as exc:
        _fail(EXIT_CONFIG, str(exc))
    return config


@click.group()
@click.option(
    "--config",
    "config_path",
    default=DEFAULT_CONFIG_PATH,
    show_default=True,
    help="Path to the pipeline JSON config.",
)
@click.option("--tau", type=float, default=None, help="Override the gate threshold.")
@click.option(
    "--provider",
    type=click.Choice(sorted(_PROVIDER_CHOICES)),
    default=None,
    help="Override the embedding provider kind.",
)
@click.option("--dry-run", is_flag=True, help="Decide and trace without dispatching.")
@click.pass_context
def main(ctx, config_path, tau, provider, dry_run):
    """Natural-language control service for building device APIs."""
    ctx.ensure_object(dict)
    ctx.obj.update(
        config_path=config_path, tau=tau, provider=provider, dry_run=dry_run
    )


@main.command()
@click.pass_context
def serve(ctx):
    """Serve the chat pipeline over HTTP."""
    logging.basicConfig(level=logging.INFO)
    config = _load_config_with_overrides(ctx.obj)
    try:
        service.serve(config)
    except CONFIG_ERRORS as exc:
        _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        _fail(EXIT_RUNTIME, f"cannot serve on {config.listen_host}:{config.listen_port}: {exc}")


@main.command()
@click.argument("text")
@click.pass_context
def route(ctx, text):
    """Run one message through the pipeline and print the response JSON."""
    config = _load_config_with_overrides(ctx.obj)
    try:
        pipeline = Pipeline.from_config(config)
    except CONFIG_ERRORS as exc:
        _fail(EXIT_CONFIG, str(exc))
    except EmbeddingProviderError as exc:
        _fail(EXIT_RUNTIME, f"embedding provider failed: {exc}")
    try:
        response = pipeline.handle_message(text)
    except EmptyTextError as exc:
        _fail(EXIT_CONFIG, str(exc))
    except EmbeddingProviderError as exc:
        _fail(EXIT_RUNTIME, f"embedding provider failed: {exc}")
    except MisconfigurationError as exc:
        _fail(EXIT_RUNTIME, str(exc))
    finally:
        pipeline.close()
    click.echo(json.dumps(response.to_dict(), indent=2))
    if response.decision.status != ACCEPTED:
        raise SystemExit(EXIT_REJECTED)


@main.group()
def index():
    """Exemplar index maintenance."""


@index.command("build")
@click.option(
    "--in",
    "in_path",
    default=None,
    help="Exemplar utterance file (defaults to the config's exemplars_path).",
)
@click.option(
    "--out",
    "out_path",
    default=None,
    help="Snapshot destination (defaults to <in>.snapshot.json).",
)
@click.pass_context
def index_build(ctx, in_path, out_path):
    """Embed exemplar utterances and write an index snapshot."""
    config = _load_config_with_overrides(ctx.obj)
    source = Path(in_path) if in_path else config.exemplars_path
    if out_path:
        destination = Path(out_path)
    else:
        destination = source.with_suffix(".snapshot.json")
    provider = make_provider(config.provider)
    try:
        built = load_exemplar_index(provider, source)
        save_index(built, destination)
    except CONFIG_ERRORS as exc:
        _fail(EXIT_CONFIG, str(exc))
    except EmbeddingProviderError as exc:
        _fail(EXIT_RUNTIME, f"embedding provider failed: {exc}")
    finally:
        provider.close()
    click.echo(f"wrote {len(built)} exemplars to {destination}")


@main.command()
@click.pass_context
def validate(ctx):
    """Check that the configured fixtures load and agree with each other."""
    config = _load_config_with_overrides(ctx.obj)
    problems = []
    loaded = None
    try:
        provider = make_provider(config.provider)
        try:
            loaded = load_exemplar_index(provider, config.exemplars_path)
        finally:
            provider.close()
        click.echo(f"exemplars: {len(loaded)} records, dim {loaded.dim}")
    except (*CONFIG_ERRORS, EmbeddingProviderError) as exc:
        problems.append(f"exemplars: {exc}")
    registry = None
    try:
        registry = load_registry(config.registry_path)
        click.echo(f"registry: {len(registry)} apis")
    except CONFIG_ERRORS as exc:
        problems.append(f"registry: {exc}")
    if loaded is not None and registry is not None:
        try:
            model = train(loaded.records())
            click.echo(f"classifier: {len(model.classes)} classes")
        except CONFIG_ERRORS as exc:
            problems.append(f"classifier: {exc}")
        missing = sorted(set(loaded.api_ids()) - set(registry.api_ids()))
        if missing:
            problems.append(f"classes with no registry entry: {', '.join(missing)}")
    buildings_dir = config.exemplars_path.parent / "buildings"
    if buildings_dir.is_dir():
        for fixture_file in sorted(buildings_dir.glob("*.json")):
            try:
                BuildingSimulator(buildings_dir, fixture_file.stem)
                click.echo(f"building fixture: {fixture_file.name}")
            except CONFIG_ERRORS as exc:
                problems.append(f"building fixture {fixture_file.name}: {exc}")
    for problem in problems:
        click.echo(f"error: {problem}", err=True)
    if problems:
        raise SystemExit(EXIT_CONFIG)
    click.echo("all fixtures valid")


@main.command()
@click.option("--fixture-dir", default="fixtures/buildings", show_default=True)
@click.option("--fixture", default="default", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8421, show_default=True, type=int)
def simulate(fixture_dir, fixture, host, port):
    """Run the building simulator standalone."""
    logging.basicConfig(level=logging.INFO)
    try:
        simulator = BuildingSimulator(fixture_dir, fixture)
    except CONFIG_ERRORS as exc:
        _fail(EXIT_CONFIG, str(exc))
    app = create_simulator_app(simulator)
    try:
        uvicorn.run(app, host=host, port=port)
    except OSError as exc:
        _fail(EXIT_RUNTIME, f"cannot serve on {host}:{port}: {exc}")


if __name__ == "__main__":
    main(sys.argv[1:])
