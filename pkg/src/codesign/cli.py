"""Command line interface: thin client over the engine plus the server runner.

Exit codes: 0 ok, 1 usage, 2 model error, 3 analysis error, 4 backend error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import data_path
from .agent import Agent, Session, default_network, load_network, templates
from .analysis import critical_path, find_spofs, propagate
from .errors import AgentError, AnalysisError, CodesignError, ConfigError, ModelError
from .ir import verbalize
from .knowledge import build_index
from .model import ModelDocument, SystemModel, load_model, to_dot, write_model
from .mutation import replicate_node, suggest_redundancy

EXIT_USAGE = 1
EXIT_MODEL = 2
EXIT_ANALYSIS = 3
EXIT_BACKEND = 4


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load(path: str) -> SystemModel:
    try:
        return load_model(path)
    except (ModelError, OSError) as exc:
        raise CommandError(EXIT_MODEL, f"cannot load model: {exc}") from exc


def _emit(payload: dict, as_json: bool, human_text: str) -> None:
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(human_text)


def _split_names(raw: str | None) -> list[str]:
    if not raw:
        return []
    return [n.strip() for n in raw.split(",") if n.strip()]


model_option = click.option(
    "--model", "model_path", required=True, type=click.Path(), help="Model XML file."
)
json_option = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")


@click.group()
def cli():
    """Safety codesign engine for system model graphs."""


@cli.command()
@model_option
@json_option
def parse(model_path, as_json):
    """Validate a model file and show a summary."""
    model = _load(model_path)
    summary = (
        f"{len(model.nodes)} nodes, {len(model.edges)} edges; "
        f"start: {', '.join(model.start_nodes()) or 'none'}; "
        f"end: {', '.join(model.end_nodes()) or 'none'}"
    )
    _emit(model.to_json_dict(), as_json, summary)


@cli.command(name="verbalize")
@model_option
def verbalize_cmd(model_path):
    """Print the intermediate representation of the model."""
    model = _load(model_path)
    click.echo(verbalize(model).text, nl=False)


@cli.command()
@model_option
@click.option("--faults", default=None, help="Seed these faults and highlight the result.")
def dot(model_path, faults):
    """Print the model as a DOT digraph."""
    model = _load(model_path)
    highlight = None
    if faults:
        try:
            highlight = propagate(model, _split_names(faults))
        except CodesignError as exc:
            raise CommandError(EXIT_ANALYSIS, str(exc)) from exc
    click.echo(to_dot(model, highlight), nl=False)


@cli.command(name="propagate")
@model_option
@click.option("--faults", required=True, help="Comma-separated seed components.")
@json_option
def propagate_cmd(model_path, faults, as_json):
    """Propagate seeded faults through the fault gates."""
    model = _load(model_path)
    try:
        state = propagate(model, _split_names(faults))
    except CodesignError as exc:
        raise CommandError(EXIT_ANALYSIS, str(exc)) from exc
    result = state.to_json_dict()
    _emit(result, as_json, templates.render_result(result, "PropagateFaults"))


@cli.command(name="critical-path")
@model_option
@click.option("--exclude", default=None, help="Comma-separated components to exclude.")
@click.option("--faults", default=None, help="Seed faults used with --exclude-last-fault.")
@click.option(
    "--exclude-last-fault",
    is_flag=True,
    help="Exclude everything the --faults seeds propagate to.",
)
@json_option
def critical_path_cmd(model_path, exclude, faults, exclude_last_fault, as_json):
    """Minimal start-to-end paths, optionally after removing components."""
    model = _load(model_path)
    excluded = _split_names(exclude)
    if exclude_last_fault:
        if not faults:
            raise click.UsageError("--exclude-last-fault needs --faults to define the fault")
        try:
            state = propagate(model, _split_names(faults))
        except CodesignError as exc:
            raise CommandError(EXIT_ANALYSIS, str(exc)) from exc
        excluded = sorted(set(excluded) | state.faulty)
    try:
        result = critical_path(model, excluded).to_json_dict()
    except CodesignError as exc:
        raise CommandError(EXIT_ANALYSIS, str(exc)) from exc
    _emit(result, as_json, templates.render_result(result, "CriticalPath"))


@cli.command()
@model_option
@json_option
def spof(model_path, as_json):
    """List all single points of failure."""
    model = _load(model_path)
    try:
        result = find_spofs(model).to_json_dict()
    except CodesignError as exc:
        raise CommandError(EXIT_ANALYSIS, str(exc)) from exc
    _emit(result, as_json, templates.render_result(result, "FindSpofs"))


@cli.command()
@model_option
@json_option
def suggest(model_path, as_json):
    """Suggest the best replication candidate."""
    model = _load(model_path)
    try:
        result = suggest_redundancy(model).to_json_dict()
    except CodesignError as exc:
        raise CommandError(EXIT_ANALYSIS, str(exc)) from exc
    _emit(result, as_json, templates.render_result(result, "SuggestRedundancy"))


@cli.command()
@model_option
@click.option("--target", required=True, help="Component to replicate.")
@click.option("--copies", default=2, show_default=True, type=click.IntRange(min=2))
@click.option("--output", default=None, type=click.Path(), help="Write here instead of in place.")
@json_option
def replicate(model_path, target, copies, output, as_json):
    """Replicate a component and write the mutated model back."""
    model = _load(model_path)
    try:
        mutated = replicate_node(model, target, copies)
        write_model(mutated, output or model_path)
    except (CodesignError, OSError) as exc:
        raise CommandError(EXIT_MODEL, str(exc)) from exc
    result = {
        "kind": "ReplicateNode",
        "target": target,
        "replicas": [n for n in mutated.node_names() if n not in set(model.node_names())],
        "revision": mutated.revision,
        "written_to": str(output or model_path),
    }
    _emit(result, as_json, templates.render_result(result, "ReplicateNode"))


def _make_agent(model_path, backend_name, llm_model, corpus, network_file) -> Agent:
    try:
        document = ModelDocument.load(model_path)
    except (ModelError, OSError) as exc:
        raise CommandError(EXIT_MODEL, f"cannot load model: {exc}") from exc
    try:
        from .service.state import ServiceConfig, make_backend

        backend = make_backend(
            ServiceConfig(model_path=Path(model_path), backend=backend_name, llm_model=llm_model)
        )
        network = load_network(network_file) if network_file else default_network()
        index = build_index(corpus) if corpus else build_index(data_path("corpus"))
    except (ConfigError, AgentError, OSError) as exc:
        raise CommandError(EXIT_BACKEND, str(exc)) from exc
    return Agent(document, backend, network=network, index=index)


@cli.command()
@model_option
@click.option("--backend", default="mock", type=click.Choice(["mock", "http"]), show_default=True)
@click.option("--llm-model", default="gpt-3.5-turbo", show_default=True)
@click.option("--corpus", default=None, type=click.Path(), help="Safety documentation directory.")
@click.option("--network", "network_file", default=None, type=click.Path(), help="Decision network XML.")
@json_option
def chat(model_path, backend, llm_model, corpus, network_file, as_json):
    """Interactive chat with the agent. Model mutations persist in place."""
    agent = _make_agent(model_path, backend, llm_model, corpus, network_file)
    session = Session("cli")
    click.echo("codesign chat; blank line or 'quit' to leave")
    while True:
        try:
            prompt = input("you> ").strip()
        except EOFError:
            break
        if not prompt or prompt.lower() in ("quit", "exit"):
            break
        reply = agent.handle(prompt, session)
        click.echo(reply.text)
        if as_json:
            click.echo(json.dumps({"result": reply.result, "trace": reply.trace}, sort_keys=True))


@cli.command()
@click.option("--model", "model_path", default=None, type=click.Path())
@click.option("--config", "config_file", default=None, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--backend", default=None, type=click.Choice(["mock", "http"]))
@click.option("--llm-model", default=None)
@click.option("--corpus", default=None, type=click.Path())
@click.option("--network", "network_file", default=None, type=click.Path())
@click.option("--static", "static_dir", default=None, type=click.Path(), help="Web UI assets.")
def serve(model_path, config_file, host, port, backend, llm_model, corpus, network_file, static_dir):
    """Run the HTTP service (and web UI when --static is given)."""
    from .service import ServiceConfig, create_app

    try:
        if config_file:
            config = ServiceConfig.from_file(
                config_file,
                model_path=model_path,
                corpus_dir=corpus,
                network_path=network_file,
                backend=backend,
                llm_model=llm_model,
                static_dir=static_dir,
            )
        else:
            if not model_path:
                raise click.UsageError("serve needs --model or --config")
            config = ServiceConfig(
                model_path=Path(model_path),
                corpus_dir=Path(corpus) if corpus else data_path("corpus"),
                network_path=Path(network_file) if network_file else None,
                backend=backend or "mock",
                llm_model=llm_model or "gpt-3.5-turbo",
                static_dir=Path(static_dir) if static_dir else None,
            )
        app = create_app(config)
    except (CodesignError, OSError) as exc:
        raise CommandError(EXIT_MODEL, f"cannot start service: {exc}") from exc

    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="info")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except CommandError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.code
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
