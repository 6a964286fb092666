"""Command-line front end: single games, batch matrices, trace rendering.

Exit codes: 0 success, 1 domain/invariant error, 2 usage error. Parameter
precedence is flag > config file > default, and every output artifact
embeds the resolved manifest so runs can be reproduced from it.
"""

from __future__ import annotations

import os
import sys

import click

from chaincatch.chain import ChainStrategy
from chaincatch.engine import GameConfig, run_game
from chaincatch.errors import ChainCatchError, ConfigError
from chaincatch.experiments import (
    MatrixSpec,
    export_csv,
    export_runs,
    format_ordering_report,
    run_batch,
    summarize_orderings,
)
from chaincatch.render import render_trace
from chaincatch.strategies import EscapeeStrategy, StrategyParams
from chaincatch.trace import parse_trace, serialize_trace
from chaincatch.world import Arena, Cell

ESCAPEE_NAMES = [s.value for s in EscapeeStrategy]
CHAIN_NAMES = [s.value for s in ChainStrategy]


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


class Manifest:
    """Resolved settings with per-field provenance (default | file | flag)."""

    def __init__(self) -> None:
        self.entries: list[tuple[str, str, str]] = []

    def resolve(self, key, flag_value, file_values, default, convert):
        if flag_value is not None:
            value, source = convert(flag_value), "flag"
        elif key in file_values:
            value, source = convert(file_values[key]), "file"
        else:
            value, source = default, "default"
        self.entries.append((key, str(value), source))
        return value

    def lines(self) -> list[str]:
        return [f"{key}={value} source={source}" for key, value, source in self.entries]


def _default_seed() -> int:
    return int(os.environ.get("CHAINCATCH_SEED", "0"))


def _load_positions(path: str, n: int) -> tuple[Cell, ...]:
    cells: dict[int, Cell] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigError(f"{path}:{lineno}: expected 'id x y'")
            agent_id, x, y = (int(p) for p in parts)
            cells[agent_id] = Cell(x, y)
    if sorted(cells) != list(range(n)):
        raise ConfigError(f"{path}: need exactly ids 0..{n - 1}")
    return tuple(cells[i] for i in range(n))


def _build_run_config(
    arena_file, config_file, agents, seed, escapee, chain, k, k2, nsd, dtheta, r_safe, positions
) -> tuple[GameConfig, Manifest]:
    file_values = _read_config_file(config_file) if config_file else {}
    manifest = Manifest()
    arena = Arena.from_config(arena_file) if arena_file else Arena()
    manifest.entries.append(("arena", arena_file or "<defaults>", "flag" if arena_file else "default"))

    n = manifest.resolve("agents", agents, file_values, 6, int)
    seed = manifest.resolve("seed", seed, file_values, _default_seed(), int)
    escapee_name = manifest.resolve(
        "escapee_strategy", escapee, file_values, "kcircle", str
    )
    chain_name = manifest.resolve("chain_strategy", chain, file_values, "tag1", str)
    try:
        escapee_strategy = EscapeeStrategy(escapee_name)
        chain_strategy = ChainStrategy(chain_name)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc

    defaults = StrategyParams.for_arena(arena)
    k = manifest.resolve("k", k, file_values, defaults.k, float)
    k2 = manifest.resolve("k2", k2, file_values, defaults.k2, float)
    nsd = manifest.resolve("nsd", nsd, file_values, defaults.nsd, float)
    dtheta = manifest.resolve("dtheta", dtheta, file_values, defaults.d_theta, float)
    r_safe = manifest.resolve("r_safe", r_safe, file_values, defaults.r_safe, float)
    params = StrategyParams.for_arena(arena, k=k, k2=k2, nsd=nsd, d_theta=dtheta, r_safe=r_safe)

    initial = _load_positions(positions, n) if positions else None
    config = GameConfig(
        arena=arena,
        n_agents=n,
        escapee_strategy=escapee_strategy,
        chain_strategy=chain_strategy,
        params=params,
        seed=seed,
        initial_positions=initial,
    )
    return config, manifest


@click.group()
def main() -> None:
    """Chain Catch simulator and strategy benchmark."""


@main.command()
@click.option("--arena", "arena_file", type=click.Path(exists=True), help="Arena config file.")
@click.option("--config", "config_file", type=click.Path(exists=True), help="Run config file.")
@click.option("--agents", type=int, default=None, help="Number of agents (>= 3).")
@click.option("--seed", type=int, default=None)
@click.option("--escapee-strategy", type=click.Choice(ESCAPEE_NAMES), default=None)
@click.option("--chain-strategy", type=click.Choice(CHAIN_NAMES), default=None)
@click.option("--k", type=float, default=None, help="Safe-circle radius.")
@click.option("--k2", type=float, default=None, help="Rotation ring half-width.")
@click.option("--nsd", type=float, default=None, help="Neighbour safe distance.")
@click.option("--dtheta", type=float, default=None, help="Rotation increment, radians.")
@click.option("--r-safe", type=float, default=None, help="Tag/touch distance.")
@click.option("--positions", type=click.Path(exists=True), help="File of 'id x y' lines.")
@click.option("--out", type=click.Path(), default="game.trace", show_default=True)
def run(arena_file, config_file, agents, seed, escapee_strategy, chain_strategy,
        k, k2, nsd, dtheta, r_safe, positions, out) -> None:
    """Run a single game and write its trace."""
    try:
        config, manifest = _build_run_config(
            arena_file, config_file, agents, seed, escapee_strategy,
            chain_strategy, k, k2, nsd, dtheta, r_safe, positions,
        )
        trace = run_game(config)
    except ChainCatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(serialize_trace(trace, manifest.lines()))
    label = "Complete" if trace.complete else "Timeout"
    click.echo(f"{label} T_c={trace.t_c}")
    click.echo(f"trace written to {out}")


@main.command()
@click.option("--arena", "arena_file", type=click.Path(exists=True), help="Arena config file.")
@click.option("--agents", "agent_counts", type=int, multiple=True, default=(10,),
              show_default=True, help="Agent count; repeatable.")
@click.option("--runs", type=int, default=25, show_default=True, help="Runs per cell.")
@click.option("--base-seed", type=int, default=None)
@click.option("--escapee-strategies", default=",".join(ESCAPEE_NAMES), show_default=True,
              help="Comma-separated escapee strategies.")
@click.option("--chain-strategies", default=",".join(CHAIN_NAMES), show_default=True,
              help="Comma-separated chain strategies.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out-csv", type=click.Path(), default="table.csv", show_default=True)
@click.option("--out-runs", type=click.Path(), default="runs.txt", show_default=True)
def batch(arena_file, agent_counts, runs, base_seed, escapee_strategies,
          chain_strategies, workers, out_csv, out_runs) -> None:
    """Run a strategy matrix and write the transition table."""
    if runs < 1:
        raise click.UsageError("--runs must be >= 1")
    try:
        escapees = tuple(
            EscapeeStrategy(name.strip()) for name in escapee_strategies.split(",")
        )
        chains = tuple(
            ChainStrategy(name.strip()) for name in chain_strategies.split(",")
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    try:
        arena = Arena.from_config(arena_file) if arena_file else Arena()
        seed = base_seed if base_seed is not None else _default_seed()
        spec = MatrixSpec(
            escapee_strategies=escapees,
            chain_strategies=chains,
            agent_counts=tuple(agent_counts),
            runs_per_cell=runs,
            base_seed=seed,
            arena=arena,
            params=StrategyParams.for_arena(arena),
        )
        table = run_batch(spec, workers=workers)
    except ChainCatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    manifest = [
        f"base_seed={seed} source={'flag' if base_seed is not None else 'default'}",
        f"runs_per_cell={runs} source=flag",
        f"agent_counts={','.join(map(str, agent_counts))} source=flag",
        f"arena={arena_file or '<defaults>'} source={'flag' if arena_file else 'default'}",
    ]
    with open(out_csv, "w", encoding="utf-8") as fh:
        fh.write(export_csv(table, manifest))
    with open(out_runs, "w", encoding="utf-8") as fh:
        fh.write(export_runs(table, manifest))
    click.echo(format_ordering_report(summarize_orderings(table)))
    click.echo(f"table written to {out_csv}; per-run data to {out_runs}")


@main.command()
@click.argument("trace_file", type=click.Path(exists=True))
@click.option("--every", type=int, default=1, show_default=True, help="Sample every Nth cycle.")
@click.option("--out-dir", type=click.Path(), default="frames", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "png"]), default="text",
              show_default=True)
@click.option("--k-circle", is_flag=True, help="Overlay the K circle.")
def render(trace_file, every, out_dir, fmt, k_circle) -> None:
    """Render a trace to one frame file per sampled cycle plus a summary."""
    if every < 1:
        raise click.UsageError("--every must be >= 1")
    with open(trace_file, encoding="utf-8") as fh:
        text = fh.read()
    try:
        trace, _manifest = parse_trace(text)
        paths = render_trace(
            trace, out_dir, every=every, image=(fmt == "png"), k_circle=k_circle
        )
    except ChainCatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {len(paths)} frames to {out_dir}")


if __name__ == "__main__":
    main()
