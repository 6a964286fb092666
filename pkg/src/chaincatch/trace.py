"""Line-delimited trace format: the replay and golden-file contract.

Layout:
    # chaincatch trace v1
    manifest <key>=<value> source=<default|file|flag>   (zero or more)
    config <key>=<value> ...
    positions <id>:<x>:<y> ...
    cycle <n> agents <id>:<x>:<y> ... chain <ids|-> events <tokens|->
    outcome <complete|timeout> tc=<cycles>

Serialization is deterministic: identical configs and seeds yield
byte-identical files.
"""

from __future__ import annotations

from typing import Iterable

from chaincatch.chain import ChainStrategy
from chaincatch.engine import (
    Catch,
    CatchRejected,
    ChainBroken,
    CycleRecord,
    Event,
    GameConfig,
    GameOver,
    GameTrace,
)
from chaincatch.errors import TraceFormatError
from chaincatch.strategies import EscapeeStrategy, StrategyParams
from chaincatch.world import Arena, Cell

FORMAT_HEADER = "# chaincatch trace v1"

_PARAM_KEYS = ("k", "k2", "nsd", "d_theta", "max_constant", "r_safe", "r_c", "r1", "r2")
_ARENA_KEYS = ("width", "height", "agent_diameter", "slope_length", "max_steps")


def _event_token(event: Event) -> str:
    if isinstance(event, Catch):
        return f"catch:{event.catcher}:{event.caught}"
    if isinstance(event, CatchRejected):
        return f"reject:{event.catcher}:{event.caught}:{event.reason}"
    if isinstance(event, ChainBroken):
        links = ",".join(f"{a}-{b}" for a, b in event.links)
        return f"broken:{links}"
    if isinstance(event, GameOver):
        return f"gameover:{event.kind}"
    raise TypeError(f"unknown event {event!r}")


def _parse_event(token: str, lineno: int) -> Event:
    parts = token.split(":")
    try:
        if parts[0] == "catch":
            return Catch(int(parts[1]), int(parts[2]))
        if parts[0] == "reject":
            return CatchRejected(int(parts[1]), int(parts[2]), parts[3])
        if parts[0] == "broken":
            links = tuple(
                (int(a), int(b))
                for a, b in (pair.split("-") for pair in parts[1].split(",") if pair)
            )
            return ChainBroken(links)
        if parts[0] == "gameover":
            return GameOver(parts[1])
    except (IndexError, ValueError) as exc:
        raise TraceFormatError(f"line {lineno}: bad event token {token!r}") from exc
    raise TraceFormatError(f"line {lineno}: unknown event token {token!r}")


def serialize_trace(trace: GameTrace, manifest: Iterable[str] = ()) -> str:
    """Render a trace to text. ``manifest`` lines (already formatted as
    ``key=value source=...``) are echoed after the header."""
    config = trace.config
    arena, params = config.arena, config.params
    lines = [FORMAT_HEADER]
    for entry in manifest:
        lines.append(f"manifest {entry}")
    config_fields = [f"{key}={getattr(arena, key)}" for key in _ARENA_KEYS]
    config_fields += [
        f"n_agents={config.n_agents}",
        f"seed={config.seed}",
        f"catcher_id={config.catcher_id}",
        f"escapee_strategy={config.escapee_strategy.value}",
        f"chain_strategy={config.chain_strategy.value}",
        f"freeze_catcher={int(config.freeze_catcher)}",
    ]
    config_fields += [f"{key}={getattr(params, key)!r}" for key in _PARAM_KEYS]
    lines.append("config " + " ".join(config_fields))
    initial = config.resolve_positions()
    lines.append(
        "positions " + " ".join(f"{i}:{c.x}:{c.y}" for i, c in enumerate(initial))
    )
    for record in trace.records:
        agents = " ".join(f"{i}:{x}:{y}" for i, x, y in record.positions)
        chain = ",".join(str(i) for i in record.chain_members) or "-"
        events = ";".join(_event_token(e) for e in record.events) or "-"
        lines.append(f"cycle {record.cycle} agents {agents} chain {chain} events {events}")
    lines.append(f"outcome {trace.outcome} tc={trace.t_c}")
    return "\n".join(lines) + "\n"


def _parse_kv(fields: list[str], lineno: int) -> dict[str, str]:
    out = {}
    for field in fields:
        if "=" not in field:
            raise TraceFormatError(f"line {lineno}: expected key=value, got {field!r}")
        key, _, value = field.partition("=")
        out[key] = value
    return out


def parse_trace(text: str) -> tuple[GameTrace, list[str]]:
    """Parse trace text back into a GameTrace plus its manifest lines."""
    lines = text.splitlines()
    if not lines or lines[0] != FORMAT_HEADER:
        raise TraceFormatError("line 1: missing trace header")
    manifest: list[str] = []
    config: GameConfig | None = None
    positions: tuple[Cell, ...] | None = None
    records: list[CycleRecord] = []
    outcome = ""
    t_c = 0
    kv: dict[str, str] = {}

    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag == "manifest":
            manifest.append(line[len("manifest "):])
        elif tag == "config":
            kv = _parse_kv(tokens[1:], lineno)
        elif tag == "positions":
            try:
                cells = [tuple(map(int, t.split(":"))) for t in tokens[1:]]
                positions = tuple(Cell(x, y) for _i, x, y in sorted(cells))
            except ValueError as exc:
                raise TraceFormatError(f"line {lineno}: bad positions") from exc
        elif tag == "cycle":
            if len(tokens) < 7 or tokens[2] != "agents":
                raise TraceFormatError(f"line {lineno}: malformed cycle record")
            try:
                chain_at = tokens.index("chain")
                events_at = tokens.index("events")
                agent_triples = tuple(
                    tuple(map(int, t.split(":"))) for t in tokens[3:chain_at]
                )
                chain_token = tokens[chain_at + 1]
                chain_members = (
                    tuple(int(i) for i in chain_token.split(","))
                    if chain_token != "-"
                    else ()
                )
                events_token = tokens[events_at + 1]
                events = (
                    tuple(_parse_event(t, lineno) for t in events_token.split(";"))
                    if events_token != "-"
                    else ()
                )
                records.append(
                    CycleRecord(int(tokens[1]), agent_triples, chain_members, events)
                )
            except (ValueError, IndexError) as exc:
                raise TraceFormatError(f"line {lineno}: malformed cycle record") from exc
        elif tag == "outcome":
            kv_out = _parse_kv(tokens[2:], lineno)
            outcome = tokens[1]
            t_c = int(kv_out.get("tc", "0"))
        else:
            raise TraceFormatError(f"line {lineno}: unknown record {tag!r}")

    if not kv:
        raise TraceFormatError("trace has no config line")
    try:
        arena = Arena(**{key: int(kv[key]) for key in _ARENA_KEYS})
        params = StrategyParams(**{key: float(kv[key]) for key in _PARAM_KEYS})
        config = GameConfig(
            arena=arena,
            n_agents=int(kv["n_agents"]),
            escapee_strategy=EscapeeStrategy(kv["escapee_strategy"]),
            chain_strategy=ChainStrategy(kv["chain_strategy"]),
            params=params,
            seed=int(kv["seed"]),
            initial_positions=positions,
            catcher_id=int(kv["catcher_id"]),
            freeze_catcher=bool(int(kv["freeze_catcher"])),
        )
    except KeyError as exc:
        raise TraceFormatError(f"config line missing key {exc}") from exc

    trace = GameTrace(config=config, records=records, outcome=outcome, t_c=t_c)
    return trace, manifest
