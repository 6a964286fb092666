"""Trace serialization round-trips and parse-error diagnostics."""

from __future__ import annotations

import pytest

from chaincatch.chain import ChainStrategy
from chaincatch.engine import Catch, GameConfig, run_game
from chaincatch.errors import TraceFormatError
from chaincatch.strategies import EscapeeStrategy, StrategyParams
from chaincatch.trace import parse_trace, serialize_trace
from chaincatch.world import Arena


@pytest.fixture(scope="module")
def sample_trace():
    arena = Arena(width=20, height=20, agent_diameter=5, slope_length=4, max_steps=200)
    config = GameConfig(
        arena=arena,
        n_agents=4,
        escapee_strategy=EscapeeStrategy.NAIVE,
        chain_strategy=ChainStrategy.TAGGING_C2,
        params=StrategyParams.for_arena(arena),
        seed=3,
    )
    return run_game(config)


def test_round_trip_is_byte_identical(sample_trace):
    manifest = ["seed=3 source=flag", "agents=4 source=default"]
    text = serialize_trace(sample_trace, manifest)
    parsed, parsed_manifest = parse_trace(text)
    assert parsed_manifest == manifest
    assert serialize_trace(parsed, parsed_manifest) == text


def test_round_trip_preserves_structure(sample_trace):
    parsed, _ = parse_trace(serialize_trace(sample_trace))
    assert parsed.outcome == sample_trace.outcome
    assert parsed.t_c == sample_trace.t_c
    assert len(parsed.records) == len(sample_trace.records)
    assert parsed.config.n_agents == sample_trace.config.n_agents
    assert parsed.config.arena == sample_trace.config.arena
    got_catches = [
        e for r in parsed.records for e in r.events if isinstance(e, Catch)
    ]
    want_catches = [
        e for r in sample_trace.records for e in r.events if isinstance(e, Catch)
    ]
    assert got_catches == want_catches


def test_serialization_is_deterministic(sample_trace):
    assert serialize_trace(sample_trace) == serialize_trace(sample_trace)


def test_missing_header_names_line_one():
    with pytest.raises(TraceFormatError, match="line 1"):
        parse_trace("not a trace\n")


def test_bad_cycle_record_names_line(sample_trace):
    text = serialize_trace(sample_trace)
    lines = text.splitlines()
    bad_at = next(i for i, l in enumerate(lines) if l.startswith("cycle"))
    lines[bad_at] = "cycle zero agents"
    with pytest.raises(TraceFormatError, match=f"line {bad_at + 1}"):
        parse_trace("\n".join(lines) + "\n")


def test_unknown_record_tag_rejected(sample_trace):
    text = serialize_trace(sample_trace) + "mystery 1 2 3\n"
    with pytest.raises(TraceFormatError, match="mystery"):
        parse_trace(text)


def test_bad_event_token_rejected(sample_trace):
    text = serialize_trace(sample_trace)
    text = text.replace("gameover:complete", "teleport:1", 1)
    text = text.replace("gameover:timeout", "teleport:1", 1)
    with pytest.raises(TraceFormatError, match="teleport"):
        parse_trace(text)


def test_trace_without_config_rejected():
    with pytest.raises(TraceFormatError, match="config"):
        parse_trace("# chaincatch trace v1\noutcome timeout tc=1\n")
