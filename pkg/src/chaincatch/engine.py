"""Cycle coordinator: snapshots, simultaneous moves, catch handling, traces.

One cycle = one move per agent. Moves are chosen from a frozen snapshot and
applied in ascending agent-id order (stay on conflict), which approximates
simultaneous motion while staying fully deterministic.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from chaincatch import chain as chain_mod
from chaincatch import strategies as strat
from chaincatch.chain import CatchMode, ChainState, ChainStrategy, ConstraintVerdict
from chaincatch.errors import ConfigError, GameOverError, PlacementError
from chaincatch.strategies import EscapeeStrategy, StrategyParams
from chaincatch.world import (
    Arena,
    Cell,
    candidate_cells,
    euclidean_distance,
    nearest_escapee,
    representation_point,
    slope_cells,
)


class Role(enum.Enum):
    CATCHER = "catcher"
    ESCAPEE = "escapee"
    CHAIN_MEMBER = "chain-member"


@dataclass(frozen=True)
class Catch:
    catcher: int
    caught: int


@dataclass(frozen=True)
class CatchRejected:
    catcher: int
    caught: int
    reason: str


@dataclass(frozen=True)
class ChainBroken:
    links: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class GameOver:
    kind: str  # "complete" or "timeout"


Event = Catch | CatchRejected | ChainBroken | GameOver


@dataclass(frozen=True)
class GameConfig:
    """Everything needed to reproduce one game bit-for-bit."""

    arena: Arena
    n_agents: int
    escapee_strategy: EscapeeStrategy
    chain_strategy: ChainStrategy
    params: StrategyParams
    seed: int = 0
    initial_positions: tuple[Cell, ...] | None = None
    catcher_id: int = 0
    freeze_catcher: bool = False

    def __post_init__(self) -> None:
        if self.n_agents < 3:
            raise ConfigError(f"n_agents {self.n_agents} must be >= 3")
        if not 0 <= self.catcher_id < self.n_agents:
            raise ConfigError(f"catcher_id {self.catcher_id} out of range")
        if self.initial_positions is not None:
            validate_positions(self.arena, self.initial_positions, self.n_agents)

    def resolve_positions(self) -> tuple[Cell, ...]:
        if self.initial_positions is not None:
            return self.initial_positions
        return tuple(place_agents_random(self.arena, self.n_agents, self.seed))


def validate_positions(arena: Arena, positions: Sequence[Cell], n: int) -> None:
    if len(positions) != n:
        raise ConfigError(f"expected {n} initial positions, got {len(positions)}")
    for pos in positions:
        if not arena.in_bounds(pos):
            raise ConfigError(f"initial position {pos} out of bounds")
    for a, b in itertools.combinations(positions, 2):
        if euclidean_distance(a, b) <= arena.agent_diameter:
            raise ConfigError(
                f"initial positions {a} and {b} closer than agent diameter"
            )


def place_agents_random(arena: Arena, n: int, seed: int) -> list[Cell]:
    """Seeded rejection sampling of n cells with pairwise spacing above the
    agent diameter. Raises PlacementError after 10000 consecutive rejections."""
    rng = np.random.default_rng(seed)
    placed: list[Cell] = []
    rejections = 0
    while len(placed) < n:
        cell = Cell(int(rng.integers(arena.width)), int(rng.integers(arena.height)))
        if all(euclidean_distance(cell, p) > arena.agent_diameter for p in placed):
            placed.append(cell)
            rejections = 0
        else:
            rejections += 1
            if rejections >= 10_000:
                raise PlacementError(
                    f"could not place {n} agents with spacing "
                    f"{arena.agent_diameter} on {arena.width}x{arena.height}"
                )
    return placed


@dataclass
class CycleRecord:
    cycle: int
    positions: tuple[tuple[int, int, int], ...]  # (id, x, y), ascending id
    chain_members: tuple[int, ...]
    events: tuple[Event, ...]


@dataclass
class GameTrace:
    config: GameConfig
    records: list[CycleRecord] = field(default_factory=list)
    outcome: str = ""  # "complete" or "timeout"
    t_c: int = 0

    @property
    def complete(self) -> bool:
        return self.outcome == "complete"


class GameState:
    """Mutable state of one game; advanced only by :func:`step`."""

    def __init__(self, config: GameConfig):
        self.config = config
        positions = config.resolve_positions()
        self.positions: dict[int, Cell] = dict(enumerate(positions))
        self.roles: dict[int, Role] = {
            i: Role.CATCHER if i == config.catcher_id else Role.ESCAPEE
            for i in range(config.n_agents)
        }
        self.chain: ChainState | None = None
        self.cycle = 0
        self.extended_last_cycle = False
        self.newest_member: int | None = None
        self.slopes = slope_cells(config.arena)
        self.rngs = {
            i: np.random.default_rng((config.seed, i + 1))
            for i in range(config.n_agents)
        }

    @property
    def over(self) -> bool:
        if self.chain is not None and self.chain.size == self.config.n_agents:
            return True
        return self.cycle >= self.config.arena.max_steps

    def escapees(self) -> list[tuple[int, Cell]]:
        return [
            (i, self.positions[i])
            for i in sorted(self.positions)
            if self.roles[i] is Role.ESCAPEE
        ]


def _escapee_move(
    state: GameState,
    agent_id: int,
    candidates: list[Cell],
    chaser: Cell,
    escapees: list[tuple[int, Cell]],
) -> Cell:
    config = state.config
    params = config.params
    pos = state.positions[agent_id]
    others = [p for i, p in escapees if i != agent_id]
    kind = config.escapee_strategy
    if kind is EscapeeStrategy.RANDOM:
        return strat.random_move(candidates, state.rngs[agent_id])
    if kind is EscapeeStrategy.NAIVE:
        return strat.select_move(
            candidates, lambda c: strat.cost_naive(c, chaser, params)
        )
    if kind is EscapeeStrategy.K_CIRCLE:
        return strat.select_move(
            candidates, lambda c: strat.cost_kcircle(c, chaser, others, params)
        )
    if kind is EscapeeStrategy.K_CIRCLE_ROTATION:
        return strat.select_move(
            candidates,
            lambda c: strat.cost_kcircle_rotation(c, chaser, pos, others, params),
        )
    allowed, cost = strat.sliding_slope_plan(
        pos, chaser, candidates, others, state.slopes, params
    )
    return strat.select_move(allowed, cost)


def _desired_moves(state: GameState) -> dict[int, Cell]:
    """Each agent's chosen destination, computed from the frozen snapshot."""
    config = state.config
    arena = config.arena
    params = config.params
    occupancy = set(state.positions.values())
    moves: dict[int, Cell] = {}

    chain = state.chain
    chain_cells = (
        [state.positions[i] for i in chain.members] if chain is not None else None
    )
    escapees = state.escapees()

    # Chain planning happens once per cycle from the snapshot.
    tags: dict[int, Cell] | None = None
    variance: list[float] | None = None
    leader_index = -1
    target_pos: Cell | None = None
    if chain is not None and config.chain_strategy is not ChainStrategy.RANDOM:
        if escapees:
            leader_index, target_id = chain_mod.select_leader_and_target(
                chain_cells, escapees, chain.catch_mode
            )
            target_pos = state.positions[target_id]
            if config.chain_strategy in (
                ChainStrategy.TAGGING_C1,
                ChainStrategy.TAGGING_C2,
            ):
                tags = chain_mod.assign_tags(chain_cells, leader_index, target_pos)
            else:
                variance = chain_mod.variance_vector(
                    chain.size, leader_index, chain.catch_mode, params
                )

    for agent_id in sorted(state.positions):
        pos = state.positions[agent_id]
        role = state.roles[agent_id]
        candidates = candidate_cells(arena, occupancy, pos)

        if role is Role.CATCHER:
            if config.freeze_catcher:
                moves[agent_id] = pos
            elif config.chain_strategy is ChainStrategy.RANDOM:
                moves[agent_id] = strat.random_move(candidates, state.rngs[agent_id])
            else:
                target_id, _dist = nearest_escapee(escapees, pos)
                target = state.positions[target_id]
                moves[agent_id] = strat.select_move(
                    candidates, lambda c: strat.cost_catcher(c, target)
                )
        elif role is Role.ESCAPEE:
            if chain_cells is not None:
                chaser = representation_point(chain_cells, pos)
            else:
                chaser = state.positions[config.catcher_id]
            moves[agent_id] = _escapee_move(state, agent_id, candidates, chaser, escapees)
        else:  # chain member
            assert chain is not None and chain_cells is not None
            if config.chain_strategy is ChainStrategy.RANDOM or target_pos is None:
                moves[agent_id] = strat.random_move(candidates, state.rngs[agent_id])
                continue
            member_index = chain.members.index(agent_id)
            leader_cell = chain_cells[leader_index]
            # A catch far from the chain end leaves the newest link longer
            # than r2 (the new member joined at the nearest end but was
            # caught mid-body). Every cycle it stays illegal suspends all
            # catching, so both link endpoints beeline to each other.
            repair_link = _newest_link_repair(state, agent_id, member_index)
            if repair_link is not None:
                moves[agent_id] = strat.select_move(
                    candidates,
                    lambda c: euclidean_distance(c, repair_link),
                )
                continue
            # When the leader end closes on the prey, the opposite end must
            # clear out: a catch is only accepted while the two ends stay
            # more than r2 apart, so an end lingering near the engagement
            # vetoes every capture attempt (the prey shelters between the
            # ends indefinitely).
            other_end_index = chain.size - 1 if member_index == 0 else 0
            yields_to_leader = (
                chain.size >= 3
                and member_index in (0, chain.size - 1)
                and member_index != leader_index
                and euclidean_distance(leader_cell, target_pos)
                <= 2.0 * params.r_safe
                and euclidean_distance(pos, chain_cells[other_end_index])
                <= params.r2 + 5.0
            )
            if yields_to_leader:
                far_end = chain_cells[other_end_index]
                base = lambda c: -euclidean_distance(c, far_end)
            elif member_index == leader_index:
                base = lambda c: chain_mod.cost_leader_chase(c, target_pos, params)
            elif tags is not None:
                leader_agent = tags[member_index]
                base = lambda c: chain_mod.cost_tagging(c, leader_agent, params)
            else:
                assert variance is not None
                n_idx = chain_mod.variance_neighbor_index(
                    chain.size, member_index, leader_index, chain.catch_mode
                )
                neighbor = chain_cells[n_idx]
                target_distance = variance[member_index]
                base = lambda c: chain_mod.cost_variance(
                    c, target_pos, neighbor, target_distance, params
                )
            # Constraint-repair terms: keep both links inside their window
            # and the two ends apart. Without them a chain bent around a
            # cornered escapee can sit broken forever, rejecting every catch.
            neighbors = [
                chain_cells[j]
                for j in (member_index - 1, member_index + 1)
                if 0 <= j < chain.size
            ]
            if chain.size >= 3 and member_index in (0, chain.size - 1):
                other_end = chain_cells[-1] if member_index == 0 else chain_cells[0]
            else:
                other_end = None
            # The leader is exempt from link cohesion: its followers hold
            # the links from their side, and a leader dragged back by a
            # lagging neighbor loses the pursuit race it must win.
            is_leader = member_index == leader_index

            def cost(
                c,
                base=base,
                neighbors=neighbors,
                other_end=other_end,
                is_leader=is_leader,
            ):
                total = base(c)
                if not is_leader:
                    total += chain_mod.cost_link_cohesion(c, neighbors, params)
                if other_end is not None:
                    total += chain_mod.cost_ends_separation(c, other_end, params)
                return total

            moves[agent_id] = strat.select_move(candidates, cost)
    return moves


def _newest_link_repair(
    state: GameState, agent_id: int, member_index: int
) -> Cell | None:
    """The partner cell to beeline toward while the newest link is longer
    than r2, or None when no repair duty applies to this member."""
    chain = state.chain
    if chain is None or state.newest_member is None:
        return None
    newest_index = chain.members.index(state.newest_member)
    partner_index = newest_index + 1 if newest_index == 0 else newest_index - 1
    if member_index not in (newest_index, partner_index):
        return None
    other = partner_index if member_index == newest_index else newest_index
    a = state.positions[chain.members[member_index]]
    b = state.positions[chain.members[other]]
    if euclidean_distance(a, b) <= state.config.params.r2:
        return None
    return b


def step(state: GameState) -> list[Event]:
    """Advance the game by one cycle; returns the cycle's events."""
    if state.over:
        raise GameOverError("cannot step a finished game")
    config = state.config
    params = config.params

    moves = _desired_moves(state)

    # Apply in ascending id; a destination occupied at application time
    # (earlier mover or a not-yet-moved agent) means the agent stays.
    for agent_id in sorted(state.positions):
        target = moves[agent_id]
        if target == state.positions[agent_id]:
            continue
        occupied = {
            p for i, p in state.positions.items() if i != agent_id
        }
        if target not in occupied:
            state.positions[agent_id] = target

    events: list[Event] = []

    verdict = ConstraintVerdict(intact=True)
    if state.chain is not None:
        verdict = chain_mod.check_chain_constraints(
            [state.positions[i] for i in state.chain.members],
            params,
            skip_newest_link=state.extended_last_cycle,
        )
    state.extended_last_cycle = False

    contacts = _detect_contacts(state)
    if contacts:
        if not verdict.intact:
            events.append(ChainBroken(verdict.violations))
            for _, pursuer, caught in contacts:
                events.append(CatchRejected(pursuer, caught, "chain-broken"))
        else:
            _dist, pursuer, caught = contacts[0]
            _accept_catch(state, pursuer, caught)
            events.append(Catch(pursuer, caught))
            state.extended_last_cycle = True
    elif not verdict.intact:
        events.append(ChainBroken(verdict.violations))

    state.cycle += 1
    if state.chain is not None and state.chain.size == config.n_agents:
        events.append(GameOver("complete"))
    elif state.cycle >= config.arena.max_steps:
        events.append(GameOver("timeout"))
    return events


def _detect_contacts(state: GameState) -> list[tuple[float, int, int]]:
    """(distance, pursuer id, escapee id) contacts on post-move positions,
    nearest first; eligibility follows the catch mode."""
    diameter = state.config.arena.agent_diameter
    if state.chain is None:
        pursuers = [state.config.catcher_id]
    else:
        pursuers = [state.chain.members[i] for i in state.chain.eligible_indices()]
    contacts = []
    for pursuer in pursuers:
        p_pos = state.positions[pursuer]
        for escapee_id, e_pos in state.escapees():
            d = euclidean_distance(p_pos, e_pos)
            if d <= diameter:
                contacts.append((d, pursuer, escapee_id))
    contacts.sort()
    return contacts


def _accept_catch(state: GameState, pursuer: int, caught: int) -> None:
    mode = state.config.chain_strategy.catch_mode
    if state.chain is None:
        state.chain = ChainState((pursuer, caught), mode)
        state.roles[pursuer] = Role.CHAIN_MEMBER
    else:
        member_index = state.chain.members.index(pursuer)
        state.chain = chain_mod.extend_chain(
            state.chain, caught, member_index, state.positions
        )
    state.roles[caught] = Role.CHAIN_MEMBER
    state.newest_member = caught


def run_game(config: GameConfig) -> GameTrace:
    """Run one game to completion or the step budget; returns the full trace."""
    state = GameState(config)
    trace = GameTrace(config=config)
    while not state.over:
        cycle_index = state.cycle
        events = step(state)
        chain_members = state.chain.members if state.chain is not None else ()
        trace.records.append(
            CycleRecord(
                cycle=cycle_index,
                positions=tuple(
                    (i, state.positions[i].x, state.positions[i].y)
                    for i in sorted(state.positions)
                ),
                chain_members=chain_members,
                events=tuple(events),
            )
        )
    if state.chain is not None and state.chain.size == config.n_agents:
        trace.outcome = "complete"
    else:
        trace.outcome = "timeout"
    trace.t_c = state.cycle
    return trace
