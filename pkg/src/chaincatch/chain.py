"""Chain state and the two chain movement strategies: Tagging and Variance.

Catch mode case 1 lets only the chain ends catch (and lead); case 2 lets
any member. Index arithmetic below is 0-based over the member list.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from chaincatch.errors import GameOverError
from chaincatch.strategies import StrategyParams
from chaincatch.world import Cell, euclidean_distance


class CatchMode(enum.Enum):
    ENDS_ONLY = "ends-only"   # case 1
    ANY_MEMBER = "any-member"  # case 2


class ChainStrategy(enum.Enum):
    TAGGING_C1 = "tag1"
    TAGGING_C2 = "tag2"
    VARIANCE_C1 = "var1"
    VARIANCE_C2 = "var2"
    RANDOM = "random"

    @property
    def catch_mode(self) -> CatchMode:
        if self in (ChainStrategy.TAGGING_C2, ChainStrategy.VARIANCE_C2):
            return CatchMode.ANY_MEMBER
        return CatchMode.ENDS_ONLY


@dataclass(frozen=True)
class ChainState:
    """Ordered chain of agent ids; the original Catcher is the first member
    until catches append beyond either end."""

    members: tuple[int, ...]
    catch_mode: CatchMode

    def __post_init__(self) -> None:
        if len(self.members) < 2:
            raise ValueError("a chain has at least two members")
        if len(set(self.members)) != len(self.members):
            raise ValueError("chain members must be distinct")

    @property
    def size(self) -> int:
        return len(self.members)

    def eligible_indices(self) -> tuple[int, ...]:
        """Member indices allowed to catch (and to lead)."""
        if self.catch_mode is CatchMode.ENDS_ONLY:
            return (0, self.size - 1)
        return tuple(range(self.size))


@dataclass(frozen=True)
class ConstraintVerdict:
    """Result of a chain-constraint check.

    ``violations`` lists broken adjacent links as (i, i + 1) index pairs;
    the sentinel (0, size - 1) marks the ends meeting.
    """

    intact: bool
    violations: tuple[tuple[int, int], ...] = field(default_factory=tuple)


def select_leader_and_target(
    member_cells: Sequence[Cell],
    escapees: Sequence[tuple[int, Cell]],
    mode: CatchMode,
) -> tuple[int, int]:
    """Leader member index and target escapee id: the closest pair over the
    eligible members (ends under case 1, anyone under case 2).

    Ties break to the lower member index, then the lower escapee id.
    """
    if not escapees:
        raise GameOverError("no escapees remain")
    m = len(member_cells)
    indices = (0, m - 1) if mode is CatchMode.ENDS_ONLY else range(m)
    best: tuple[float, int, int] | None = None
    for i in indices:
        for escapee_id, pos in escapees:
            d = euclidean_distance(member_cells[i], pos)
            key = (d, i, escapee_id)
            if best is None or key < best:
                best = key
    assert best is not None
    return best[1], best[2]


def assign_tags(
    member_cells: Sequence[Cell], leader_index: int, target: Cell
) -> dict[int, Cell]:
    """Leader-agent position for every member.

    The leader follows the target escapee; every other member follows its
    neighbour one step toward the leader, so tags propagate outward from
    the leader to both ends.
    """
    tags: dict[int, Cell] = {leader_index: target}
    for i in range(len(member_cells)):
        if i < leader_index:
            tags[i] = member_cells[i + 1]
        elif i > leader_index:
            tags[i] = member_cells[i - 1]
    return tags


def cost_tagging(cell: Cell, leader_agent: Cell, params: StrategyParams) -> float:
    """Hold distance r_safe to the leader agent; zero exactly on that ring."""
    return abs(params.r_safe - euclidean_distance(cell, leader_agent))


def cost_leader_chase(cell: Cell, escapee: Cell, params: StrategyParams) -> float:
    """Pure pursuit for the chain leader. A ring cost with its minimum at
    the touch distance stalls just above the catch threshold against a
    retreating target, so the leader minimizes raw distance instead; the
    contact check fires as soon as the gap closes to one diameter."""
    return euclidean_distance(cell, escapee)


def variance_vector(
    m: int,
    leader_index: int,
    mode: CatchMode,
    params: StrategyParams,
    base: float | None = None,
) -> list[float]:
    """Per-member target distance from the chased escapee.

    Case 1 ramps from ``base`` at both ends to a maximum at the middle;
    case 2 is a V with its minimum ``base`` at the leader. ``base``
    defaults to r_safe. The step R between adjacent targets is the agent
    radius, half of r1.
    """
    if base is None:
        base = params.r_safe
    r = params.r1 / 2
    if mode is CatchMode.ENDS_ONLY:
        return [base + r * min(i, m - 1 - i) for i in range(m)]
    return [base + r * abs(leader_index - i) for i in range(m)]


def variance_neighbor_index(m: int, member_index: int, leader_index: int, mode: CatchMode) -> int:
    """Index of the neighbour whose spacing the variance cost enforces.

    Case 2 looks toward the leader; case 1 toward the middle of the chain.
    The reference member itself falls back to an adjacent member.
    """
    if mode is CatchMode.ANY_MEMBER:
        anchor = leader_index
    else:
        anchor = (m - 1) // 2
    if member_index < anchor:
        return member_index + 1
    if member_index > anchor:
        return member_index - 1
    return member_index - 1 if member_index > 0 else member_index + 1


def cost_variance(
    cell: Cell,
    escapee: Cell,
    neighbor: Cell,
    target_distance: float,
    params: StrategyParams,
) -> float:
    """Attain the member's variance distance from the escapee, with a
    penalty for drifting outside the (r1, r2) link window to its neighbour."""
    base = abs(target_distance - euclidean_distance(cell, escapee))
    d_c = euclidean_distance(cell, neighbor)
    if params.r1 < d_c < params.r2:
        return base
    return base + abs(params.r_c - d_c)


def cost_link_cohesion(
    cell: Cell, neighbors: Sequence[Cell], params: StrategyParams
) -> float:
    """Additive penalty for links outside the (r1, r2) window, pulling the
    member toward r_c from each adjacent neighbour. Keeps the chain intact
    while it chases, so contacts are not endlessly rejected as broken."""
    total = 0.0
    for neighbor in neighbors:
        d = euclidean_distance(cell, neighbor)
        if not params.r1 < d < params.r2:
            total += abs(params.r_c - d)
    return total


def cost_ends_separation(
    cell: Cell, other_end: Cell, params: StrategyParams, margin: float = 1.0
) -> float:
    """Additive penalty keeping the two chain ends apart.

    The ends-meeting rule (ends farther than r2) is otherwise invisible to
    the move costs, and a chain bent around a cornered escapee would stay
    broken forever, rejecting every catch. Charged only to end members.
    """
    d = euclidean_distance(cell, other_end)
    return max(0.0, params.r2 + margin - d)


def check_chain_constraints(
    member_cells: Sequence[Cell],
    params: StrategyParams,
    *,
    skip_newest_link: bool = False,
) -> ConstraintVerdict:
    """Verify every adjacent link lies in [r1, r2] and, for chains of three
    or more, that the two ends stay farther apart than r2.

    ``skip_newest_link`` exempts the last link and the ends rule for the
    cycle right after an extension, while the new link is still forming.
    """
    m = len(member_cells)
    violations: list[tuple[int, int]] = []
    last_checked = m - 2 if skip_newest_link else m - 1
    for i in range(last_checked):
        d = euclidean_distance(member_cells[i], member_cells[i + 1])
        if not params.r1 <= d <= params.r2:
            violations.append((i, i + 1))
    if m >= 3 and not skip_newest_link:
        if euclidean_distance(member_cells[0], member_cells[-1]) <= params.r2:
            violations.append((0, m - 1))
    return ConstraintVerdict(intact=not violations, violations=tuple(violations))


def extend_chain(
    chain: ChainState,
    caught: int,
    catcher_member_index: int,
    positions: Mapping[int, Cell],
) -> ChainState:
    """Append the caught escapee to the chain.

    An end catcher appends beyond its own end; an interior catcher (case 2)
    appends to whichever end is nearer the escapee. Order of existing
    members never changes.
    """
    if caught in chain.members:
        raise ValueError(f"agent {caught} is already a chain member")
    members = chain.members
    if catcher_member_index == 0:
        new_members = (caught,) + members
    elif catcher_member_index == len(members) - 1:
        new_members = members + (caught,)
    else:
        d_head = euclidean_distance(positions[members[0]], positions[caught])
        d_tail = euclidean_distance(positions[members[-1]], positions[caught])
        if d_head < d_tail:
            new_members = (caught,) + members
        else:
            new_members = members + (caught,)
    return replace(chain, members=new_members)
