"""Cost functions for the Catcher and every Escapee strategy.

Each cost maps a candidate cell to a non-negative real; agents move to the
candidate with minimal cost (ties break to scan order, which puts "stay"
first). All functions are pure; only the random strategy consumes the rng.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from chaincatch.errors import ConfigError, DegenerateAngleError
from chaincatch.world import Arena, Cell, SlopeGroup, euclidean_distance

#: Absolute tolerance for cost ties. Distances are irrational, so exact
#: equality would make tie-breaking platform-dependent.
TIE_TOLERANCE = 1e-9


class EscapeeStrategy(enum.Enum):
    """Movement policy shared by all escapees in one game."""

    RANDOM = "random"
    NAIVE = "naive"
    K_CIRCLE = "kcircle"
    K_CIRCLE_ROTATION = "kcircle-rot"
    SLIDING_SLOPE = "slope"


@dataclass(frozen=True)
class StrategyParams:
    """All strategy tunables, in cell units (angles in radians).

    ``k`` is the safe-circle radius escapees hold from the chaser, ``k2``
    the half-width of the rotation ring, ``nsd`` the minimum spread between
    fellow escapees, ``r_safe`` the tag/touch distance, ``r1``/``r2`` the
    chain link bounds and ``r_c`` their midpoint.
    """

    k: float
    k2: float
    nsd: float
    d_theta: float
    max_constant: float
    r_safe: float
    r_c: float
    r1: float
    r2: float

    def __post_init__(self) -> None:
        if self.k2 < 1:
            raise ConfigError(f"k2 {self.k2} must be >= 1")
        if not 0 < self.d_theta <= math.pi / 2:
            raise ConfigError(f"d_theta {self.d_theta} must be in (0, pi/2]")
        if abs(self.r_c - (self.r1 + self.r2) / 2) > 1e-12:
            raise ConfigError("r_c must be the average of r1 and r2")

    @classmethod
    def for_arena(
        cls,
        arena: Arena,
        *,
        k: float | None = None,
        k2: float = 1.0,
        nsd: float | None = None,
        d_theta: float = 0.2,
        r_safe: float | None = None,
    ) -> "StrategyParams":
        """Defaults scaled to an arena: k = height/4, nsd = 3 * diameter,
        r_safe = 1.5 * diameter, link bounds r1 = diameter, r2 = 2 * diameter.
        """
        d = arena.agent_diameter
        r1, r2 = float(d), 2.0 * d
        params = cls(
            k=arena.height / 4 if k is None else k,
            k2=k2,
            nsd=3.0 * d if nsd is None else nsd,
            d_theta=d_theta,
            max_constant=math.hypot(arena.width, arena.height) + 1.0,
            r_safe=1.5 * d if r_safe is None else r_safe,
            r_c=(r1 + r2) / 2,
            r1=r1,
            r2=r2,
        )
        if params.max_constant <= arena.max_distance:
            raise ConfigError("max_constant must exceed the arena diagonal")
        return params


def select_move(
    candidates: Sequence[Cell],
    cost: Callable[[Cell], float],
    tolerance: float = TIE_TOLERANCE,
) -> Cell:
    """The candidate with minimal cost; ties within ``tolerance`` go to the
    earliest candidate in scan order."""
    if not candidates:
        raise ValueError("candidates must be non-empty")
    best = candidates[0]
    best_cost = cost(best)
    for cell in candidates[1:]:
        c = cost(cell)
        if c < best_cost - tolerance:
            best, best_cost = cell, c
    return best


def cost_catcher(cell: Cell, target: Cell) -> float:
    """Plain pursuit: distance from the candidate cell to the chosen prey."""
    return euclidean_distance(cell, target)


def cost_naive(cell: Cell, chaser: Cell, params: StrategyParams) -> float:
    """Maximize-distance evasion: a large constant minus chaser distance,
    so the minimum sits at the cell farthest from the chaser."""
    return params.max_constant - euclidean_distance(cell, chaser)


def cost_kcircle(
    cell: Cell,
    chaser: Cell,
    other_escapees: Sequence[Cell],
    params: StrategyParams,
) -> float:
    """Hold the safe circle of radius k around the chaser while keeping at
    least ``nsd`` from the nearest fellow escapee."""
    base = abs(params.k - euclidean_distance(cell, chaser))
    nnd = math.inf
    for other in other_escapees:
        d = euclidean_distance(cell, other)
        if d < nnd:
            nnd = d
    if nnd < params.nsd:
        return base + (params.nsd - nnd)
    return base


def rotation_point(
    chaser: Cell, escapee: Cell, params: StrategyParams
) -> tuple[float, float]:
    """Target point on the k circle, ``d_theta`` radians counterclockwise of
    the escapee's current bearing from the chaser. May lie out of bounds;
    the candidate filter still applies."""
    if escapee == chaser:
        raise DegenerateAngleError("escapee and chaser coincide; bearing undefined")
    theta = math.atan2(escapee.y - chaser.y, escapee.x - chaser.x)
    return (
        chaser.x + params.k * math.cos(theta + params.d_theta),
        chaser.y + params.k * math.sin(theta + params.d_theta),
    )


def cost_kcircle_rotation(
    cell: Cell,
    chaser: Cell,
    escapee_pos: Cell,
    other_escapees: Sequence[Cell],
    params: StrategyParams,
) -> float:
    """Like the k circle, but an escapee already on the ring (within k +- k2
    of the chaser) steers toward its rotation point instead of holding still.

    The ring test uses the escapee's current cell, not the candidate: the
    rotation target is fixed once per cycle.
    """
    cd_now = euclidean_distance(escapee_pos, chaser)
    if params.k - params.k2 <= cd_now < params.k + params.k2:
        try:
            rx, ry = rotation_point(chaser, escapee_pos, params)
        except DegenerateAngleError:
            return cost_kcircle(cell, chaser, other_escapees, params)
        return math.hypot(cell.x - rx, cell.y - ry)
    return cost_kcircle(cell, chaser, other_escapees, params)


def sliding_slope_plan(
    moving_agent: Cell,
    chaser: Cell,
    candidates: Sequence[Cell],
    other_escapees: Sequence[Cell],
    slopes: Sequence[SlopeGroup],
    params: StrategyParams,
) -> tuple[list[Cell], Callable[[Cell], float]]:
    """Candidate restriction and cost for the sliding-slope strategy.

    Off-slope agents behave exactly like the k circle. An agent standing
    on a slope while a chaser is inside its safe radius slides along the
    slope: candidates shrink to stay plus the adjacent cells of the same
    group, and cost is the distance to the chosen endpoint, which carries
    the agent across the corner onto the adjacent wall.

    The slide only engages when it wins the race: an endpoint is a valid
    target if the agent can reach it with at least one body diameter of
    lead over the chaser and the crossing is not already finished (the
    endpoint lies beyond one body radius). With no valid target the agent
    keeps the k-circle cost, so it is never pinned at a slope end waiting
    for the chaser.
    """
    group = None
    for g in slopes:
        if moving_agent in g.cells:
            group = g
            break

    def kcircle(cell: Cell) -> float:
        return cost_kcircle(cell, chaser, other_escapees, params)

    if group is None or euclidean_distance(moving_agent, chaser) >= params.k:
        return list(candidates), kcircle

    def lead(endpoint: Cell) -> float:
        return euclidean_distance(endpoint, chaser) - euclidean_distance(
            endpoint, moving_agent
        )

    viable = [
        endpoint
        for endpoint in group.endpoints
        if euclidean_distance(endpoint, moving_agent) > params.r1 / 2.0
        and lead(endpoint) > params.r1
    ]
    if not viable:
        return list(candidates), kcircle

    target = max(viable, key=lead)
    allowed = [
        cell
        for cell in candidates
        if cell == moving_agent
        or (
            cell in group.cells
            and abs(cell.x - moving_agent.x) <= 1
            and abs(cell.y - moving_agent.y) <= 1
        )
    ]
    return allowed, lambda cell: euclidean_distance(cell, target)


def random_move(candidates: Sequence[Cell], rng: np.random.Generator) -> Cell:
    """Uniform choice over the candidates; deterministic given the rng state
    and candidate order."""
    if not candidates:
        raise ValueError("candidates must be non-empty")
    return candidates[int(rng.integers(len(candidates)))]
