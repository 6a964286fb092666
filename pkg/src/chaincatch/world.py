"""Grid arena: geometry, occupancy, legal moves and corner slopes.

Everything here is a pure function of its inputs; Arena and Cell values are
immutable and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from chaincatch.errors import ConfigError, GameOverError


class Cell(NamedTuple):
    """A grid cell addressed by 0-based column (x) and row (y)."""

    x: int
    y: int


#: Fixed scan order for candidate moves: stay first, then the eight
#: neighbours clockwise from north (north is y - 1).
SCAN_ORDER = (
    (0, 0),   # stay
    (0, -1),  # N
    (1, -1),  # NE
    (1, 0),   # E
    (1, 1),   # SE
    (0, 1),   # S
    (-1, 1),  # SW
    (-1, 0),  # W
    (-1, -1),  # NW
)


@dataclass(frozen=True)
class Arena:
    """Rectangular grid with agent sizing, slope geometry and step budget.

    Defaults model a 75x75 field where an agent of diameter 5 takes 300
    steps to walk the periphery and the game is capped at 3000 steps.
    """

    width: int = 75
    height: int = 75
    agent_diameter: int = 5
    slope_length: int = 15
    max_steps: int = 3000

    def __post_init__(self) -> None:
        if self.width < 4 * self.agent_diameter or self.height < 4 * self.agent_diameter:
            raise ConfigError(
                f"arena {self.width}x{self.height} too small for agent diameter "
                f"{self.agent_diameter}: need at least 4x diameter per side"
            )
        if not (1 <= self.slope_length < min(self.width, self.height) / 2):
            raise ConfigError(
                f"slope_length {self.slope_length} must be in [1, min(width, height)/2)"
            )
        if self.max_steps < 1:
            raise ConfigError(f"max_steps {self.max_steps} must be >= 1")

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell.x < self.width and 0 <= cell.y < self.height

    @property
    def max_distance(self) -> float:
        """Length of the arena diagonal, the largest possible distance."""
        return math.hypot(self.width - 1, self.height - 1)

    @classmethod
    def from_config(cls, path: str) -> "Arena":
        """Load an arena from a plain-text ``key = value`` file.

        Unknown keys are rejected; absent keys fall back to defaults.
        """
        fields = {}
        known = {"width", "height", "agent_diameter", "slope_length", "max_steps"}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in known:
                    raise ConfigError(f"{path}:{lineno}: unknown arena key {key!r}")
                try:
                    fields[key] = int(value.strip())
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: {key} must be an integer") from exc
        return cls(**fields)


def euclidean_distance(a: Cell, b: Cell) -> float:
    """Distance between two cell centres, in cell units."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def candidate_cells(arena: Arena, occupancy: set[Cell], origin: Cell) -> list[Cell]:
    """Legal destination cells for one move from ``origin``.

    Returns ``origin`` itself (staying is always legal) plus every
    8-neighbourhood cell that is in bounds and unoccupied, in scan order.
    ``origin`` being in ``occupancy`` (it holds the moving agent) is fine.
    """
    ox, oy = origin
    out = [origin]
    width, height = arena.width, arena.height
    for dx, dy in SCAN_ORDER[1:]:
        nx, ny = ox + dx, oy + dy
        if 0 <= nx < width and 0 <= ny < height:
            cell = Cell(nx, ny)
            if cell not in occupancy:
                out.append(cell)
    return out


@dataclass(frozen=True)
class SlopeGroup:
    """One corner's diagonal slope: its cells and the two wall endpoints."""

    corner: str  # "nw", "ne", "sw", "se"
    cells: frozenset[Cell]
    endpoints: tuple[Cell, Cell]


def slope_cells(arena: Arena) -> tuple[SlopeGroup, ...]:
    """The four corner slopes, each an anti-diagonal of length ``slope_length``.

    The north-west group is every in-bounds cell with x + y == slope_length;
    the other three corners mirror it. Endpoints are where the diagonal meets
    the boundary walls.
    """
    length = arena.slope_length
    w, h = arena.width, arena.height

    def group(corner: str, to_cell) -> SlopeGroup:
        cells = []
        for i in range(length + 1):
            cell = to_cell(i, length - i)
            if arena.in_bounds(cell):
                cells.append(cell)
        return SlopeGroup(corner, frozenset(cells), (cells[0], cells[-1]))

    return (
        group("nw", lambda a, b: Cell(a, b)),
        group("ne", lambda a, b: Cell(w - 1 - a, b)),
        group("sw", lambda a, b: Cell(a, h - 1 - b)),
        group("se", lambda a, b: Cell(w - 1 - a, h - 1 - b)),
    )


def nearest_escapee(escapees: Iterable[tuple[int, Cell]], origin: Cell) -> tuple[int, float]:
    """Id and distance of the escapee closest to ``origin``.

    ``escapees`` yields (agent id, position) pairs. Ties break to the
    lowest id. Raises GameOverError when no escapees remain.
    """
    best_id = -1
    best_dist = math.inf
    for agent_id, pos in escapees:
        d = euclidean_distance(origin, pos)
        if d < best_dist or (d == best_dist and agent_id < best_id):
            best_id, best_dist = agent_id, d
    if best_id < 0:
        raise GameOverError("no escapees remain")
    return best_id, best_dist


def representation_point(chain_members: list[Cell], escapee: Cell) -> Cell:
    """The chain member cell nearest the escapee; ties go to the lower index.

    This point stands in for the whole chain in that escapee's cost
    functions and is recomputed every cycle.
    """
    if not chain_members:
        raise ValueError("chain_members must be non-empty")
    best = chain_members[0]
    best_dist = euclidean_distance(best, escapee)
    for cell in chain_members[1:]:
        d = euclidean_distance(cell, escapee)
        if d < best_dist:
            best, best_dist = cell, d
    return best
