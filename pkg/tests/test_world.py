"""Arena geometry, distances, candidate moves, slopes and nearest-agent queries."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincatch.errors import ConfigError, GameOverError
from chaincatch.world import (
    Arena,
    Cell,
    candidate_cells,
    euclidean_distance,
    nearest_escapee,
    representation_point,
    slope_cells,
)


def test_euclidean_distance_345_triangle():
    assert euclidean_distance(Cell(0, 0), Cell(3, 4)) == 5.0


def test_euclidean_distance_identity():
    assert euclidean_distance(Cell(7, 7), Cell(7, 7)) == 0.0


def test_euclidean_distance_unit_diagonal():
    assert euclidean_distance(Cell(0, 0), Cell(1, 1)) == pytest.approx(
        math.sqrt(2), abs=1e-12
    )


@given(
    st.tuples(st.integers(0, 100), st.integers(0, 100)),
    st.tuples(st.integers(0, 100), st.integers(0, 100)),
    st.tuples(st.integers(0, 100), st.integers(0, 100)),
)
def test_euclidean_distance_triangle_inequality(a, b, c):
    a, b, c = Cell(*a), Cell(*b), Cell(*c)
    assert euclidean_distance(a, c) <= (
        euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9
    )


@pytest.fixture
def small_arena():
    return Arena(width=10, height=10, agent_diameter=2, slope_length=1, max_steps=10)


def test_candidate_cells_corner(small_arena):
    # Corner clips five of the eight neighbours; scan order is
    # stay, N, NE, E, SE, S, SW, W, NW.
    cells = candidate_cells(small_arena, set(), Cell(0, 0))
    assert cells == [Cell(0, 0), Cell(1, 0), Cell(1, 1), Cell(0, 1)]


def test_candidate_cells_interior(small_arena):
    cells = candidate_cells(small_arena, set(), Cell(5, 5))
    assert len(cells) == 9
    assert cells[0] == Cell(5, 5)


def test_candidate_cells_one_neighbour_occupied(small_arena):
    cells = candidate_cells(small_arena, {Cell(5, 4)}, Cell(5, 5))
    assert len(cells) == 8
    assert Cell(5, 4) not in cells


def test_candidate_cells_fully_enclosed(small_arena):
    occupancy = {
        Cell(5 + dx, 5 + dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)
    }
    assert candidate_cells(small_arena, occupancy, Cell(5, 5)) == [Cell(5, 5)]


@given(
    st.integers(0, 9),
    st.integers(0, 9),
    st.sets(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=8),
)
def test_candidate_cells_bounds_and_occupancy(x, y, occupied):
    arena = Arena(width=10, height=10, agent_diameter=2, slope_length=1, max_steps=10)
    origin = Cell(x, y)
    occupancy = {Cell(*c) for c in occupied}
    cells = candidate_cells(arena, occupancy, origin)
    assert 1 <= len(cells) <= 9
    assert cells[0] == origin
    for cell in cells[1:]:
        assert arena.in_bounds(cell)
        assert cell not in occupancy
        assert abs(cell.x - origin.x) <= 1 and abs(cell.y - origin.y) <= 1


def test_slope_cells_nw_group_default_arena():
    groups = slope_cells(Arena())
    nw = next(g for g in groups if g.corner == "nw")
    assert nw.cells == frozenset(Cell(i, 15 - i) for i in range(16))
    assert set(nw.endpoints) == {Cell(0, 15), Cell(15, 0)}


def test_slope_cells_minimal_length():
    groups = slope_cells(Arena(slope_length=1))
    nw = next(g for g in groups if g.corner == "nw")
    assert nw.cells == frozenset({Cell(0, 1), Cell(1, 0)})


def test_slope_cells_four_disjoint_groups():
    groups = slope_cells(Arena())
    assert len(groups) == 4
    all_cells = [c for g in groups for c in g.cells]
    assert len(all_cells) == len(set(all_cells)) == 4 * 16


def test_slope_cells_mirror_symmetry():
    arena = Arena()
    groups = {g.corner: g.cells for g in slope_cells(arena)}
    flip_x = lambda c: Cell(arena.width - 1 - c.x, c.y)
    flip_y = lambda c: Cell(c.x, arena.height - 1 - c.y)
    assert {flip_x(c) for c in groups["nw"]} == groups["ne"]
    assert {flip_y(c) for c in groups["nw"]} == groups["sw"]
    assert {flip_y(flip_x(c)) for c in groups["nw"]} == groups["se"]


def test_nearest_escapee_picks_closer():
    agent_id, dist = nearest_escapee([(1, Cell(3, 4)), (2, Cell(6, 8))], Cell(0, 0))
    assert (agent_id, dist) == (1, 5.0)


def test_nearest_escapee_tie_breaks_to_lower_id():
    agent_id, dist = nearest_escapee([(4, Cell(6, 5)), (3, Cell(5, 6))], Cell(5, 5))
    assert (agent_id, dist) == (3, 1.0)


def test_nearest_escapee_empty_raises():
    with pytest.raises(GameOverError):
        nearest_escapee([], Cell(0, 0))


@settings(max_examples=50)
@given(
    st.lists(
        st.tuples(st.integers(0, 74), st.integers(0, 74)),
        min_size=1,
        max_size=10,
        unique=True,
    )
)
def test_nearest_escapee_matches_brute_force(points):
    escapees = [(i, Cell(*p)) for i, p in enumerate(points)]
    origin = Cell(0, 0)
    best = min(escapees, key=lambda e: (euclidean_distance(origin, e[1]), e[0]))
    assert nearest_escapee(escapees, origin) == (
        best[0],
        euclidean_distance(origin, best[1]),
    )


def test_representation_point_nearest_member():
    members = [Cell(0, 0), Cell(2, 0), Cell(4, 0)]
    assert representation_point(members, Cell(5, 1)) == Cell(4, 0)


def test_representation_point_singleton():
    assert representation_point([Cell(3, 3)], Cell(70, 70)) == Cell(3, 3)


def test_representation_point_tie_goes_to_lower_index():
    members = [Cell(0, 0), Cell(4, 0)]
    assert representation_point(members, Cell(2, 0)) == Cell(0, 0)


@settings(max_examples=50)
@given(
    st.lists(
        st.tuples(st.integers(0, 74), st.integers(0, 74)),
        min_size=1,
        max_size=8,
        unique=True,
    ),
    st.tuples(st.integers(0, 74), st.integers(0, 74)),
)
def test_representation_point_matches_brute_force(points, escapee):
    members = [Cell(*p) for p in points]
    escapee = Cell(*escapee)
    got = representation_point(members, escapee)
    best = min(euclidean_distance(m, escapee) for m in members)
    assert euclidean_distance(got, escapee) == best


def test_representation_point_empty_raises():
    with pytest.raises(ValueError):
        representation_point([], Cell(0, 0))


def test_arena_rejects_undersized_grid():
    with pytest.raises(ConfigError):
        Arena(width=10, height=10, agent_diameter=5)


def test_arena_rejects_bad_slope_length():
    with pytest.raises(ConfigError):
        Arena(slope_length=40)
    with pytest.raises(ConfigError):
        Arena(slope_length=0)


def test_arena_rejects_bad_max_steps():
    with pytest.raises(ConfigError):
        Arena(max_steps=0)


def test_arena_from_config(tmp_path):
    path = tmp_path / "arena.cfg"
    path.write_text("width = 40\nheight = 40\n# a comment\nmax_steps = 100\n")
    arena = Arena.from_config(str(path))
    assert (arena.width, arena.height, arena.max_steps) == (40, 40, 100)
    assert arena.agent_diameter == 5  # default applies for absent keys


def test_arena_from_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "arena.cfg"
    path.write_text("diameter = 5\n")
    with pytest.raises(ConfigError):
        Arena.from_config(str(path))


def test_arena_from_config_rejects_non_integer(tmp_path):
    path = tmp_path / "arena.cfg"
    path.write_text("width = wide\n")
    with pytest.raises(ConfigError):
        Arena.from_config(str(path))
