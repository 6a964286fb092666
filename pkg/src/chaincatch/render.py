"""Static frame rendering of game traces: text grids by default, PNG on
request. One frame per sampled cycle plus a final summary frame."""

from __future__ import annotations

import os

from chaincatch.engine import Catch, CycleRecord, GameTrace
from chaincatch.world import Cell, representation_point, slope_cells

AGENT_GLYPHS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _bresenham(a: Cell, b: Cell) -> list[tuple[int, int]]:
    """Integer line between two cells, endpoints included."""
    x0, y0, x1, y1 = a.x, a.y, b.x, b.y
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    points = []
    while True:
        points.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return points
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def render_text_frame(
    trace: GameTrace, record: CycleRecord, *, k_circle: bool = False
) -> str:
    """One cycle as a text grid: slopes '/', chain links '+', agents drawn
    as filled disks of the agent diameter with their id glyph at the centre,
    caught pairs marked '!' and optionally the K circle as '*'."""
    arena = trace.config.arena
    grid = [["." for _ in range(arena.width)] for _ in range(arena.height)]

    for group in slope_cells(arena):
        for cell in group.cells:
            grid[cell.y][cell.x] = "/"

    positions = {i: Cell(x, y) for i, x, y in record.positions}

    if k_circle and record.chain_members:
        chain_cells = [positions[i] for i in record.chain_members]
        escapee_ids = [i for i in positions if i not in record.chain_members]
        if escapee_ids:
            centre = representation_point(chain_cells, positions[escapee_ids[0]])
            k = trace.config.params.k
            for y in range(arena.height):
                for x in range(arena.width):
                    d = ((x - centre.x) ** 2 + (y - centre.y) ** 2) ** 0.5
                    if abs(d - k) < 0.5:
                        grid[y][x] = "*"

    chain = record.chain_members
    for a, b in zip(chain, chain[1:]):
        for x, y in _bresenham(positions[a], positions[b])[1:-1]:
            grid[y][x] = "+"

    caught_ids = set()
    for event in record.events:
        if isinstance(event, Catch):
            caught_ids.update((event.catcher, event.caught))

    radius = arena.agent_diameter / 2
    for agent_id, pos in positions.items():
        r_int = int(radius)
        for dy in range(-r_int, r_int + 1):
            for dx in range(-r_int, r_int + 1):
                if dx * dx + dy * dy <= radius * radius:
                    x, y = pos.x + dx, pos.y + dy
                    if 0 <= x < arena.width and 0 <= y < arena.height:
                        grid[y][x] = "o"
    for agent_id, pos in positions.items():
        glyph = "!" if agent_id in caught_ids else AGENT_GLYPHS[agent_id % len(AGENT_GLYPHS)]
        grid[pos.y][pos.x] = glyph

    events = "; ".join(repr(e) for e in record.events) or "none"
    header = f"cycle {record.cycle}  chain={list(chain) or '-'}  events: {events}"
    return header + "\n" + "\n".join("".join(row) for row in grid) + "\n"


def render_summary(trace: GameTrace) -> str:
    final = trace.records[-1] if trace.records else None
    chain = list(final.chain_members) if final else []
    return (
        "summary\n"
        f"outcome: {trace.outcome}\n"
        f"t_c: {trace.t_c}\n"
        f"cycles recorded: {len(trace.records)}\n"
        f"final chain: {chain or '-'}\n"
    )


def render_trace(
    trace: GameTrace,
    out_dir: str,
    *,
    every: int = 1,
    image: bool = False,
    k_circle: bool = False,
) -> list[str]:
    """Write one frame per sampled cycle plus the summary; returns the
    written paths in order."""
    os.makedirs(out_dir, exist_ok=True)
    ext = "png" if image else "txt"
    paths = []
    for record in trace.records[::every]:
        path = os.path.join(out_dir, f"frame_{record.cycle:06d}.{ext}")
        if image:
            _render_png(trace, record, path, k_circle=k_circle)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(render_text_frame(trace, record, k_circle=k_circle))
        paths.append(path)
    summary_path = os.path.join(out_dir, "summary.txt")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write(render_summary(trace))
    paths.append(summary_path)
    return paths


def _render_png(trace: GameTrace, record: CycleRecord, path: str, *, k_circle: bool) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    arena = trace.config.arena
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.set_xlim(-1, arena.width)
    ax.set_ylim(arena.height, -1)  # row 0 on top, matching the text grid
    ax.set_aspect("equal")
    ax.set_title(f"cycle {record.cycle}")

    for group in slope_cells(arena):
        a, b = group.endpoints
        ax.plot([a.x, b.x], [a.y, b.y], linestyle="--", color="gray", linewidth=1)

    positions = {i: Cell(x, y) for i, x, y in record.positions}
    chain = record.chain_members
    for a, b in zip(chain, chain[1:]):
        pa, pb = positions[a], positions[b]
        ax.plot([pa.x, pb.x], [pa.y, pb.y], color="black", linewidth=1.5)

    radius = arena.agent_diameter / 2
    for agent_id, pos in positions.items():
        color = "tab:red" if agent_id in chain else "tab:blue"
        ax.add_patch(plt.Circle((pos.x, pos.y), radius, color=color, alpha=0.7))
        ax.annotate(str(agent_id), (pos.x, pos.y), ha="center", va="center", fontsize=7)

    if k_circle and chain:
        chain_cells = [positions[i] for i in chain]
        escapee_ids = [i for i in positions if i not in chain]
        if escapee_ids:
            centre = representation_point(chain_cells, positions[escapee_ids[0]])
            ax.add_patch(
                plt.Circle(
                    (centre.x, centre.y),
                    trace.config.params.k,
                    fill=False,
                    linestyle=":",
                    color="green",
                )
            )
    fig.savefig(path, dpi=100)
    plt.close(fig)
