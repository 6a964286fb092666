"""Batch tournament harness: strategy matrix, seeded runs, T_c statistics.

Each matrix cell is one (chain strategy, escapee strategy) pair, run
``runs_per_cell`` times per agent count with per-run seeds derived from a
stable hash, so adding strategies or counts never perturbs existing cells.
"""

from __future__ import annotations

import hashlib
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from chaincatch.chain import ChainStrategy
from chaincatch.engine import GameConfig, GameTrace, run_game
from chaincatch.errors import ConfigError
from chaincatch.strategies import EscapeeStrategy, StrategyParams
from chaincatch.world import Arena

#: Paper-reported escapee performance, worst to best (ascending mean T_c).
ESCAPEE_ORDER = (
    EscapeeStrategy.RANDOM,
    EscapeeStrategy.NAIVE,
    EscapeeStrategy.K_CIRCLE_ROTATION,
    EscapeeStrategy.K_CIRCLE,
    EscapeeStrategy.SLIDING_SLOPE,
)

#: Paper-reported chain performance, best to worst (ascending mean T_c).
CHAIN_ORDER = (
    ChainStrategy.TAGGING_C2,
    ChainStrategy.TAGGING_C1,
    ChainStrategy.VARIANCE_C2,
    ChainStrategy.VARIANCE_C1,
    ChainStrategy.RANDOM,
)


@dataclass(frozen=True)
class MatrixSpec:
    escapee_strategies: tuple[EscapeeStrategy, ...]
    chain_strategies: tuple[ChainStrategy, ...]
    agent_counts: tuple[int, ...]
    runs_per_cell: int
    base_seed: int
    arena: Arena
    params: StrategyParams

    def __post_init__(self) -> None:
        if self.runs_per_cell < 1:
            raise ConfigError("runs_per_cell must be >= 1")
        for n in self.agent_counts:
            if n < 3:
                raise ConfigError(f"agent count {n} must be >= 3")


@dataclass(frozen=True)
class RunResult:
    chain_strategy: ChainStrategy
    escapee_strategy: EscapeeStrategy
    n_agents: int
    run_index: int
    seed: int
    outcome: str
    t_c: int


@dataclass
class CellStats:
    """Statistics for one (chain, escapee) cell, pooled over agent counts.

    Mean and deviation cover completed runs only; timeouts are counted
    separately and reported via the over-budget sentinel.
    """

    runs: list[RunResult] = field(default_factory=list)

    @property
    def completed(self) -> list[RunResult]:
        return [r for r in self.runs if r.outcome == "complete"]

    @property
    def timeouts(self) -> int:
        return sum(1 for r in self.runs if r.outcome != "complete")

    @property
    def mean(self) -> float:
        done = self.completed
        return statistics.fmean(r.t_c for r in done) if done else math.inf

    @property
    def stddev(self) -> float:
        done = self.completed
        if len(done) < 2:
            return 0.0
        return statistics.pstdev(r.t_c for r in done)

    @property
    def stderr(self) -> float:
        done = self.completed
        if not done:
            return math.inf
        return self.stddev / math.sqrt(len(done))


@dataclass
class TransitionTable:
    spec: MatrixSpec
    cells: dict[tuple[ChainStrategy, EscapeeStrategy], CellStats]

    def cell(self, chain: ChainStrategy, escapee: EscapeeStrategy) -> CellStats:
        return self.cells[(chain, escapee)]

    @property
    def sentinel(self) -> str:
        return f">{self.spec.arena.max_steps}"


def derive_seed(
    base_seed: int,
    chain: ChainStrategy,
    escapee: EscapeeStrategy,
    n_agents: int,
    run_index: int,
) -> int:
    """Stable 63-bit per-run seed from the cell coordinates and run index."""
    key = f"{base_seed}|{chain.value}|{escapee.value}|{n_agents}|{run_index}"
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _run_one(args: tuple) -> RunResult:
    chain, escapee, n, run_index, seed, arena, params = args
    config = GameConfig(
        arena=arena,
        n_agents=n,
        escapee_strategy=escapee,
        chain_strategy=chain,
        params=params,
        seed=seed,
    )
    trace = run_game(config)
    return RunResult(chain, escapee, n, run_index, seed, trace.outcome, trace.t_c)


def run_batch(spec: MatrixSpec, workers: int = 1) -> TransitionTable:
    """Run the full matrix. Runs are independent; with ``workers`` > 1 they
    execute in a process pool, and the table is identical either way."""
    jobs = []
    for chain in spec.chain_strategies:
        for escapee in spec.escapee_strategies:
            for n in spec.agent_counts:
                for r in range(spec.runs_per_cell):
                    seed = derive_seed(spec.base_seed, chain, escapee, n, r)
                    jobs.append((chain, escapee, n, r, seed, spec.arena, spec.params))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=1))
    else:
        results = [_run_one(job) for job in jobs]

    cells: dict[tuple[ChainStrategy, EscapeeStrategy], CellStats] = {
        (chain, escapee): CellStats()
        for chain in spec.chain_strategies
        for escapee in spec.escapee_strategies
    }
    for result in sorted(
        results,
        key=lambda r: (
            r.chain_strategy.value,
            r.escapee_strategy.value,
            r.n_agents,
            r.run_index,
        ),
    ):
        cells[(result.chain_strategy, result.escapee_strategy)].runs.append(result)
    return TransitionTable(spec=spec, cells=cells)


@dataclass
class OrderingReport:
    """Observed strategy orderings with pass/fail flags against the
    published performance orders. ``None`` flags mean not evaluable."""

    escapee_orderings: dict[ChainStrategy, list[EscapeeStrategy]]
    chain_orderings: dict[EscapeeStrategy, list[ChainStrategy]]
    escapee_flags: dict[ChainStrategy, bool | None]
    chain_flags: dict[EscapeeStrategy, bool | None]


def summarize_orderings(table: TransitionTable) -> OrderingReport:
    """Sort strategies by mean T_c per opponent and flag each ordering
    against the published one. All-timeout cells rank as infinite T_c."""
    spec = table.spec
    escapee_orderings: dict[ChainStrategy, list[EscapeeStrategy]] = {}
    escapee_flags: dict[ChainStrategy, bool | None] = {}
    for chain in spec.chain_strategies:
        ranked = sorted(
            spec.escapee_strategies, key=lambda e: table.cell(chain, e).mean
        )
        escapee_orderings[chain] = ranked
        expected = [e for e in ESCAPEE_ORDER if e in spec.escapee_strategies]
        escapee_flags[chain] = ranked == expected if len(ranked) > 1 else None

    chain_orderings: dict[EscapeeStrategy, list[ChainStrategy]] = {}
    chain_flags: dict[EscapeeStrategy, bool | None] = {}
    for escapee in spec.escapee_strategies:
        ranked = sorted(
            spec.chain_strategies, key=lambda c: table.cell(c, escapee).mean
        )
        chain_orderings[escapee] = ranked
        expected = [c for c in CHAIN_ORDER if c in spec.chain_strategies]
        chain_flags[escapee] = ranked == expected if len(ranked) > 1 else None

    return OrderingReport(escapee_orderings, chain_orderings, escapee_flags, chain_flags)


def format_ordering_report(report: OrderingReport) -> str:
    lines = []
    for chain, ranked in report.escapee_orderings.items():
        flag = report.escapee_flags[chain]
        verdict = "n/a" if flag is None else ("pass" if flag else "fail")
        order = " < ".join(e.value for e in ranked)
        lines.append(f"escapee order vs {chain.value}: {order} [{verdict}]")
    for escapee, ranked in report.chain_orderings.items():
        flag = report.chain_flags[escapee]
        verdict = "n/a" if flag is None else ("pass" if flag else "fail")
        order = " < ".join(c.value for c in ranked)
        lines.append(f"chain order vs {escapee.value}: {order} [{verdict}]")
    return "\n".join(lines)


def export_csv(table: TransitionTable, manifest: Sequence[str] = ()) -> str:
    """CSV of the transition table: rows are chain strategies, columns are
    escapee strategies, cells "mean±stddev" or the over-budget sentinel.
    Manifest lines are embedded as leading # comments."""
    spec = table.spec
    lines = [f"# {entry}" for entry in manifest]
    lines.append("chain\\escapee," + ",".join(e.value for e in spec.escapee_strategies))
    for chain in spec.chain_strategies:
        row = [chain.value]
        for escapee in spec.escapee_strategies:
            stats = table.cell(chain, escapee)
            if not stats.completed:
                row.append(table.sentinel)
            else:
                row.append(f"{stats.mean:.1f}±{stats.stddev:.1f}")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def export_runs(table: TransitionTable, manifest: Sequence[str] = ()) -> str:
    """Per-run structured text: one line per game, for downstream plots and
    round-trip recomputation of the table statistics."""
    lines = [f"# {entry}" for entry in manifest]
    for stats in table.cells.values():
        for r in stats.runs:
            lines.append(
                f"run chain={r.chain_strategy.value} "
                f"escapee={r.escapee_strategy.value} n={r.n_agents} "
                f"run={r.run_index} seed={r.seed} outcome={r.outcome} tc={r.t_c}"
            )
    return "\n".join(lines) + "\n"
