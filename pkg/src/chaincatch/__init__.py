"""Chain Catch: a deterministic grid-world pursuit game with cost-model
strategies for the Catcher, the Escapees and the growing chain, plus a
batch harness comparing strategies by time to complete the chain."""

from chaincatch.chain import CatchMode, ChainState, ChainStrategy
from chaincatch.engine import GameConfig, GameTrace, run_game
from chaincatch.errors import ChainCatchError
from chaincatch.experiments import MatrixSpec, TransitionTable, run_batch
from chaincatch.strategies import EscapeeStrategy, StrategyParams
from chaincatch.world import Arena, Cell

__all__ = [
    "Arena",
    "CatchMode",
    "Cell",
    "ChainCatchError",
    "ChainState",
    "ChainStrategy",
    "EscapeeStrategy",
    "GameConfig",
    "GameTrace",
    "MatrixSpec",
    "StrategyParams",
    "TransitionTable",
    "run_batch",
    "run_game",
]

__version__ = "0.1.0"
