"""Topological representatives: images, filtration, turns and the IRTT verifier."""
from .filtration import Filtration, Stratum, StratumKind, compute_filtration, weight
from .graphmap import (GraphMap, bundled_names, bundled_path, iterate_map, load_bundled,
                       load_ttm, parse_ttm)
from .irtt import IrttReport, find_power_k1, k1_iterate, seeds, verify_irtt
from .turns import Turn, all_turns, derivative, is_legal_turn, is_r_legal, turn_map, turn_orbit

__all__ = [
    "Filtration", "Stratum", "StratumKind", "compute_filtration", "weight",
    "GraphMap", "bundled_names", "bundled_path", "iterate_map", "load_bundled", "load_ttm",
    "parse_ttm", "IrttReport", "find_power_k1", "k1_iterate", "seeds", "verify_irtt",
    "Turn", "all_turns", "derivative", "is_legal_turn", "is_r_legal", "turn_map", "turn_orbit",
]
