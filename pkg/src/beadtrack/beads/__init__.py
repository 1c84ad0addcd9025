"""Nibbled futures, monochromatic paths, beads and the empirical verifiers."""
from .classify import Bead, BeadKind, BeadedResult, beaded_decomposition, classify_bead
from .nibble import (FamilyForest, NibbleKind, NibblePolicy, monochromatic_evidence,
                     monochromatic_paths, nibbled_futures)
from .verify import (BeadParams, find_bead_params, is_gep_fragment, split_after_iteration,
                     verify_bdt, verify_decomp_theorem, verify_refinements)

__all__ = [
    "Bead", "BeadKind", "BeadedResult", "beaded_decomposition", "classify_bead",
    "FamilyForest", "NibbleKind", "NibblePolicy", "monochromatic_evidence", "monochromatic_paths",
    "nibbled_futures", "BeadParams", "find_bead_params", "is_gep_fragment",
    "split_after_iteration", "verify_bdt", "verify_decomp_theorem", "verify_refinements",
]
