"""Thickness of compact sets in R^d and its consequences."""
from .bounds import (constants, convex_gap_dim_bound, dim_lower_1d, intersection_bound, optimize_c,
                     pattern_capacity, single_set_bound, winning_set_bound)
from .gaplemma import gap_lemma_decide, linked, linked_refine
from .geometry import Ball, Box, CellUnion
from .sets import CentralCantor, Explicit, Sponge, Translate, Scale, enumerate_gaps, load, dump
from .thickness import sponge_thickness_closed_form, thickness, thickness_1d, thickness_rd
from .verify import box_counting, brute_intersection, pattern_search, rasterize

__all__ = [
    "Ball", "Box", "CellUnion", "CentralCantor", "Explicit", "Scale", "Sponge", "Translate",
    "box_counting", "brute_intersection", "constants", "convex_gap_dim_bound", "dim_lower_1d", "dump",
    "enumerate_gaps", "gap_lemma_decide", "intersection_bound", "linked", "linked_refine", "load",
    "optimize_c", "pattern_capacity", "pattern_search", "rasterize", "single_set_bound",
    "sponge_thickness_closed_form", "thickness", "thickness_1d", "thickness_rd", "winning_set_bound",
]
