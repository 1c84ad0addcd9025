"""Relative train track maps, hard splittings, Nielsen paths and beaded decompositions."""
from .config import Caps, DEFAULT_CAPS
from .core import EdgePath, MarkedGraph, OrientedEdge, parse_path, tighten
from .errors import (BeadtrackError, CapExceeded, EmptyPath, InputError, InvalidMap,
                     MissingInventory, NotIncident, NotIterated, ParseError, UnknownEdge)
from .traintrack import GraphMap, iterate_map, load_bundled, load_ttm, parse_ttm

__all__ = [
    "Caps", "DEFAULT_CAPS", "EdgePath", "MarkedGraph", "OrientedEdge", "parse_path", "tighten",
    "BeadtrackError", "CapExceeded", "EmptyPath", "InputError", "InvalidMap", "MissingInventory",
    "NotIncident", "NotIterated", "ParseError", "UnknownEdge",
    "GraphMap", "iterate_map", "load_bundled", "load_ttm", "parse_ttm",
]
