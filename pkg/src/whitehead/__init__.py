"""Whitehead's algorithm, Whitehead graphs and geodesic-current tools for free groups."""

from .core import (
    CyclicWord,
    Word,
    count_occurrences,
    cyclic_reduce,
    free_reduce,
    make_rng,
    sample_cyclically_reduced,
    sample_reduced,
)
from .autos import (
    Automorphism,
    CharPair,
    compose,
    enumerate_wh2,
    invert,
    is_simple,
    parse_automorphism,
    wh2_images,
)
from .graph import graph_distance, length_change, normalize, whitehead_graph
from .minimizer import automorphic_equivalence, is_strictly_minimal, minimize
from .currents import euler_word, rational_current, uniform_current

__version__ = "0.1.0"

__all__ = [
    "Automorphism",
    "CharPair",
    "CyclicWord",
    "Word",
    "automorphic_equivalence",
    "compose",
    "count_occurrences",
    "cyclic_reduce",
    "enumerate_wh2",
    "euler_word",
    "free_reduce",
    "graph_distance",
    "invert",
    "is_simple",
    "is_strictly_minimal",
    "length_change",
    "make_rng",
    "minimize",
    "normalize",
    "parse_automorphism",
    "rational_current",
    "sample_cyclically_reduced",
    "sample_reduced",
    "uniform_current",
    "wh2_images",
    "whitehead_graph",
]
