"""Exact Waring numbers over finite fields.

g(k, q) is the least s such that every element of F_q is a sum of s
k-th powers.  The library computes it two ways: as the diameter of the
power-residue Cayley graph on F_q (exact BFS at desk scale), and through
reduction formulas with machine-checkable derivation certificates at any
scale, with a catalog of closed-form families in between.
"""

__version__ = "0.1.0"

from .arith import (  # noqa: F401
    euler_phi,
    factorize,
    is_primitive_divisor,
    mult_order,
    normalize_k,
    psi_mod,
    radical,
    valuation,
    waring_exists,
)
from .classify import classify_pair, family_scan, known_value, small_range  # noqa: F401
from .ff import FieldTable, build_field, power_residues  # noqa: F401
from .gpgraph import (  # noqa: F401
    GPGraph,
    cartesian_decomposition,
    diameter_additivity_check,
    gp_graph,
    is_connected,
    is_undirected,
    waring_bfs,
    waring_number_bfs,
)
from .reduction import (  # noqa: F401
    Certificate,
    certificate_from_json,
    certificate_to_json,
    hamming_value,
    kononen1,
    kononen2,
    reduce,
    replay_certificate,
)
