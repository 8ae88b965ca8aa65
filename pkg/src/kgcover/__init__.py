"""kgcover: exact K-theory of higher-rank graph algebras built from
covering systems.

The public surface re-exports the main types and operations; see the
module docstrings for the mathematics each piece implements.
"""

from .abgroups import (CokerContext, FgAbGroup, FgAbMap, KernelContext,
                       SubquotientContext, induced_map, subquotient)
from .construct import CoverGraph, TowerGraph, build_cover, build_tower
from .covering import (Cocycle, Covering, CoveringSystem,
                       MatrixCoveringSystem, Tower, lift_path,
                       make_covering_system, trivial_cocycle,
                       validate_cocycle, validate_covering,
                       validate_matrix_system, validate_tower)
from .dynamics import (cycles_with_entrance, has_cycle_with_entrance,
                       is_aperiodic_1graph, is_cofinal, tower_report)
from .intmat import IntMatrix, SnfResult, kernel_basis, smith_normal_form
from .kgraph import (Edge, KGraph, Path, Skeleton, compose, disjoint_union,
                     enumerate_paths, factorize, path_from_edges,
                     product_graph, validate_kgraph, vertex_path)
from .ktheory import (AdjacencyData, GradedKMap, GradedKPair, KoszulComplex,
                      induced_kmap, kmap_kunneth, koszul_homology, kunneth,
                      ktheory_1graph, ktheory_2graph, ktheory_tower)
from .limits import (DirectSystem, LimitClassification, SupernaturalNumber,
                     classify, equal_in_limit)

__version__ = "0.1.0"
