"""Trees, tree constructions, plateaux and bad points."""

from .badpoints import (
    BadPoint, SuccessorFamily, detect_bad_points, detect_zbad_points, strictify,
    theta_family, theta_successor_family,
)
from .constructions import Embedding, embeddable, psi_fragment, psi_leq, psi_successors_rule, sigma_tree
from .core import (
    Certificate, FullBinaryTree, LazyTree, OrdinalChain, Tree, antichain_decomposition, chain,
    q_embed, tree_query,
)
from .plateaux import (
    BranchingCore, Plateau, PlateauPartition, chain_refine, check_increasing, ever_branching_core,
    partition_problems, plateau_intersect, plateau_partition, plateau_problem, value_cmp,
)
