"""Euler characteristics of Kronecker quiver moduli spaces from stable spanning-tree censuses."""
from .algebra import Polynomial, binomial, factorial, poly_eval
from .bounds import (
    BoundReport,
    asymptotic_values,
    bound_table,
    chi_partition_upper_bound,
    chi_upper_bound,
)
from .euler import (
    ChiResult,
    chi_kronecker,
    chi_partition_pair,
    chi_trivial_aka_closed_form,
    labeled_stable_tree_count,
    t_weight_sum_closed_form,
)
from .partitions import (
    PartitionPair,
    WeightedPartition,
    composition_count,
    enumerate_partitions,
    mps_coefficient,
    partition_count_bound,
)
from .quiver import (
    SupportQuiver,
    dualities,
    euler_form,
    is_imaginary_schur_root,
    is_theta_coprime,
    king_theta,
    moduli_dimension,
    slope,
)
from .splitting import SplitMove, apply_split, find_valid_splits, refine_partition_at, refine_to_trivial
from .trees import (
    LocalizationTree,
    automorphism_weight,
    cayley_count,
    degree_product_bound,
    enumerate_spanning_trees,
    is_stable,
    stable_census,
    tree_weight_v,
)

__version__ = "0.1.0"
