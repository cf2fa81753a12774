from .cwls import cwls_solve
from .exact import (
    exact_shapley,
    exact_shapley_by_permutations,
    loo_values,
    permutation_average_from_table,
    shapley_from_table,
    value_table,
)
from .sampling import (
    KernelSample,
    kernel_sample,
    kernel_sample_batch,
    kernel_size_distribution,
    kernel_weight,
    kernel_weights,
    permutation_shapley,
)
from .vector import ShapleyVector, efficient_normalize

__all__ = [
    'KernelSample',
    'ShapleyVector',
    'cwls_solve',
    'efficient_normalize',
    'exact_shapley',
    'exact_shapley_by_permutations',
    'kernel_sample',
    'kernel_sample_batch',
    'kernel_size_distribution',
    'kernel_weight',
    'kernel_weights',
    'loo_values',
    'permutation_average_from_table',
    'permutation_shapley',
    'shapley_from_table',
    'value_table',
]
