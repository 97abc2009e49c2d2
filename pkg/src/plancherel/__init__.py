"""Random partitions under the Plancherel measure: exact combinatorics, samplers,
limit-shape numerics, fluctuation statistics and discrete Bessel kernel predictions."""

from .bessel import BesselTable, KernelPrediction, bessel_table, correlation_rho, kernel_diagonal, kernel_value, predict_counts
from .fluctuations import (
    FluctuationSample, chebyshev_U, count_interval, delta_rotated, delta_vertical, kerov_functional,
    y_rotated, y_vertical,
)
from .kerov import (
    GaussianVectorSpec, SeriesState, cov_partial_sum, degrees_of_freedom, sample_limit_vector,
    sample_partial_sum,
)
from .limit_shape import RotatedProfile, omega, omega_rotated, rotate_profile, theta_of_u, theta_of_x
from .partitions import (
    FrobeniusSet, Partition, conjugate, count_frobenius_at_least, dimension_bruteforce,
    enumerate_partitions, frobenius_points, log_dimension, make_partition, plancherel_pmf, profile_eval,
)
from .samplers import (
    SampleBatch, SeededStream, rsk_shape, sample_batch, sample_plancherel_growth, sample_plancherel_rsk,
    sample_poissonized, sample_uniform_permutation,
)
from .stats import StatSummary, chi2_gof, empirical_cov, ks_statistic, normal_cdf

__all__ = [name for name in dir() if not name.startswith("_")]
