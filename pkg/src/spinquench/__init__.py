"""Exact-diagonalization engine for local quenches on frustrated
spin-1/2 Heisenberg rings, with full time statistics of the Loschmidt
echo, subsystem trace distance, and local magnetization."""

__version__ = "0.1.0"

from .basis import SectorBasis, enumerate_sector, lookup
from .operators import (ModelParams, SparseOperator, apply,
                        build_hamiltonian, build_subsystem_sz)
from .quench import (QuenchSpec, QuenchState, TruncationError, compute_weights,
                     evolve_state, le_series, loschmidt_echo,
                     minimum_populated_gap, observable_expectation,
                     observable_mean, truncate_by_weight)
from .spectral import (ConvergenceError, EigenData, ResourceError,
                       dense_diagonalize, ground_state_search,
                       lanczos_lowest_k, spectrum_scan)
from .subsystem import (BoundsReport, ObservableSeries, ReducedState,
                        average_reduced_state, check_bounds,
                        environment_average_purity, partial_trace,
                        sample_reduced_series, trace_distance)
from .timestats import (Distribution, SamplingPlan, histogram, sample_series,
                        truncated_le_distribution, two_mode_density,
                        two_mode_edges, two_mode_variance)
from .toymodel import ToyParams, toy_ds, toy_ds_cdf, toy_ds_density, toy_ds_mean
