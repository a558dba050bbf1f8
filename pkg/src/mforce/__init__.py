"""Strong-coupling thermodynamics of a damped, parametrically driven
oscillator: equilibrium mean-force quantities, regularized densities of
states, Gaussian moment dynamics, and work/heat accounting."""

from .model import (ModelParams, DrivingParams, DressedMode, drive_omega,
                    dressed_mode, mixing_matrix, mixing_rate_mu,
                    bose_occupation)
from .gaussian import (CovarianceMatrix, GaussianState, symplectic_eigenvalue,
                       gaussian_entropy, occupation_from_cov)
from .numerics import (QuadratureSpec, OdeSpec, IltSpec, integrate_tail,
                       propagate, inverse_laplace)
from .equilibrium import (EquilibriumPoint, StarComparison, eq_nu, eq_entropy,
                          free_energy_sharp, partition_sharp,
                          internal_energy_sharp, heat_capacity_sharp,
                          phi_and_offset, star_quantities, equilibrium_point)
from .dos import (DensityGrid, DistributionSeries, density_sharp,
                  cumulative_sharp, density_closed_forms,
                  density_sharp_perturbative, density_so_perturbative,
                  partition_from_density, partition_from_series)
from .dynamics import (Moments, PropagatorSet, initial_moments_product,
                       initial_moments_joint_gibbs, covariance_no_driving,
                       covariance_relaxation, default_dense_dt,
                       propagators_driven, evolve_moments, reduced_covariance)
from .thermo import (ThermoRecord, quench_work, internal_energy_noneq,
                     work_driven, heat_and_entropy_production,
                     noneq_free_energy, trajectory_record,
                     weak_coupling_measure)
from .focklab import (DensityMatrix, BlockSpec, annihilation_op, thermal_state,
                      squeezed_vacuum, mode_moments, partial_trace,
                      so_hamiltonian, truncated_so_gibbs,
                      lindblad_evolve_truncated, relative_entropy, petz_map,
                      verify_thermo_initial_condition, build_block_state)

__version__ = "0.1.0"
