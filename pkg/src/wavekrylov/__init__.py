"""Interior generalized eigenvalues of sparse symmetric pencils from filtered wave solutions."""
from ._accel import BACKEND
from .dense import DenseSym, cholesky, generalized_sym_eig, sym_eig
from .filters import (FilterSpec, continuous_filter, discrete_filter, filter_curve,
                      weight_alpha)
from .krylov import (Breakdown, KrylovBasis, RitzReport, SolverConfig, TimeSteppingDiverged,
                     apply_filtered_operator, auto_filter, orthonormalize_against,
                     project_pencil, ritz_step, solve)
from .problems import (Pencil, dense_reference_eigs, laplacian_1d_neumann, laplacian_2d_rect,
                       load_matrix_market, save_matrix_market)
from .sparse import CsrMatrix, DiagInverse, check_symmetric, csr_from_triplets, diag_inverse, spmv
from .stepper import (StepperConfig, WavePair, estimate_max_omega, scalar_q,
                      scalar_q_closed_form, stable_tau, verlet_step)

__version__ = "0.1.0"
