"""localdual: deterministic simulator and analysis oracle for primal-dual
distributed optimization with local updates."""

from .analysis import (DualQuadratic, dual_grad_centralized, dual_grad_decentralized,
                       dual_hessian_centralized, dual_hessian_decentralized,
                       dual_value_centralized, dual_value_decentralized, fd_gradient,
                       lagrangian_centralized, lagrangian_decentralized, lam_from_zeta,
                       predicted_dual_bounds, primal_argmin_given_dual, span_residual)
from .catalyst import (CatalystParams, InnerResult, SubproblemSpec, acc_inner,
                       certified_primal_gap, epsilon_schedule, exact_inner,
                       ga_msgd_inner, make_subproblem, momentum_schedule, run_catalyst)
from .central import (GaMsgdEngine, GaMsgdParams, init_dual_centralized, run_ga_msgd)
from .decentral import (AccParams, DecenState, DualAscentEngine, accelerated_beta,
                        run_acc_ga_msgd, run_centralized_acc, run_led)
from .errors import (BudgetExceededError, ConfigError, DivergenceError,
                     LocaldualError, ValidationError)
from .harness import (ExperimentConfig, LocalSgdParams, emit_metrics,
                      fit_geometric_rate, load_config, load_records, run_experiment,
                      run_local_sgd, verification_suite)
from .problems import (ProblemSpec, ReferenceSolution, evaluate, evaluate_global,
                       load_problem, make_logistic, make_nonconvex, make_quadratic,
                       problem_from_dict, problem_to_dict, reference_solution,
                       save_problem, stoch_grad, validate_problem)
from .records import Row, RunRecord
from .rng import algorithm_stream, client_stream, derived_seed
from .topology import (Topology, build_topology, gossip_average, load_weight_matrix,
                       mix, spectral_gap, topology_from_matrix, u_matrix)

__version__ = "0.1.0"
