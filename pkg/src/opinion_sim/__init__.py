"""Leader-driven opinion dynamics on signed networks with opinion-dependent trust."""
from .graph import (BalancePartition, DegreeStats, LeaderTree, SignedGraph,
                    check_structural_balance, degree_stats, find_leader_tree,
                    parse_edgelist, read_edgelist)
from .schedule import Schedule, make_schedule
from .weights import AffineFamily, WeightModel, constant, distrust_affine, trust_affine
from .dynamics import (AgentParams, RunResult, SignedDenominatorError, SimulationError,
                       SimulationState, SystemMatrices, build_p_matrix, build_q_matrix,
                       build_system_matrices, eval_weight, run, snapshot_graph, step)
from .analysis import (Certificate, ConvexCoefficients, Outcome, check_theorem,
                       classify_outcome, compute_epsilon, compute_l_sigma,
                       convex_coefficients, decay_bound_audit)

__version__ = "0.1.0"
