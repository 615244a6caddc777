"""Graph problems on multi-k-expressions: parsing, validation, normalization,
solvers (Hamiltonian Cycle, Edge Dominating Set, Max Cut), brute-force
oracles, random expression generation, and a Max Cut hardness instance
generator with a linear multi-expression witness."""

from .expr import (DuplicateVertexId, ExprError, Intro, Join,
                   JoinPreconditionViolated, LabeledGraph, MultiExpr,
                   NodeAnnotation, ParseError, Relabel, Union, UnknownLabel,
                   ValidationReport, evaluate, expr_equal, is_linear,
                   is_normalized, iter_nodes, max_label, node_count,
                   normalize, parse, serialize, validate)
from .graphs import (AuxMultigraph, SimpleGraph, TooLarge, aux_from_edges,
                     components, degree_vector, enumerate_cuts,
                     graph_from_text, graph_to_text, oracle_eds,
                     oracle_eds_direct, oracle_hamiltonian_cycle,
                     oracle_hamiltonian_path, oracle_max_cut,
                     oracle_max_matching, pair_table, simple_from_labeled)
from .hamcycle import (AuxFamily, HcRun, add_label_family,
                       check_red_blue_eulerian, family_from_multigraphs,
                       family_size_bound, forget_family, join_family,
                       leaf_family, reduce, root_accepts, run_hc, solve_hc,
                       union_family)
from .eds import (EdsRun, eds_add_label, eds_forget, eds_join, eds_leaf,
                  eds_optimum, eds_union, run_eds, solve_eds)
from .maxcut import (ClassState, McResult, RedundantExpressionTooLarge,
                     RedundantJoin, mc_join, mc_leaf, mc_relabel, mc_union,
                     solve_max_cut)
from .randexpr import (DEFAULT_PROFILE, GenerationFailed, GeneratorProfile,
                       gen_random_expr)
from .lbgen import (AuditItem, AuditReport, InstanceTooLarge, LbInstance,
                    MisInstance, ReductionParams, audit_gadgets,
                    build_expression, build_instance, build_lb,
                    compute_params, make_F, make_Fprime, make_H, make_Hif,
                    make_T, mis_has_multicolored_is, mis_to_text, pad_mis,
                    parse_mis)
