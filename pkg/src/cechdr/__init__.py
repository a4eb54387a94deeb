"""cechdr: exact computational homological algebra for Cech-Deligne data.

Chain complexes of rational vector spaces, Dold-Kan, totalization of
cosimplicial chain complexes, homotopy pullbacks, polynomial differential
forms, Deligne-style stack models evaluated on budgeted forms, finite plot
diagrams with cocycle and gerbe checkers, and lattice group cohomology.
"""

from .qlinalg import (RAT, ZERO, ONE, rat, RationalMatrix, LinearSubspace,
                      QuotientSpace, SubspaceNotContained, rank, rref,
                      kernel, image, quotient_dim, solve, solve_particular,
                      matrix_in_bases)
from .chaincx import (ChainComplex, ChainMap, DegreeKMap, DegreeOutOfRange,
                      SquareNotCommuting, PullbackData, CommutingSquare,
                      same_complex, cycles, boundaries, homology,
                      homology_dim, is_fibration, is_quasi_iso,
                      smart_truncate, smart_truncate_with_inclusion,
                      mapping_complex, path_object, homotopy_pullback,
                      comparison_into_homotopy_pullback)
from .simplicial import (TruncationTooSmall, SimplicialIdentityError,
                         SimplicialVect, CosimplicialVect, dualize,
                         normalized_subspaces, normalized_chains, dold_kan,
                         identity_summand_embedding, free_simplex_chains,
                         free_simplex_map, matching_object,
                         matching_map_surjective)
from .totalize import (SignIsoFailure, CosimplicialChain, DoubleComplex,
                       TotComplex, to_double_complex,
                       conormalized_double_complex, tot, tot_dv, tot_layout,
                       sign_iso, tot_cohomology, induced_tot_map,
                       verify_end_formula)
from .polyforms import (BudgetOverflow, PolyForm, PolyMap, FormSpace,
                        exterior_d, wedge, pullback, poincare_h,
                        d_matrix, h_matrix, eval_sheaf, SheafValue)
from .stacks import (MODEL_NAMES, InvalidParameters, UnstableWindow,
                     StackModel, StackMap, SquareReport, build_stack,
                     theorem_diagram, verify_square,
                     verify_presentation_equivalence,
                     fiber_sequence_exactness_check)
from .plotdiag import (ChainBoundExceeded, NotFlat, NotGlobal, NotClosed,
                       PRESET_NAMES, PlotObject, PlotMorphism, PlotDiagram,
                       validate_diagram, good_cover_diagram,
                       diagram_to_json, diagram_from_json, load_diagram,
                       save_diagram, nerve_chains, chain_source, chain_face,
                       discrete_coefficients, evaluate_cosimplicial,
                       stack_cohomology, CheckResult, CocycleData,
                       ConnectionData, GerbeData, check_cocycle,
                       check_morphism, check_connection, check_gerbe,
                       gerbe_tot_vector, constant_cech, CohClass,
                       global_forms, derham_quotient, class_map_theta,
                       class_map_alpha, class_map_beta, class_map_gamma,
                       verify_degree1_sequence, Degree1Report)
from .torus import (OracleRangeExceeded, InconsistentSpec, koszul_boundary,
                    koszul_group_cohomology, bar_coboundary, bar_cohomology,
                    derham_input_torus, ExactSeqSpec, SolveResult,
                    exact_solve, solve_system, exactseq_to_json,
                    exactseq_from_json, load_exactseq, save_exactseq,
                    torus_report)

__version__ = "0.1.0"
