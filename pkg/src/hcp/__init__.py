"""Feasible-basis machinery for Hamiltonian cycle search on discounted-flow polytopes.

Subpackages: graph (generation and I/O), polytope (constraint assembly),
basis (solves, feasibility, pivots), structure (classification theory),
census (exhaustive and sampled counts), walk (random-walk search),
cli (command line and table reproduction).
"""

from .graph import (DirectedGraph, PlantedInstance, complete_graph, cycle_arcs,
                    gen_binomial, gen_hamiltonian_binomial, read_edge_list,
                    write_edge_list)
from .polytope import (ExactRational, FloatMode, PolytopeSystem, build_h, build_wh,
                       rescale_f_to_h, rescale_h_to_f, wedge_beta_threshold)
from .basis import (Basis, InfeasibleSystemError, PivotMove, adjacent_feasible_bases,
                    basic_solution, initial_feasible_basis, is_feasible_basis,
                    make_basis)
from .structure import (BasisClass, OrientedWalk, SupportGraph, classify_arc_set,
                        classify_basis, contains_hamiltonian_cycle, defect,
                        find_balanced_cycle, is_quasi_hamiltonian,
                        is_short_cycle_plus_noose_path, quasi_hamiltonian_cycle,
                        support, two_core)
from .census import (BudgetExceededError, CensusReport, closed_form_counts,
                     enumerate_feasible_bases, expected_counts, merge_reports,
                     monte_carlo_census, ratio_bounds)
from .walk import WalkConfig, WalkResult, walk_count_visits, walk_until_target

__version__ = "0.1.0"
