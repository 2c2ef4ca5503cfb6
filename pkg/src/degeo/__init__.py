"""Degeneracy geometry of the potential-density mapping on finite graphs."""

from .errors import CatalogError, DegeoError, DomainError, NumericalError
from .lattice import (Graph, OneBodyOperator, Potential, add_potential,
                      dump_graph, graph_names, laplacian, load_graph,
                      named_graph, parse_graph)
from .fock import (Density, FockBasis, ManyBodyOperator, State,
                   add_interaction, density_of_state, enumerate_basis,
                   lift_one_body, slater, transition_density)
from .spectra import Eigenspace, Spectrum, eig_sym, ground_eigenspace
from .degmap import (DegeneracyClass, build_class, class_from_factors,
                     kernel_nonintersection_check, rho_of_ensemble, rho_of_x,
                     veronese)
from .regions import (MembershipResult, RegionSample, barycentric_project,
                      helmert_basis, membership_in_D, membership_in_DC,
                      membership_in_DR, non_pure_check, sample_DC, sample_DR,
                      sample_ensemble)
from .inversion import (FunctionalValue, InversionOptions, InversionResult,
                        RatioEstimate, SystemSpec, degeneracy_ratio, energy,
                        ground_class, hamiltonian, invert_batch,
                        invert_density, sample_hypersimplex, universal_F)
from .geometry import (DegeneracyDirections, ScanReport, degeneracy_directions,
                       first_order_preservation_test, locate_degeneracy_1d,
                       ray_scan, segment_scan, structure_sweep)

__version__ = "0.1.0"
