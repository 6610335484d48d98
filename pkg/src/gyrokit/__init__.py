"""Gyrogroup toolkit: carriers, axiom checks, subgyrogroups and cosets, set
algebra, neighborhood chains, and the dyadic prenorm / coset metric."""

from .core import (EXHAUSTIVE_CAP, Carrier, DomainError, GyroError, PropertyResult, VerificationReport,
                   gyr_consistency_check, is_degenerate_group, verify_axioms)
from .carriers import (KLEIN_FOUR, FiniteGyrogroupTable, GroupTable, MalformedTable, MobiusDisk, NotAGroup,
                       NotAGyrogroup, ProductCarrier, cyclic_table, finite_from_table, group_adapter, mobius_make,
                       product)
from .subgyro import (CapExhausted, Contained, CosetDecomposition, Escape, IllDefined, PartitionFailure,
                      SubgyroHandle, generated, is_L_subgyrogroup, is_subgyrogroup, left_cosets, nss_probe,
                      quotient, subgyrogroup)
from .sets import (Ball, CarrierMismatch, ConditionsViolated, ExactSet, NeighborhoodChain, SampledSet, SetHandle,
                   ball_chain, ball_sum_radius, closure_via_chain, disjointness_check, finite_chain,
                   geometric_chain, harmonic_chain, intersection_subgyrogroup, set_add, set_equal, set_gyr,
                   set_inv, subset_check, validate_chain)
from .prenorm import (ChainInvalid, ChainMismatch, DyadicFamily, PrenormTable, build_dyadic_family,
                      coset_metric, disk_grid, f_value, metric_check, prenorm, prenorm_check, prenorm_table,
                      pseudometric_d)
from .search import BudgetExhausted, SearchResult, canonical_form, search_small
from .tablefile import TableParseError, read_table, write_table

__version__ = "0.1.0"
