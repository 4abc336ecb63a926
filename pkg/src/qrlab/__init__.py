"""Finite-group laboratory for quasirandomness, mixing inequalities and
recurrence-pattern counts."""

from .characters import UNBOUNDED, CharacterTable, character_degrees, quasirandomness_degree
from .conjugacy import (ConjugacyTable, commuting_pairs, conjugacy_classes,
                        noncommutativity_bound, project_invariant)
from .functions import DensityFunction, SubsetMask
from .groups import (CapExceeded, FiniteGroup, GroupSpecError, cayley_table, direct_product,
                     make_alternating, make_cyclic, make_sl2, make_symmetric, parse_group)

__version__ = "0.1.0"
