from .core import *  # noqa: F401,F403
from .core import (
    NotClosed, NotConstructible, NotOpen, SheafComplex, SheafMap, Triangle,
    adjunction_triangles, compact_sections, constant_sheaf, cone_sheaf, costalk,
    costandard_object, quasi_isomorphic, restriction, sections, shift_sheaf,
    skyscraper, stalk, standard_object, verdier_dual, zero_sheaf,
)
from .decompose import DecompositionTree, NotGenerated, decompose_into_standards, minimal_model, same_sections
from .hom import HomComplex, as_cochain, as_vector, compose, hom_pair_oracle, hom_standard, unit_cochain
from .injective import InjComplex, InjMap, minimize, nerve_model, standard_model
