"""Constructions and exhaustive certification of partial difference sets,
amorphic Cayley schemes and Paley-Hadamard difference sets in small
(mostly nonabelian) p-groups and their direct products."""
from .algebra import (
    Census,
    Certificate,
    classify_parameters,
    convolution,
    difference_census,
    scheme_constants,
    verify_amorphic,
    verify_ds,
    verify_mixed_product,
    verify_partition,
    verify_pds,
    verify_regularity,
    verify_skew_hadamard,
)
from .constructions import (
    PartitionScheme,
    affine_abelian,
    affine_g1,
    affine_g2,
    affine_paley_q4,
    affine_scheme_q4,
    latin3_partitions,
    paley_field_set,
    semidirect_latin3,
    semidirect_paley,
    semidirect_scheme,
)
from .field import GF, SquareClass, field_new, gf
from .groups import (
    AbelianGroup,
    AffineGroup,
    DirectProduct,
    ElementSet,
    Group,
    SemidirectGroup,
    abelian_group,
    cyclic_group,
    direct_product,
    semidirect_group,
)
from .products import Recipe, combine3, paley_product, recipe_extract, recipe_instantiate, stanton_sprott
from .quadform import QuadForm, quadform_new

__version__ = "0.1.0"
