"""Plants, nominal controllers and comparators addressable by name."""

from regtrig.systems.base import (
    DisturbanceSpec,
    LtiSpec,
    NominalController,
    PlantCatalogEntry,
    PlantModel,
)
from regtrig.systems.catalog import (
    SystemCatalog,
    describe_systems,
    get_system,
    list_systems,
    register_system,
    unregister_system,
)
from regtrig.systems.disturbed import (
    ExtendedMatchingController,
    ExplicitScalarAccumulator,
    comparator_extended_matching,
    example_disturbed,
    scalar_double_integral_block,
)
from regtrig.systems.lti import LtiAccumulator, affine_lti_spec, example_lti, scalar_lti_spec
from regtrig.systems.planar import example_planar

__all__ = [
    "DisturbanceSpec",
    "ExtendedMatchingController",
    "LtiAccumulator",
    "LtiSpec",
    "NominalController",
    "PlantCatalogEntry",
    "PlantModel",
    "ExplicitScalarAccumulator",
    "SystemCatalog",
    "affine_lti_spec",
    "comparator_extended_matching",
    "describe_systems",
    "example_disturbed",
    "example_lti",
    "example_planar",
    "get_system",
    "list_systems",
    "register_system",
    "scalar_lti_spec",
    "scalar_double_integral_block",
    "unregister_system",
]
