"""Exact entropy accounting for the diagonal masking family over GF(p^m).

For f: GF(q)^n -> GF(q)^n the family is g_k(x) = f(x) + k*x with the
coordinate-wise product k*x.  The package computes exact (rational)
collision probabilities and entropy averages over uniform masks,
verifies the collision and entropy bounds with their equality cases,
and provides exhaustive, random and search campaigns over base
functions.
"""

from maskent._backend import BACKEND, available_backends
from maskent.dist import (
    ExactDistribution,
    collision_probability,
    distribution_of,
    float15,
    min_entropy,
    rational_from_str,
    rational_str,
    renyi2_entropy,
    shannon_entropy,
)
from maskent.family import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    FamilyBounds,
    FunctionTable,
    ImageStats,
    MaskStats,
    PreimageProfile,
    ShellTerm,
    TheoremReport,
    TightnessPrediction,
    average_bounds,
    coordinatewise_table,
    diagonal_quadratic,
    family_averages,
    image_stats,
    is_coordinatewise,
    joint_collision,
    masked_table,
    preimage_profile,
    resolve_budget,
    shell_decomposition,
    square_family,
    tightness_predictions,
    total_weight,
    vector_code,
    vector_from_code,
)
from maskent.gf import (
    FieldSpec,
    FieldVector,
    build_field,
    field_for_order,
    field_to_json_dict,
    hamming_distance,
    hamming_weight,
    mask_product,
    prime_power_parts,
    vector_add,
    zero_vector,
)
from maskent.verify import (
    CampaignConfig,
    CampaignResult,
    InstanceRow,
    exhaustive_campaign,
    hillclimb_search,
    instance_violations,
    random_campaign,
    random_table,
    tightness_violations,
    verify_instance,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceededError",
    "CampaignConfig",
    "CampaignResult",
    "DEFAULT_BUDGET",
    "ExactDistribution",
    "FamilyBounds",
    "FieldSpec",
    "FieldVector",
    "FunctionTable",
    "ImageStats",
    "InstanceRow",
    "MaskStats",
    "PreimageProfile",
    "ShellTerm",
    "TheoremReport",
    "TightnessPrediction",
    "available_backends",
    "average_bounds",
    "build_field",
    "collision_probability",
    "coordinatewise_table",
    "diagonal_quadratic",
    "distribution_of",
    "exhaustive_campaign",
    "family_averages",
    "field_for_order",
    "field_to_json_dict",
    "float15",
    "hamming_distance",
    "hamming_weight",
    "hillclimb_search",
    "image_stats",
    "instance_violations",
    "is_coordinatewise",
    "joint_collision",
    "mask_product",
    "masked_table",
    "min_entropy",
    "preimage_profile",
    "prime_power_parts",
    "random_campaign",
    "random_table",
    "rational_from_str",
    "rational_str",
    "renyi2_entropy",
    "resolve_budget",
    "shannon_entropy",
    "shell_decomposition",
    "square_family",
    "tightness_predictions",
    "tightness_violations",
    "total_weight",
    "vector_add",
    "vector_code",
    "vector_from_code",
    "verify_instance",
    "zero_vector",
    "__version__",
]
