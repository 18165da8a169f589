from .family import INF, DeclaredRatio, Generator, MapFamily, family_from_json, format_ratio, load_family, parse_ratio
from .points import AffPoint, ProjPoint, aff, affine_to_proj, format_point, parse_point
from .rational_map import (
    AffineMap,
    RationalMapP,
    compose,
    evaluate_affine,
    homogenize_affine,
    indeterminacy_monomial,
    power_map,
    subspace_witness,
)
from .regularity import (
    RegularityVerdict,
    default_cap,
    find_witness,
    is_morphism,
    joint_regularity,
    monomial_common_locus,
    saturation_degree,
)


def evaluate(f: RationalMapP, P: ProjPoint) -> ProjPoint | None:
    return f.evaluate(P)
