from .blowup import BlowupScript, Center, ScriptError, Surface, locus_inside_h, toric_script
from .lattice import PROPER, TOTAL, DivisorClass, PicLattice, afe_dominates, afe_member, zero_class
from .resolve import (
    DRatio,
    DratioUnavailable,
    FamilyDivisorReport,
    ResolvedSystem,
    delta,
    dratio,
    dratio_from_classes,
    family_divisor_check,
    family_dratio,
    merged_script,
    resolve_scripted,
    resolve_toric,
)


def to_proper(c: DivisorClass, lattice: PicLattice) -> DivisorClass:
    return lattice.to_proper(c)


def to_total(c: DivisorClass, lattice: PicLattice) -> DivisorClass:
    return lattice.to_total(c)
