"""Multiplicities of dihedral fields of degree 2p over quadratic fields."""

from fractions import Fraction

from . import _dihedral
from ._dihedral import (
    InvalidInput,
    InvariantViolation,
    SearchExhausted,
    Unsupported,
    class_group,
    defect,
    dihedral_discriminant,
    first_free_conductor,
    fundamental_unit,
    general_multiplicity,
    irregular_survey,
    is_fundamental,
    kronecker,
    minimal_discriminant,
    multiplet_census,
    p_rank,
    rank_frequencies,
    real_class_number,
    ring_class_rank,
    ring_space,
    rqc_defect,
    selmer_basis,
    selmer_generator,
    unit_index,
)


def multiplicity(d, p, c):
    """Breakdown of m_p(d, c); R is returned as a Fraction."""
    out = _dihedral.multiplicity(d, p, c)
    out["R"] = Fraction(*out["R"])
    return out


def restrictive_factor(p, v, occupations):
    return Fraction(*_dihedral.restrictive_factor(p, v, list(occupations)))


__all__ = [name for name in dir() if not name.startswith("_")]
