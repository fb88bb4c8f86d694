"""Slice regular functions over the quaternions, computed numerically."""

from .continuation import (
    ContinuationOptions,
    HolomorphicGerm,
    continue_along,
    continue_npart,
    log_germ,
    monodromy_gap,
    reciprocal_germ,
)
from .counterexample import CutFamily, F_plus, counterexample_report, f_cut, gamma_s, t_of
from .errors import SliceDomError
from .formulas import (
    SlicePolynomial,
    SliceValueVector,
    classical_repr,
    cr_residual,
    extend_two_slices,
    represent,
    split_value,
)
from .paths import NPartPath, PlanarPath, QPath, compose, lift
from .qlinalg import QMatrix
from .quaternion import ImaginaryUnit, Quaternion, decompose, embed, sample_sphere
from .slice_calculus import UnitMatrix, full_slice_rank, mmat, sigma, zeta
from .slice_topology import SliceSet, axially_symmetric_completion, ball, ellipse_union

__version__ = "0.1.0"

__all__ = [
    "ContinuationOptions",
    "CutFamily",
    "F_plus",
    "HolomorphicGerm",
    "ImaginaryUnit",
    "NPartPath",
    "PlanarPath",
    "QMatrix",
    "QPath",
    "Quaternion",
    "SliceDomError",
    "SlicePolynomial",
    "SliceSet",
    "SliceValueVector",
    "UnitMatrix",
    "axially_symmetric_completion",
    "ball",
    "classical_repr",
    "compose",
    "continue_along",
    "continue_npart",
    "counterexample_report",
    "cr_residual",
    "decompose",
    "ellipse_union",
    "embed",
    "extend_two_slices",
    "f_cut",
    "full_slice_rank",
    "gamma_s",
    "lift",
    "log_germ",
    "mmat",
    "monodromy_gap",
    "reciprocal_germ",
    "represent",
    "sample_sphere",
    "sigma",
    "split_value",
    "t_of",
    "zeta",
]
