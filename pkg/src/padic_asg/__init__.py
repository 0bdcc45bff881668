"""Desk-scale machinery for the p-adic analytic subgroup theorem.

Modules: :mod:`padic` (certified p-adic numbers), :mod:`analytic` (series,
exp/log, disk norms, Schwarz check), :mod:`algebraic` (number fields,
heights), :mod:`groups` (split groups, logarithms, derivations),
:mod:`semistability`, :mod:`siegel_lattice` (LLL, Siegel's lemma, relations
among logarithms) and :mod:`auxiliary` (the auxiliary polynomial pipeline).
"""

__version__ = "0.1.0"

from .padic import PAdicNumber, PNorm, Prime, padic  # noqa: E402
from .algebraic import AlgebraicNumber, HeightValue, NumberField, weil_height  # noqa: E402
from .groups import GroupPoint, LieSubspace, SplitGroup, group_exp, group_log, is_torsion  # noqa: E402

__all__ = [
    "AlgebraicNumber", "GroupPoint", "HeightValue", "LieSubspace", "NumberField", "PAdicNumber", "PNorm",
    "Prime", "SplitGroup", "group_exp", "group_log", "is_torsion", "padic", "weil_height", "__version__",
]
