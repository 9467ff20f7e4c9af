"""Exact geometry of PSL2(Z[1/p]) acting on H^2 x T_p."""

from .arith import INFINITY, LogDist, Q, abs_p, logdist_combine, val_p
from .bscomplex import BsWord, UpperBoundaryPoint, bs_commensurable, horostrip_width, phi_embed, upper_boundary_distance
from .commensurator import conjugate, denominator_profile, diagonal_rescaler, transporter
from .horosphere import Horosphere, closeness_line, fiber, fiber_distance, growth_profile
from .hyperbolic import OVERLAP, Horoball, base_horoball, horoball_distance, horoball_image
from .matrix import INF, ProjMatrix, mobius_point
from .rigidity import (
    Parallelogram,
    TabulatedMap,
    Window,
    delta_H,
    diam,
    extract_affine,
    fundamental_set,
    is_parallelogram,
    per,
    qie_check,
    s_threshold,
    scale_act,
    shape,
    verify_plemma,
)
from .tree import BruhatTitsTree, TreeLine, TreeVertex, mobius_end

__version__ = "0.1.0"
