"""Finite-dimensional renorming workbench.

Equivalent norms on R^n with a prescribed finite isometry group (pimple
norms over a separated point family), certified gauge evaluation,
isometry-group verification, finite group representations and complex
structures.
"""
from .config import DEFAULT, Config
from .errors import (ArgumentError, ConstructionError, GroupError, OracleError, RenormError,
                     ScheduleError, SchemaError, SeparationError, SolverError, SpecError)
from .norms import (Day, Euclidean, GAverage, L2Sum, MaxSeminorms, Norm, ScaledSum, SumSquares,
                    WeightedLp, check_norm_axioms, eval_norm, gauge_from_membership, lur_modulus)
from .matrix_groups import FiniteMatrixGroup, group_closure, groups_isomorphic
from .pimple import (PimpleNorm, PimpleSpec, eval_pimple, evaluate_batch, pimple_norm,
                     schedule_parameters, tips, validate_spec)
from .orbit import PointFamily, build_point_family, separation_constant, trisect_select
from .isometry import (RotationCircle, enumerate_tip_candidates, falsify_search,
                       isometry_group_report, verify_isometry)
from .complex_structures import (complex_structure_report, complexify_norm, kalton_projections,
                                 l2_canonical_form)
from .group_rep import GroupTable, classical_rep, coset_split, fini_rep, named_group
from .render import render_ball_2d

__version__ = "0.1.0"
