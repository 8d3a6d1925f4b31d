"""Tangent and paratangent cones of sampled subsets of R^n."""
from .catalog import build_example, catalog_names
from .cones import (ConeEstimate, ConeParams, DirectionGrid, ScaleLadder, estimate_cone,
                    estimate_cones)
from .errors import (CatalogError, ConelabError, DimensionError, EmptySetError, GradeError,
                     GraphSplitError, InsufficientDataError, PointNotOnSetError, ScaleError)
from .exterior import Blade, Subspace, blade_norm, dist_to_subspace, gram_inner, subspace_angle
from .setmodel import SampledSet, dist_query

__version__ = "0.1.0"
