"""Critical points, least critical distance and connectivity radius of convex bodies."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .geometry import (Ball, ConvexPolytope, Face, body_from_json, build_polytope,  # noqa: F401
                       contains, faces, make_ball, project_affine, search_cap, support)
from .criticality import (CriticalPoint, LcdResult, enumerate_critical_points,  # noqa: F401
                          is_critical, lcd)
from .connectivity import (ArcSet, ComponentReport, CrEstimate, SamplingParams,  # noqa: F401
                           connectivity_radius, level_arcs_2d, level_components,
                           level_components_sampled)
from .flow import WitnessDirection, push_level, radial_witness  # noqa: F401
from .harness import CampaignConfig, random_polytope, verify_campaign  # noqa: F401
