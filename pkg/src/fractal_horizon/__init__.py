"""Box dimensions of graphs, horizons of surfaces, and the constructions around them."""
from .boxdim import (DimensionEstimate, SandwichViolation, ScaleRow, ScaleTable, box_count_graph,
                     cell_range_sum, estimate, estimate_dims, sandwich_check, scale_table)
from .constructions import (ApproximantLadder, ForcerParts, forcer, modifier, modifier_dim_check,
                            monotone_approximants, q_profile, theorem_tight_scenario)
from .experiments import LambdaSweep, horizon_property_census, probe_experiment, sum_experiment
from .generators import (GeneratorSpec, generate, midpoint_curve, midpoint_surface, monotone_curve,
                         probe_surface, takagi_curve, weierstrass_curve)
from .horizon import HorizonGapReport, horizon, horizon_algebra_check, horizon_gap
from .sampling import (NonFiniteSampleError, SampledCurve, SampledSurface, extrude, lin_comb,
                       sample_curve, sample_surface, slice_at)
from .spaces import NormReport, d_alpha_metric, lip_alpha, norm_monotonicity_check, sup_norm, v_alpha_norm

__version__ = "0.1.0"
