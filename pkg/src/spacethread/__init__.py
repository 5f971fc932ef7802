"""Threading decomposition of spacetimes with respect to a timelike vector
field: kinematics, spatial connection, curvature, Raychaudhuri-type
identities and geodesics, checked against brute-force 4D curvature."""

from .catalog import CATALOG, catalog_lookup, random_quadratic, sample_box, sample_points
from .connection import (Curvature, CurvatureBundle, SpatialConnection, covariant_derivative_spatial,
                         covariant_derivative_time, curvature, curvature_bundle, levi_civita_table,
                         spatial_connection)
from .errors import (DomainError, EvalError, HypothesisViolated, MissingParam, NoBlowup,
                     ParseError, SingularMetric, SpatialGeodesic, StepFailure, ThreadingError,
                     UnknownMetric)
from .frame import (KinematicState, ThreadingGeometry, ThreadingVector, coordinate_to_threading,
                    geometry, kinematics, spatial_metric)
from .geodesics import (GeodesicState, Trajectory, force3, force_identity_residual,
                        geodesic_locus_check, initial_state, integrate, motion_rhs)
from .metric import MetricSample, MetricSpec, eval_sample, load_spec, validate_spec
from .raychaudhuri import (FocusingScenario, focusing_classify, focusing_evolve, kinematic_rates,
                           raychaudhuri_residual)
from .verify import verify_metric

__version__ = "0.1.0"
