"""This module contains configuration constants used across the framework"""

# The number of times word extraction is retried with doubled sample counts.
MAX_RETRY_COUNT = 5

# Environment variable selecting the log level (TRACE, INFO or ERROR).
LOG_ENV_VAR = "LINKFORGE_LOG"
DEFAULT_LOG_LEVEL = "INFO"
LOGGER_NAME = "linkforge"

# Trigonometric polynomials
ROOT_TOLERANCE = 1e-10
TANGENCY_TOLERANCE = 1e-7
INTERPOLATION_RESIDUAL = 1e-9
ROOT_SCAN_SAMPLES = 4096
# Samples per unit of degree when the scan has to be finer than ROOT_SCAN_SAMPLES.
ROOT_SCAN_DENSITY = 64
TRUNCATION_TOLERANCE = 1e-12
REALNESS_TOLERANCE = 1e-10

# Braid invariants
MAX_STATE_SUM_CROSSINGS = 24

# Step 1 layout: lanes of a crossing are pulled towards each other by this much.
LANE_OFFSET = 0.25

# Step 2 genericity
MERGE_TOLERANCE = 1e-7
EPSILON_START_FRACTION = 1 / 8
EPSILON_FLOOR = 1e-12
MAX_GENERICITY_PASSES = 64
# Crossings closer than this to a multiple of pi trigger the global shift.
MIN_CROSSING_CLEARANCE = 0.05
# Offset used to order the participants of a crossing just before it happens.
ORDER_OFFSET = 1e-5

# Steps 3-6
SIDE_OFFSET_FRACTION = 0.1
MAX_SIDE_HALVINGS = 20

# Verification
RESIDUAL_TOLERANCE = 1e-10
SEPARATION_FACTOR = 1e-8
ROOT_ITERATION_CAP = 200
RADIUS_START = 0.2
RADIUS_FLOOR = 1e-4
# Largest relative weight r^(m-2ks) of the A-term that the radius schedule accepts.
MAX_RESOLVING_WEIGHT = 1e-3
DEFAULT_SAMPLES = 512
MAX_REFINEMENT_DEPTH = 30
BISECTION_STEPS = 60
# Extracted crossings must lie this close (in t) to a predicted crossing time.
SCHEDULE_TOLERANCE = 1e-3
# Number of points kept per strand when a trajectory is stored in the trace.
TRAJECTORY_POINTS = 400

# Artifacts
POLYNOMIAL_FILE = "polynomial.json"
TRACE_FILE = "trace.json"
INPUT_DIAGRAM_FILE = "input_braid.svg"
SINGULAR_DIAGRAM_FILE = "singular_braid.svg"
TRAJECTORY_FILE = "trajectories.svg"
