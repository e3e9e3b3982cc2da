# constants.py
from fractions import Fraction
from pathlib import Path

### Version
VERSION = "0.4.0"

### Paths
PATH_APP_CONFIG = Path(__file__).parent / "config"
PATH_USER_CONFIG = Path("~/.config/com.fixsplit/").expanduser().resolve()

# Files
FNAME_APPLICATION_SCHEMA = "fixsplit_config_schema.yaml"
FNAME_APPLICATION_CONFIG = "fixsplit_config.yaml"

FNAME_TREE = "tree.json"
FNAME_AUDIT = "audit_summary.json"
FNAME_VALIDATION = "validation.json"
FNAME_PARTNERS = "partners.json"
FNAME_TWISTS = "twists.json"
FNAME_DIRECTIONS = "directions.json"
FNAME_SIMULATION = "simulation.json"
FNAME_TRAJECTORY = "trajectory.csv"
FNAME_OCCUPANCY = "occupancy.csv"
FNAME_PATH_TEMPLATE = "path_{leaf:05d}.csv"

# Dict keys
KEY_APPLICATION_SCHEMA = 'main'
KEY_BUDGET_SCHEMA = 'budget'

# Schema versions written into artifacts
SCHEMA_SPLITTING = "splitting-v1"
SCHEMA_TREE = "tree-v1"
SCHEMA_PATH_REPORT = "path-report-v1"

### CSV columns
PATH_CSV_COLUMNS = ["n", "k", "hn", "an", "partial_sum", "area1", "area2", "|w|"]
TRAJECTORY_CSV_COLUMNS = ["time", "chart", "x", "y"]
OCCUPANCY_CSV_COLUMNS = ["dx", "dy", "region", "mean", "min", "max", "std", "area_fraction"]

### Logging
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(module)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LOG_LEVEL = "WARNING"

### Numerics
MAX_FIELD_DEGREE = 4
FLOAT_SIGN_TOLERANCE = 1e-12
FLOAT_RATIONAL_MAX_DENOMINATOR = 10**4
# bisection steps applied to a root interval before the first sign attempt
INITIAL_REFINEMENT = 64
REFINEMENT_STEP = 32
MAX_DESCENT_STEPS = 100000

### Twists and partners
MAX_TWIST = 9
GOOD_PARTNER_RATIO = Fraction(1, 36)

### Surface tracing
SNAP_TOLERANCE = 1e-9
CLOSURE_TOLERANCE = 1e-9
STALL_LIMIT = 1000
# relative slack for float heights against their bounds in path audits
HEIGHT_SLACK = 1e-9
# shortest flat step that counts as progress
STEP_RESOLUTION = 1e-12
MAX_SLIT_PIECES = 200000

### Exit codes
EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_GUARANTEE = 4
EXIT_NUMERICAL = 5
