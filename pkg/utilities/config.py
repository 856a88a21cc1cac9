# Configuration Settings

import os
from fractions import Fraction

# ENGINE DEFAULTS
DEFAULT_ORDER_FACTOR = 2   # N = 2k when no order is given
DEFAULT_GENFUN_ORDER = 8   # s-order M of the generating-series check
DEFAULT_JOBS = 1

# LOGGING
LOG_ENV_VAR = "SEGRE_AVERAGE_LOG"
LOG_LEVEL = os.environ.get(LOG_ENV_VAR, "info").strip().lower()
LOG_BUFFER_SIZE = 300

# NUMERIC ORACLE
ORACLE_TOLERANCE = 1e-9
ORACLE_ABS_FLOOR = 1e-12
ORACLE_POINTS = 20
ORACLE_RADIUS = Fraction(1, 4)
ORACLE_DENOMINATOR = 64    # sample coordinates are multiples of 1/64
ORACLE_SEED = 1729

# REPORTS
JSON_INDENT = 2
SERIES_FILE_SUFFIX = ".series"

# EXIT CODES
EXIT_OK = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
