"""Configuration defaults for Thiele."""

# Solver grid: monthly / 100
DEFAULT_STEP = 1.0 / 1200.0

# Relative tolerance when checking that a span is a whole number of steps
GRID_TOLERANCE = 1e-9

# Exponential-family intensities are capped at this level (per year)
DEFAULT_INTENSITY_CAP = 1e6

# Relative tolerance for "immediate gain equals continuation value"
TIE_TOLERANCE = 1e-12

# Fixed-point residual of a behavioural reserve, relative to the terminal benefit
CONSISTENCY_TOLERANCE = 1e-4

# Free-policy surface: one conversion node every this many solver steps
DEFAULT_SURFACE_STRIDE = 12

# Gains (money) at which the sweep conditions are checked
CONDITION_GAINS = (1e3, 1e4, 1e5)

# Monte Carlo defaults
DEFAULT_MC_PATHS = 100_000
DEFAULT_MC_BATCH = 250_000
DEFAULT_MC_WORKERS = 1
DEFAULT_SEED = 20_240_601
DEFAULT_MC_TIME_STEP = 1.0 / 1200.0
# Thinning envelope blocks, in years
DEFAULT_ENVELOPE_BLOCK = 0.25

# Output
DEFAULT_OUTPUT_DIR = "results"
CSV_FLOAT_FORMAT = "%.10g"

# Default sweeps: indicator theta is per year, exponential theta per unit of money
DEFAULT_SWEEP_THETAS = (0.5, 1.0, 2.0, 5.0, 10.0)
DEFAULT_EXPONENTIAL_SWEEP_THETAS = (1e-6, 3e-6, 1e-5, 3e-5)
