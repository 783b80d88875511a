
import numpy as np

# Finite differences
MACHINE_EPS = float(np.finfo(float).eps)
FD_STEP_SCALE = MACHINE_EPS ** (1.0 / 3.0)  # central differences, one Richardson level
HESSIAN_STEP_SCALE = MACHINE_EPS ** (1.0 / 6.0)  # second differences, one Richardson level

# Tolerance tiers
SINGLE_FD_TOL = 1e-6
NESTED_FD_TOL = 1e-5
SYMMETRY_TOL = 1e-12
FAMILY_RESIDUAL_TOL = 1e-10
TRAJECTORY_RESIDUAL_TOL = 1e-8
STEP_HALVING_FACTOR = 10.0  # FD tensors may change by at most this times their tier tolerance when h -> h/2

# Integrator defaults
INTEGRATOR_METHOD = "dopri54"  # Options: "dopri54", "rk4"
REL_TOL = 1e-10
ABS_TOL = 1e-12
MAX_STEP = 0.5
SAMPLE_EVERY = 0.1
STEP_UNDERFLOW_FACTOR = 1e-14
SAFETY = 0.9
PI_BETA = 0.04

# Root finding
ROOT_GRID_POINTS = 1024
BISECTION_XTOL = 1e-12
BISECTION_MAXITER = 200
DEFAULT_BRACKET = (0.1, 10.0)

# Verify suite
VERIFY_SEED = 42
VERIFY_INVERSE_POINTS = 1000
VERIFY_HESSIAN_POINTS = 500
VERIFY_CONNECTION_POINTS = 200
VERIFY_METRICITY_POINTS = 100
VERIFY_HALVING_POINTS = 8
VERIFY_DYNAMICS_ICS = 20
VERIFY_ROTATIONS = 20

# Output
CSV_FLOAT_FORMAT = "%.17g"
TRAJECTORY_COLUMNS = ["t", "x1", "x2", "x3", "v1", "v2", "v3", "energy"]
SVG_HASH_SALT = "anisotropic-optics"

LOG_DIR = "logs"
