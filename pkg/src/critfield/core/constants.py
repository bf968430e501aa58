"""Shared numerical constants for critfield."""

import math

# Regime classification: |kappa'(1) - 1| below this is the sparse regime
REGIME_TOLERANCE = 1e-9

# Hermite series of the one-layer kernel
DEFAULT_HERMITE_ORDER = 200
MAX_HERMITE_ORDER = 1600
DEFAULT_HERMITE_NODES = 200
MAX_HERMITE_NODES = 3200
HERMITE_RELATIVE_TOL = 1e-10
SECOND_MOMENT_RELATIVE_TOL = 1e-8
SERIES_TAIL_TOL = 1e-10
# Relative tolerance of the identities checked on every built kernel
KERNEL_IDENTITY_TOL = 1e-8

# Angular power spectrum
SPECTRUM_QUAD_TOL = 1e-7
SPECTRUM_EPS = 1e-8
SPECTRUM_MIN_NODES = 5000
SPECTRUM_PANEL_NODES = 32
SPECTRUM_POLAR_LEVELS = 30
TRUNCATION_WARNING_LEVEL = 0.99

# Monte Carlo
DEFAULT_MC_SAMPLES = 1_000_000
MIN_MC_SAMPLES = 1000
MC_CHUNK_SIZE = 50_000

# Threshold sentinels: 1 - Phi(-12) == 1 in double precision
THRESHOLD_MINUS_INF = -12.0

# Grids
HEALPIX_MAX_ORDER = 13
ICOSPHERE_MAX_SUBDIVISIONS = 9

# Frame covariance oracle
FRAME_STEP = 1e-3
MIN_FRAME_SAMPLES = 1000

# Gaussian activation parameters of the three disorder regimes (a squared)
LOW_DISORDER_A2 = 1.0
SPARSE_A2 = 1.0 + math.sqrt(2.0)
HIGH_DISORDER_A2 = 9.0
