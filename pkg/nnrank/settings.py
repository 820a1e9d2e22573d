# subset enumeration is 2^r per query
MAX_INNER_DIMENSION = 10

# maximum number of transforms in a single ensemble (p and q caps)
MAX_ENSEMBLE_SIZE = 1024

# rationalization of numeric candidates
DEFAULT_DENOMINATOR_BOUND = 10 ** 6
MAX_DENOMINATOR_BOUND = 10 ** 12

# anchors are enumerated exhaustively up to this matrix side, sampled beyond
EXHAUSTIVE_ANCHOR_LIMIT = 8
DEFAULT_SAMPLED_ANCHORS = 16

# numeric search backend
DEFAULT_MULTISTARTS = 8
DEFAULT_BUDGET_SECONDS = 60.0
NUMERIC_MAX_ITERATIONS = 3000
NUMERIC_RESIDUAL_TOLERANCE = 1e-9
# numeric entries at most this (relative to the factor maximum) are taken as exact zeros
NUMERIC_SUPPORT_TOLERANCE = 1e-9
# column orders tried when fixing a numeric factorization exactly
MAX_COLUMN_ORDERS = 24

SEED_ENV_VARIABLE = "NNR_SEED"
