import math
import os


# ============================================================================
# Logging
# ============================================================================

# Root log level used by the CLI (DEBUG, INFO, WARNING, ERROR)
LOG_LEVEL = os.getenv("WCINDEX_LOG_LEVEL", "WARNING").upper()

# Same format everywhere: time, logger, level, message
LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"

# ============================================================================
# Index Construction
# ============================================================================

# Group structure sampling level: "full", "compact" or "sampled"
DEFAULT_SAMPLING = os.getenv("WCINDEX_SAMPLING", "full").strip().lower()

# Keep every s-th suffix array / inverse entry (1 = keep all)
DEFAULT_SA_SAMPLE_RATE = int(os.getenv("WCINDEX_SA_SAMPLE_RATE", "1"))

# Upper bound on nodes accepted by the compact topology encoding
MAX_GROUP_NODES = int(os.getenv("WCINDEX_MAX_GROUP_NODES", "65536"))

# Verify wildcard-tree pointers while building, assert group containment while querying
DEBUG_VERIFY = os.getenv("WCINDEX_DEBUG_VERIFY", "0").strip() in ("1", "true", "yes")

# ============================================================================
# Oracles / Verification
# ============================================================================

# Largest sigma^g accepted by the enumeration oracle
ENUMERATE_BUDGET = int(os.getenv("WCINDEX_ENUMERATE_BUDGET", "1000000"))

# Default seed for verify and bench
DEFAULT_SEED = int(os.getenv("WCINDEX_SEED", "42"))

# Default number of worker processes for verify
DEFAULT_WORKERS = int(os.getenv("WCINDEX_WORKERS", "1"))

# Sizes used by bench when none are given
BENCH_SIZES = tuple(int(x) for x in os.getenv("WCINDEX_BENCH_SIZES", "1024,16384,262144").split(","))

# ============================================================================
# Size-dependent defaults
# ============================================================================


def _loglog(n: int) -> int:
    if n < 4:
        return 1
    return max(1, math.ceil(math.log2(max(2.0, math.log2(n)))))


def default_tau(n: int, sigma: int) -> int:
    return max(2, sigma * math.ceil(math.log2(max(n, 2))) ** 2)


def default_lambda(n: int) -> int:
    return max(2, _loglog(n))


def default_c_d(n: int) -> int:
    return max(2, _loglog(n) ** 2)


def default_c_h(n: int) -> int:
    return max(2, _loglog(n))


def default_micro_block(n: int) -> int:
    return max(2, _loglog(n))
