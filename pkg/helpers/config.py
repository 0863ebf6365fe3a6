"""Module for general configurations of the toolkit"""

import os

from dotenv import load_dotenv

load_dotenv()

# ----------------------
# Resource budgets
# ----------------------
NODE_LIMIT = int(os.getenv("FAMILY_NODE_LIMIT", "2000000"))
TIME_LIMIT = float(os.environ["FAMILY_TIME_LIMIT"]) if os.getenv("FAMILY_TIME_LIMIT") else None
GC_RATIO = float(os.getenv("FAMILY_GC_RATIO", "0.75"))  # collect when live table crosses this share of NODE_LIMIT
TIME_CHECK_INTERVAL = 1024  # node allocations between wall-clock checks
APPLY_CACHE_LIMIT = 1_000_000

# ----------------------
# Reordering
# ----------------------
MAX_GROWTH = float(os.getenv("FAMILY_MAX_GROWTH", "1.2"))
SIFT_PASSES = 1

# ----------------------
# Semantics
# ----------------------
PROBABILITY_TOLERANCE = 1e-9
ORACLE_TOLERANCE = 1e-12
EXPLICIT_BOUND = int(os.getenv("FAMILY_EXPLICIT_BOUND", "100000"))

# ----------------------
# Iteration and comparison
# ----------------------
DEFAULT_HEURISTIC = "pi-min"
DEFAULT_STEP = 1
COMPARE_SELECTIONS = ("pi-min", "rho-min", "rho-max")
COMPARE_STEPS = (1, 2, 3, 4)
COMPARE_DEADLINE = 1200.0  # seconds, the 20 minute snapshot
WORKERS = int(os.getenv("FAMILY_WORKERS", str(os.cpu_count() or 1)))

# ----------------------
# Family generator
# ----------------------
MECHANISMS = ("none", "comparison", "voting")
MECHANISM_CODES = {"none": 0, "comparison": 1, "voting": 2}

# ----------------------
# Reports
# ----------------------
ITERATION_HEADER = (
    "iteration",
    "combinations",
    "states",
    "nodes_before",
    "nodes_after",
    "model_time_s",
    "reorder_time_s",
)
COMPARE_HEADER = ("selection", "step", "iterations", "combinations", "states", "nodes")

# ----------------------
# Logging
# ----------------------
LOG_LEVEL = os.getenv("FAMILY_LOG_LEVEL", "INFO")

# ----------------------
# Exit codes
# ----------------------
EXIT_OK = 0
EXIT_PROCESS_ERROR = 1
EXIT_PARSE_ERROR = 3
EXIT_NODE_LIMIT = 4
EXIT_TIME_LIMIT = 5
EXIT_CONSTRUCTION_FAILED = 6
EXIT_BUSINESS_ERROR = 7
