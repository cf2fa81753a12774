import os

from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
OUTPUT_DIR = os.getenv("OUTPUT_DIR", "runs")
THREADS = int(os.getenv("THREADS", "1"))
MODEL_CACHE_SIZE = int(os.getenv("MODEL_CACHE_SIZE", "65536"))
VALUE_CACHE_SIZE = int(os.getenv("VALUE_CACHE_SIZE", "262144"))

# Published settings for the image-scale experiments.
EXPLAINER_LR = 2e-4
SERVICE_LR_PUBLISHED = 1e-4
BETA = 10.0
K = 10

# Desk-scale service model defaults (logistic / one-hidden-layer MLP).
SERVICE_LR = 0.1
SERVICE_EPOCHS = 300
SERVICE_BATCH_SIZE = 64
CONVERGENCE_TOL = 1e-5
CONVERGENCE_WINDOW = 5

EXPLAINER_HIDDEN_UNITS = 64
EXPLAINER_BATCH_SIZE = 32
EXPLAINER_STEPS = 2000

# Largest game enumerated exhaustively (2**20 coalitions).
MAX_ENUMERATION_PLAYERS = 20

# Sampled orderings behind the oracle subcommand's TMC column.
ORACLE_PERMUTATIONS = 200

EMPTY_COALITION_NOTE = "uniform predictor, v(empty) = 1/m"

VALUATION_METHODS = ("exact", "loo", "tmc", "cwls", "fds", "afds", "gfds", "gfds+", "random")
EXPLAINER_METHODS = ("fds", "afds", "gfds", "gfds+")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_CAPACITY_ERROR = 3
