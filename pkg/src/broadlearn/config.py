import configparser
import logging as log
import os
from pathlib import Path
from appdirs import user_data_dir

# Multithreading
MAX_THREADS = 8

# Random basis distributions
WEIGHT_RANGE = (-1.0, 1.0)
BIAS_RANGE = (0.0, 1.0)

# Pseudoinverse regime for the BLS increments (lambda must tend to zero)
PINV_THRESHOLD = 1e-8

# C = 0 branch test: ||C||_F < ZETA_REL * max(1, ||new block||_F)
ZETA_REL = 1e-10

# Exponents below this give a zero correntropy weight
EXP_FLOOR = -700.0

# Training defaults
DEFAULT_GAMMA = 2.0**-30
DEFAULT_SIGMA = 1.0
DEFAULT_EPSILON = 1e-8
DEFAULT_MAX_ITER = 50

# Grid defaults (N_f -> q, N_w -> k, N_e -> r with m = 1)
NF_GRID = tuple(range(1, 21, 2))
NW_GRID = tuple(range(1, 21))
NE_GRID = tuple(range(1, 201, 5))
SIGMA_GRID = tuple(2.0**e for e in range(-5, 6))
MONTE_CARLO_RUNS = 20

# Incremental study: allowed gap between incremental and batch output weights
ORACLE_TOLERANCE = 1e-8

# Largest entry of (C_w R_w - I) tolerated after a weighted increment before the caches are rebuilt
CACHE_TOLERANCE = 1e-7
CACHE_CHECK_DIRECTIONS = 4

MODEL_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1

cfgpath = Path(user_data_dir("broadlearn")) / "config.ini"


def load_overrides(path: Path = None):
    """
    Reads the user configuration file, if it exists, and overrides the defaults above.

    Args:
        path (Path): The INI file to read. Defaults to the user data directory.
    """
    global MAX_THREADS, WEIGHT_RANGE, BIAS_RANGE
    path = cfgpath if path is None else path

    if Path.is_file(path):
        log.info(f"Configuration file found: {path}")
        config = configparser.ConfigParser()
        try:
            config.read(path)
            section = config["broadlearn"]
            MAX_THREADS = section.getint("max_threads", MAX_THREADS)
            WEIGHT_RANGE = (section.getfloat("weight_low", WEIGHT_RANGE[0]),
                            section.getfloat("weight_high", WEIGHT_RANGE[1]))
            BIAS_RANGE = (section.getfloat("bias_low", BIAS_RANGE[0]),
                          section.getfloat("bias_high", BIAS_RANGE[1]))
        except (configparser.Error, KeyError, ValueError) as e:
            log.warning(f"Ignoring malformed configuration file {path}: {e}")
    else:
        log.debug(f"No configuration file at {path}.")

    # Environment variable wins over the file
    threads = os.getenv("BROADLEARN_MAX_THREADS")
    if threads:
        try:
            MAX_THREADS = max(1, int(threads))
        except ValueError:
            log.warning(f"BROADLEARN_MAX_THREADS is not an integer: {threads!r}")


load_overrides()
