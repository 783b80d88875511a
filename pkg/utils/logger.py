import logging
import os
from datetime import datetime

from utils import config

# Create logs directory if it doesn't exist
if not os.path.exists(config.LOG_DIR):
    os.makedirs(config.LOG_DIR)

log_filename = os.path.join(
    config.LOG_DIR,
    f"geodesic_engine_{datetime.now().strftime('%d%m%Y_%H%M')}.log"
)

_formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')

_file_handler = logging.FileHandler(log_filename)
_file_handler.setLevel(logging.INFO)
_file_handler.setFormatter(_formatter)

# stdout carries JSON/CSV, so the console only gets warnings (on stderr)
_console_handler = logging.StreamHandler()
_console_handler.setLevel(logging.WARNING)
_console_handler.setFormatter(_formatter)

logger = logging.getLogger("geodesic_engine")
logger.setLevel(logging.INFO)
if not logger.handlers:
    logger.addHandler(_file_handler)
    logger.addHandler(_console_handler)
logger.propagate = False

# Basic log functions
def log_info(message: str):
    """Log an info message."""
    logger.info(message)

def log_error(message: str):
    """Log an error message."""
    logger.error(message)

def log_warning(message: str):
    """Log a warning message."""
    logger.warning(message)

def log_debug(message: str):
    """Log a debug message."""
    logger.debug(message)

# Custom loggers
def log_integration(profile_kind: str, accepted: int, rejected: int, drift: float, elapsed: float):
    """Log the outcome of one trajectory integration."""
    log_info(
        f"Integration: {profile_kind} | Steps: {accepted} accepted / {rejected} rejected | "
        f"Energy drift: {drift:.3e} | Time: {elapsed:.2f}s"
    )

def log_solver(kind: str, families: int, elapsed: float):
    """Log a closed-form solver run."""
    log_info(f"Solver: {kind} | Families: {families} | Time: {elapsed:.2f}s")

def log_check(name: str, value: float, tolerance: float, passed: bool):
    """Log one verify-suite check."""
    status = "PASS" if passed else "FAIL"
    message = f"Check: {name} | Max residual: {value:.3e} | Tol: {tolerance:.1e} | {status}"
    if passed:
        log_info(message)
    else:
        log_warning(message)

def log_command(command: str, exit_code: int):
    """Log a CLI command and its exit code."""
    log_info(f"Command: {command} | Exit code: {exit_code}")
