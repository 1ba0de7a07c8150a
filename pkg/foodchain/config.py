import os
import logging
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load .env file from the same directory as this config.py file, unless
# FOODCHAIN_ENV_FILE points somewhere else
_config_dir = os.path.dirname(os.path.abspath(__file__))
_env_path = os.getenv('FOODCHAIN_ENV_FILE', os.path.join(_config_dir, 'foodchain.env'))
_env_loaded = load_dotenv(_env_path)


def _optional_float(name):
    raw = os.getenv(name, '')
    return float(raw) if raw.strip() else None


class Config:
    # Integrator defaults
    RTOL = float(os.getenv('FOODCHAIN_RTOL', '1e-8'))
    ATOL = float(os.getenv('FOODCHAIN_ATOL', '1e-10'))
    T_MAX = float(os.getenv('FOODCHAIN_T_MAX', '100'))
    # Unset means the 0.1/max|F| rule applies on every step
    DT_MAX = _optional_float('FOODCHAIN_DT_MAX')
    RECORD_STRIDE = int(os.getenv('FOODCHAIN_RECORD_STRIDE', '1'))

    # Reproducibility and fan-out
    SEED = int(os.getenv('FOODCHAIN_SEED', '20240101'))
    WORKERS = int(os.getenv('FOODCHAIN_WORKERS', '1'))

    # Tolerances of the algebraic checks
    TOL_ZERO = float(os.getenv('FOODCHAIN_TOL_ZERO', '1e-9'))
    TOL_DET = float(os.getenv('FOODCHAIN_TOL_DET', '1e-10'))

    OUT_DIR = os.getenv('FOODCHAIN_OUT_DIR', './out')
    LOG_LEVEL = os.getenv('FOODCHAIN_LOG_LEVEL', 'INFO').upper()

    def __init__(self):
        if _env_loaded:
            logger.debug(f"Loaded environment from {_env_path}")

    @classmethod
    def reload(cls):
        """Re-read every attribute from os.environ (tests and long-lived callers)"""
        cls.RTOL = float(os.getenv('FOODCHAIN_RTOL', '1e-8'))
        cls.ATOL = float(os.getenv('FOODCHAIN_ATOL', '1e-10'))
        cls.T_MAX = float(os.getenv('FOODCHAIN_T_MAX', '100'))
        cls.DT_MAX = _optional_float('FOODCHAIN_DT_MAX')
        cls.RECORD_STRIDE = int(os.getenv('FOODCHAIN_RECORD_STRIDE', '1'))
        cls.SEED = int(os.getenv('FOODCHAIN_SEED', '20240101'))
        cls.WORKERS = int(os.getenv('FOODCHAIN_WORKERS', '1'))
        cls.TOL_ZERO = float(os.getenv('FOODCHAIN_TOL_ZERO', '1e-9'))
        cls.TOL_DET = float(os.getenv('FOODCHAIN_TOL_DET', '1e-10'))
        cls.OUT_DIR = os.getenv('FOODCHAIN_OUT_DIR', './out')
        cls.LOG_LEVEL = os.getenv('FOODCHAIN_LOG_LEVEL', 'INFO').upper()
        return cls
