# Configuration file
import os

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

SEED = int(os.getenv("SBMRE_SEED", "20240601"))
WORKERS = int(os.getenv("SBMRE_WORKERS", "1"))
OUT_DIR = os.getenv("SBMRE_OUT_DIR", "runs")
LOG_LEVEL = os.getenv("SBMRE_LOG_LEVEL", "INFO")
CHUNK = int(os.getenv("SBMRE_CHUNK", "50"))


def get_config():
    """Returns the configuration settings."""
    return {
        "SBMRE_SEED": SEED,
        "SBMRE_WORKERS": WORKERS,
        "SBMRE_OUT_DIR": OUT_DIR,
        "SBMRE_LOG_LEVEL": LOG_LEVEL,
        "SBMRE_CHUNK": CHUNK,
    }


def env_override(name: str):
    """Returns the raw environment override for `name`, or None when unset."""
    value = os.getenv(name)
    return value if value not in (None, "") else None
