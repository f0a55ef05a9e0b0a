"""
Django settings for the gatecheck project.

gatecheck has no web surface: Django provides the management-command
framework, settings and the test runner. Everything tunable is read from the
environment (optionally via a .env file) with the GATECHECK_ prefix.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv("GATECHECK_SECRET_KEY", "gatecheck-local-only")

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "gatecheck",
]

# Commands and tests never touch a database.
DATABASES = {}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Application name
APP_NAME = "gatecheck"
APP_FULL_NAME = "gatecheck - Noisy Two-Qubit Gate Detection with Local Resources"


def _optional_int(name):
    value = os.getenv(name, "").strip()
    return int(value) if value else None


# Seed fallback for commands run without --seed. Unset means a fresh seed is
# drawn and logged for each run.
GATECHECK_SEED = _optional_int("GATECHECK_SEED")

# Shot simulation
GATECHECK_SHARDS = int(os.getenv("GATECHECK_SHARDS", "1"))
GATECHECK_BLOCK_SHOTS = int(os.getenv("GATECHECK_BLOCK_SHOTS", "100000"))

# Input-state optimiser
GATECHECK_OPTIMIZER_RESTARTS = int(os.getenv("GATECHECK_OPTIMIZER_RESTARTS", "32"))
GATECHECK_OPTIMIZER_MAXITER = int(os.getenv("GATECHECK_OPTIMIZER_MAXITER", "500"))
GATECHECK_OPTIMIZER_TOL = float(os.getenv("GATECHECK_OPTIMIZER_TOL", "1e-8"))


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "plain"},
    },
    "loggers": {
        "gatecheck": {
            "handlers": ["console"],
            "level": os.getenv("GATECHECK_LOG_LEVEL", "WARNING"),
        },
    },
}
