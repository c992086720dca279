# Settings come from the environment or a local .env file.
import os

from dotenv import load_dotenv

load_dotenv()

SEARCH_CAP = int(os.getenv("THETA_KIT_SEARCH_CAP", "16"))
ORACLE_VERTEX_CAP = int(os.getenv("THETA_KIT_ORACLE_VERTEX_CAP", "14"))
DEFAULT_SEED = int(os.getenv("THETA_KIT_SEED", "0"))
LOG_LEVEL = os.getenv("THETA_KIT_LOG_LEVEL", "INFO")
OUTPUT_FORMAT = os.getenv("THETA_KIT_OUTPUT_FORMAT", "json")
BATCH_CONCURRENCY = int(os.getenv("THETA_KIT_BATCH_CONCURRENCY", "4"))
SELF_VERIFY = os.getenv("THETA_KIT_SELF_VERIFY", "false").lower() in ("1", "true", "yes")
GENERATOR_MAX_ATTEMPTS = int(os.getenv("THETA_KIT_GENERATOR_MAX_ATTEMPTS", "200"))
