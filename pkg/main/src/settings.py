"""
Runtime settings loaded from the environment
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

RUNTIME_SETTINGS = {
    'cache_dir': os.getenv('DCDP_CACHE_DIR', '.dcdp_cache'),
    'log_file': os.getenv('DCDP_LOG_FILE', 'dcdp_bench.log'),
    'max_pairs': int(os.getenv('DCDP_MAX_PAIRS', '65536')),
}


def max_pairs() -> int:
    """Upper bound on state/input (or state/dual) pairs evaluated per vectorized block"""
    return max(1, RUNTIME_SETTINGS['max_pairs'])
