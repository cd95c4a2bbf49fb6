"""
ecslab Configuration
Centralized configuration for verification, rank analysis and reporting
"""

import logging
import os

logger = logging.getLogger(__name__)

# Curvature verification configuration
VERIFY_CONFIG = {
    'bianchi_max_dimension': 5,  # Second Bianchi is spot-checked up to this n
    'check_recurrence': True,  # Ricci-recurrence and local symmetry checks
}

# Olszak rank configuration
RANK_CONFIG = {
    'dedup_rows': True,
    'rescaling_factor': (-3, 2),  # c for the kernel(cW) == kernel(W) check
}

# Sweep configuration
SWEEP_CONFIG = {
    'workers': 1,
    'show_progress': True,
}

# Report serialization
REPORT_CONFIG = {
    'indent': 2,
    'sort_keys': True,
}

# Logging configuration
LOGGING_CONFIG = {
    'level': 'INFO',
    'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    'file_handler': False,
}


def _env_workers() -> int:
    raw = os.getenv('ECSLAB_WORKERS', '')
    if not raw:
        return SWEEP_CONFIG['workers']
    try:
        workers = int(raw)
    except ValueError:
        workers = 0
    if workers < 1:
        logger.warning(f"Ignoring ECSLAB_WORKERS={raw!r}; using {SWEEP_CONFIG['workers']}")
        return SWEEP_CONFIG['workers']
    return workers


# Environment variables with defaults
def get_env_config():
    """Get configuration from environment variables with fallbacks"""
    return {
        'LOG_LEVEL': os.getenv('ECSLAB_LOG_LEVEL', LOGGING_CONFIG['level']),
        'LOG_FILE': os.getenv('ECSLAB_LOG_FILE', ''),
        'WORKERS': _env_workers(),
    }


# Combine all configurations
CONFIG = {
    'verify': VERIFY_CONFIG,
    'rank': RANK_CONFIG,
    'sweep': SWEEP_CONFIG,
    'report': REPORT_CONFIG,
    'logging': LOGGING_CONFIG,
    'env': get_env_config(),
}
