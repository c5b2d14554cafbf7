"""
Settings loader for the risk scoring engine
Reads config/settings.yaml and merges it over built-in defaults.
"""
import copy
import logging
import os
import sys
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS_PATH = os.path.join(os.path.dirname(__file__), '..', '..', 'config', 'settings.yaml')

DEFAULT_SETTINGS: Dict[str, Any] = {
    'engine': {
        'resolution': 1001,
    },
    'fahp': {
        'cr_threshold': 0.10,
        'cr_mode': 'eigen',
        'power_iteration': {
            'tolerance': 1e-10,
            'max_iterations': 10000,
        },
        'random_index': {
            1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12,
            6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49,
        },
    },
    'analysis': {
        'seed': 42,
        'rng': 'PCG64',
        'no_fire_erm': 0.0,
        'oat': {'steps': 100},
        'rule_cf': {'steps': 50},
        'antecedent': {'steps': 50},
        'tornado': {'levels': [0.1, 0.2, 0.3, 0.5]},
        'monte_carlo': {
            'n': 500,
            'sigma': 0.2,
            'min_entry': 0.01,
            'weight_method': 'eigen',
        },
        'sobol': {
            'n_base': 1024,
            'num_resamples': 100,
            'conf_level': 0.95,
        },
        'axioms': {
            'probes': 100,
            'tolerance': 1e-12,
        },
    },
    'logging': {
        'level': 'INFO',
        'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        'files': {'main': None},
    },
}


def _merge_config(base_config: dict, new_config: dict):
    """Recursively merge configuration dictionaries"""
    for key, value in new_config.items():
        if key in base_config and isinstance(base_config[key], dict) and isinstance(value, dict):
            _merge_config(base_config[key], value)
        else:
            base_config[key] = value


def load_settings(path: Optional[str] = None, overrides: Optional[dict] = None) -> Dict[str, Any]:
    """Load settings YAML merged over the defaults, then apply overrides"""
    settings = copy.deepcopy(DEFAULT_SETTINGS)
    settings_path = path or os.environ.get('RISKSCORE_SETTINGS', DEFAULT_SETTINGS_PATH)

    if os.path.exists(settings_path):
        with open(settings_path, 'r', encoding='utf-8') as f:
            loaded = yaml.safe_load(f) or {}
        _merge_config(settings, loaded)
    else:
        logger.warning(f"Settings file not found, using defaults: {settings_path}")

    if overrides:
        _merge_config(settings, overrides)

    # YAML may hand back string keys for the RI table
    settings['fahp']['random_index'] = {
        int(n): float(ri) for n, ri in settings['fahp']['random_index'].items()
    }
    return settings


def configure_logging(settings: Dict[str, Any]):
    """Install stderr and optional file handlers from the logging section"""
    log_config = settings.get('logging', {})
    handlers = [logging.StreamHandler(sys.stderr)]

    log_file = (log_config.get('files') or {}).get('main')
    if log_file:
        os.makedirs(os.path.dirname(log_file) or '.', exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, str(log_config.get('level', 'INFO')).upper(), logging.INFO),
        format=log_config.get('format', DEFAULT_SETTINGS['logging']['format']),
        handlers=handlers,
        force=True,
    )
