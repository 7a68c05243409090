# system_config.py - Solver and Harness Configuration
"""
Environment-driven settings for the numerical solvers and the experiment
harness. Values can be placed in a .env file; presets pick the repeat counts
and Monte Carlo sizes used by the studies.
"""

import os
import logging
from typing import Dict, Any

import numpy as np

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    logging.getLogger(__name__).debug("python-dotenv not installed; reading plain environment only")

class SystemConfig:
    """Solver tolerances, parallelism and study presets"""

    def __init__(self):
        # =============================================================================
        # DUAL (NEWTON) SOLVER
        # =============================================================================
        self.newton_max_iter = int(os.getenv('UQ_NEWTON_MAX_ITER', 100))
        self.newton_tol = float(os.getenv('UQ_NEWTON_TOL', 1e-12))
        self.lambda_cap = float(os.getenv('UQ_LAMBDA_CAP', 1e8))
        self.max_halvings = int(os.getenv('UQ_MAX_HALVINGS', 60))
        self.vertex_tol = float(os.getenv('UQ_VERTEX_TOL', 1e-12))

        # =============================================================================
        # LINEAR ALGEBRA
        # =============================================================================
        self.apc_max_degree = int(os.getenv('UQ_APC_MAX_DEGREE', 12))
        self.gram_cond_limit = float(os.getenv('UQ_GRAM_COND_LIMIT', 1.0 / (1e3 * np.finfo(float).eps)))
        self.gram_jitter_scale = float(os.getenv('UQ_GRAM_JITTER', 1e-12))

        # =============================================================================
        # HARNESS
        # =============================================================================
        self.parallel_enabled = self._get_bool_env('UQ_PARALLEL', True)
        self.max_workers = int(os.getenv('UQ_MAX_WORKERS', 4))
        self.output_dir = os.getenv('UQ_OUTPUT_DIR', 'results')
        self.default_seed = int(os.getenv('UQ_DEFAULT_SEED', 20240601))
        self.log_level = os.getenv('UQ_LOG_LEVEL', 'INFO').upper()

        # =============================================================================
        # STUDY PRESETS
        # =============================================================================
        self.sample_study_repeats = 100
        self.monte_carlo_samples = 50_000
        self.preset = os.getenv('UQ_PRESET', 'quick').lower()
        self._apply_preset(self.preset)

    def _get_bool_env(self, key: str, default: bool = False) -> bool:
        """Get boolean environment variable"""
        value = os.getenv(key, str(default)).lower()
        return value in ('true', '1', 'yes', 'on', 'enabled')

    def _apply_preset(self, preset: str):
        """Apply study preset"""

        if preset == 'smoke':
            # CI-sized runs
            self.sample_study_repeats = 10
            self.monte_carlo_samples = 5_000

        elif preset == 'quick':
            self.sample_study_repeats = 100
            self.monte_carlo_samples = 50_000

        elif preset == 'full':
            # full repeat count of the sample-size study
            self.sample_study_repeats = 500
            self.monte_carlo_samples = 50_000

        else:
            logging.getLogger(__name__).warning(f"Unknown UQ_PRESET '{preset}', keeping defaults")

    def get_settings(self) -> Dict[str, Dict[str, Any]]:
        """Get grouped settings"""
        return {
            "newton": {
                "max_iter": self.newton_max_iter,
                "tol": self.newton_tol,
                "lambda_cap": self.lambda_cap,
                "max_halvings": self.max_halvings,
                "vertex_tol": self.vertex_tol
            },
            "linear_algebra": {
                "apc_max_degree": self.apc_max_degree,
                "gram_cond_limit": self.gram_cond_limit,
                "gram_jitter_scale": self.gram_jitter_scale
            },
            "harness": {
                "parallel": self.parallel_enabled,
                "max_workers": self.max_workers,
                "output_dir": self.output_dir,
                "default_seed": self.default_seed,
                "log_level": self.log_level
            },
            "preset": {
                "name": self.preset,
                "sample_study_repeats": self.sample_study_repeats,
                "monte_carlo_samples": self.monte_carlo_samples
            }
        }

    def worker_count(self) -> int:
        """Threads used for independent repeats and sweep points"""
        return max(1, self.max_workers) if self.parallel_enabled else 1

# =============================================================================
# GLOBAL CONFIG INSTANCE
# =============================================================================

config = SystemConfig()

# =============================================================================
# PRESET EXAMPLES FOR .env
# =============================================================================

PRESET_EXAMPLES = {
    "smoke": """
# Smoke preset - tiny studies for CI
UQ_PRESET=smoke
""",

    "quick": """
# Quick preset - desk-scale studies (default)
UQ_PRESET=quick
UQ_MAX_WORKERS=4
""",

    "full": """
# Full preset - 500 repeats in the sample-size study
UQ_PRESET=full
UQ_MAX_WORKERS=8
"""
}

def print_current_config():
    """Print current solver and harness configuration"""

    print("Current UQ Configuration")
    print("=" * 50)

    for group, settings in config.get_settings().items():
        print(f"\n[{group}]")
        for key, value in settings.items():
            print(f"   {key}: {value}")

def print_preset_examples():
    """Print preset examples for .env file"""

    print("\nPreset Examples for .env file")
    print("=" * 50)

    for preset_name, preset_config in PRESET_EXAMPLES.items():
        print(f"\n### {preset_name.upper()} PRESET ###")
        print(preset_config.strip())

if __name__ == "__main__":
    print_current_config()
    print_preset_examples()
