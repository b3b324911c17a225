"""Utility modules for shadowrl."""

from shadowrl.utils.config_loader import ConfigError, dump_config, load_config, loads_config

__all__ = ['ConfigError', 'dump_config', 'load_config', 'loads_config']
