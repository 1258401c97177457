"""
Core application components - logging setup.
"""

from src.core.logging_config import setup_logging

__all__ = ['setup_logging']
