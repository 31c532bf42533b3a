"""Monitoring modules for solution consistency checks."""

from .consistency import ConsistencyMonitor, OracleCheck

__all__ = ['ConsistencyMonitor', 'OracleCheck']
