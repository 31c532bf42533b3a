"""Multitime Recurrence Toolkit - Main Package"""

from .runner import RecurrenceRunner

__version__ = '1.0.0'
__all__ = ['RecurrenceRunner']
