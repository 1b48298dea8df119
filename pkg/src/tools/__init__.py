"""
MCP Tools for SMMD
"""

from .estimators import EstimatorTools
from .normality import NormalityTestTools
from .monitor import MonitorTools
from .experiment import ExperimentTools

__all__ = ['EstimatorTools', 'NormalityTestTools', 'MonitorTools', 'ExperimentTools']
