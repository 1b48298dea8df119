"""
Experiment tools - Modular structure

- discrimination_operations: effect size tau grids and the outlier experiment
- null_operations: null validation and threshold tables
- schemas: Tool schema definitions
- base: Main ExperimentTools class that integrates all operations
"""

from .base import ExperimentTools

__all__ = ['ExperimentTools']
