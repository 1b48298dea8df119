"""
Utility modules for SMMD
"""

from .error_handler import (
    SmmdError,
    ParameterError,
    SampleError,
    NumericalError,
    CacheError,
    FileOperationError,
    validate_gamma,
    validate_alpha,
    validate_sample,
    validate_file_path
)

__all__ = [
    'SmmdError',
    'ParameterError',
    'SampleError',
    'NumericalError',
    'CacheError',
    'FileOperationError',
    'validate_gamma',
    'validate_alpha',
    'validate_sample',
    'validate_file_path'
]
