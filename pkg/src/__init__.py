"""
SMMD: closed-form standardized MMD statistics for testing normality of latent codes
"""

__version__ = "1.0.0"
__author__ = "SMMD Team"
