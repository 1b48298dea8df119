"""
Tool definitions for experiment operations
"""

from mcp.types import Tool

from ...mmd.experiments import AlternativeKind, Method

_SEED = {
    "type": "integer",
    "description": "Root seed; identical seeds reproduce identical tables",
    "minimum": 0
}

_DIMS = {
    "type": "array",
    "items": {"type": "integer", "minimum": 1},
    "description": "Dimensions d",
    "default": [1, 2, 4, 8, 16, 32]
}

_SCALES = {
    "type": "array",
    "items": {"type": "string"},
    "description": "Kernel scales such as '1', '1/8' or 'hz'"
}

_METHODS = {
    "type": "array",
    "items": {"type": "string", "enum": [m.value for m in Method]},
    "description": "Statistics to compare",
    "default": [m.value for m in Method]
}


def get_experiment_tool_schemas():
    """Get all experiment tool schemas"""
    return [
        Tool(
            name="discrimination_tau",
            description="Effect size tau = |mean1 - mean2| / ((sd1 + sd2) / 2) between a statistic on N_d batches and on alternative batches, over a (method, d, scale) grid",
            inputSchema={
                "type": "object",
                "properties": {
                    "methods": _METHODS,
                    "alternative": {
                        "type": "string",
                        "enum": [a.value for a in AlternativeKind],
                        "default": AlternativeKind.UNIFORM_CUBE.value
                    },
                    "csv_path": {
                        "type": "string",
                        "description": "Data for the external_csv alternative"
                    },
                    "whiten": {
                        "type": "boolean",
                        "description": "Center and whiten the external_csv codes before drawing batches",
                        "default": False
                    },
                    "dims": _DIMS,
                    "scales": _SCALES,
                    "n": {"type": "integer", "minimum": 2, "default": 100},
                    "replicates": {"type": "integer", "minimum": 2, "default": 200},
                    "seed": _SEED
                },
                "required": ["seed"]
            }
        ),
        Tool(
            name="outlier_experiment",
            description="Compare clean N_d batches with batches whose first row is magnitude * ones; each method reported at its best scale",
            inputSchema={
                "type": "object",
                "properties": {
                    "methods": _METHODS,
                    "d": {"type": "integer", "minimum": 1, "default": 4},
                    "n": {"type": "integer", "minimum": 2, "default": 100},
                    "magnitude": {"type": "number", "default": 100},
                    "scales": _SCALES,
                    "replicates": {"type": "integer", "minimum": 2, "default": 200},
                    "seed": _SEED
                },
                "required": ["seed"]
            }
        ),
        Tool(
            name="validate_null",
            description="Mean and standard deviation of SMMD over N_d batches, per dimension and scale",
            inputSchema={
                "type": "object",
                "properties": {
                    "dims": _DIMS,
                    "scales": _SCALES,
                    "n": {"type": "integer", "minimum": 2, "default": 100},
                    "replicates": {"type": "integer", "minimum": 2, "default": 10000},
                    "seed": _SEED
                },
                "required": ["seed"]
            }
        ),
        Tool(
            name="threshold_table",
            description="Monte-Carlo test thresholds per dimension, sample transform and scale",
            inputSchema={
                "type": "object",
                "properties": {
                    "dims": _DIMS,
                    "scales": _SCALES,
                    "n": {"type": "integer", "minimum": 2, "default": 100},
                    "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1, "default": 0.05},
                    "replicates": {"type": "integer", "minimum": 1, "default": 100000},
                    "seed": _SEED
                },
                "required": ["seed"]
            }
        ),
    ]
