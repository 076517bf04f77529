"Utility functions for ``floquetheat``."

from floquetheat.util.validation import (
    ValidationReport,
    normal_frequencies,
    parametric_risks,
    validate,
)

__all__ = [
    "ValidationReport",
    "normal_frequencies",
    "parametric_risks",
    "validate",
]
