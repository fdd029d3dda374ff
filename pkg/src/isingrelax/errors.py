"""Exception types shared across the package.

The CLI maps these onto exit codes: argument errors exit 2 (argparse),
ResourceLimitError / ModelValidityError exit 3, IntegrationError exit 4.
"""


class ModelValidityError(ValueError):
    """Parameters outside the regime where the model equations hold (e.g. beta >= 1)."""


class ResourceLimitError(RuntimeError):
    """Requested system size exceeds the dense / enumeration caps."""


class IntegrationError(RuntimeError):
    """Adaptive integrator failed (step-size underflow or solver breakdown)."""
