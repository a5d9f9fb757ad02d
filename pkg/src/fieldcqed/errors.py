"""Exception types shared across the package."""


class FieldCqedError(Exception):
    """Base class for all package errors."""


class ContractViolationError(FieldCqedError):
    """An argument violates a documented precondition (e.g. a non-hermitian
    matrix passed where a hermitian one is required)."""


class DimensionMismatchError(FieldCqedError):
    """Operands have incompatible dimensions."""


class CapacityError(FieldCqedError):
    """A requested dense dimension exceeds the configured maximum."""


class NumericError(FieldCqedError):
    """A computation produced non-finite values or failed to converge."""


class ModelError(FieldCqedError):
    """A model assumption failed (e.g. an indefinite kinetic form)."""


class StepSizeError(FieldCqedError):
    """An integrator step size is too large for the requested accuracy."""


class ConfigError(FieldCqedError):
    """Invalid run configuration.  ``problems`` lists one message per
    violated field, each prefixed with its path."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
