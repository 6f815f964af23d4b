"""Exception hierarchy shared by every qvol module."""


class QvolError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(QvolError, ValueError):
    pass


class NonHermitianInput(QvolError, ValueError):
    pass


class NonPositiveInput(QvolError, ValueError):
    """A claimed density matrix has an eigenvalue below the clamping band."""


class ConvergenceFailure(QvolError, ArithmeticError):
    pass


class SingularInput(QvolError, ArithmeticError):
    pass


class UnknownPreset(QvolError, KeyError):
    pass


class OverlappingRanges(QvolError, ValueError):
    pass


class SamplingError(QvolError, RuntimeError):
    """Wraps a kernel failure with the sample index that triggered it."""

    def __init__(self, sample_index: int, cause: BaseException | str):
        self.sample_index = sample_index
        self.cause = cause
        super().__init__(f"sample_index={sample_index}: {cause}")
