"""Exception types shared across the toolkit."""


class TxPowerError(Exception):
    """Base class for all toolkit errors."""


class MissingColumnError(TxPowerError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"required column missing: {column}")


class EmptyDatasetError(TxPowerError):
    """Raised when an operation that needs data receives or produces none."""


class DimensionMismatchError(TxPowerError):
    """Feature vector length or order does not match the model's subset."""


class SingularSystemError(TxPowerError):
    """The normal equations are rank deficient (only possible at lambda 0)."""


class TrainingDivergedError(TxPowerError):
    def __init__(self, epoch, message="training loss became non-finite"):
        self.epoch = epoch
        super().__init__(f"{message} at epoch {epoch}")


class ModelFormatError(TxPowerError):
    """Base class for model container integrity failures."""


class ChecksumMismatchError(ModelFormatError):
    """Stored payload digest does not match the payload bytes."""


class VersionMismatchError(ModelFormatError):
    def __init__(self, found, supported):
        self.found = found
        self.supported = supported
        super().__init__(f"model format version {found} not supported (expected {supported})")
