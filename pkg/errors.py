class ValuationError(Exception):
    """Base class for every error raised by the valuation toolkit."""


class DatasetError(ValuationError):
    pass


class DatasetParseError(DatasetError):
    def __init__(self, row: int, reason: str):
        self.row = row
        super().__init__(f"row {row}: {reason}")


class LabelError(DatasetError):
    pass


class IdxFormatError(DatasetError):
    pass


class IdxConsistencyError(DatasetError):
    pass


class ArchitectureError(ValuationError):
    pass


class ModelError(ValuationError):
    pass


class MaskError(ValuationError):
    pass


class DomainError(ValuationError, ValueError):
    pass


class CapacityError(ValuationError):
    pass


class PartitionError(ValuationError):
    pass


class RewardError(ValuationError):
    pass


class ComparabilityError(ValuationError):
    pass


class ConfigError(ValuationError):
    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")
