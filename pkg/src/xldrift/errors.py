"""Exception hierarchy shared across the package."""


class XldriftError(Exception):
    """Base class for all package-specific errors."""


class DataError(XldriftError):
    """Bad input data (files, records, vectors)."""


class RecordParseError(DataError):
    def __init__(self, path, line_no, reason):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no


class DuplicateKeyError(DataError):
    def __init__(self, key):
        super().__init__(f"duplicate key {key!r}")
        self.key = key


class DimensionError(DataError):
    pass


class OrphanVectorError(DataError):
    def __init__(self, key):
        super().__init__(f"vector keyed to absent record: {key!r}")
        self.key = key


class VectorFormatError(DataError):
    pass


class ComputeError(XldriftError):
    """Invalid arguments to a numeric operation."""


class DegenerateVectorError(ComputeError):
    pass


class InsufficientDataError(ComputeError):
    pass


class EmptyIndexError(ComputeError):
    pass


class UnderfullGraphError(ComputeError):
    pass


class InsufficientGroundTruthError(ComputeError):
    pass


class InsufficientPopulationError(ComputeError):
    pass


class MissingRepresentationError(ComputeError):
    def __init__(self, key):
        super().__init__(f"no vector for {key!r}")
        self.key = key


class InsufficientPoolError(ComputeError):
    pass


class DistanceRangeError(ComputeError):
    pass
