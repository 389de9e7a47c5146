class PipelineError(Exception):
    """Base class for failures caused by bad input data or artifacts."""


class DataError(PipelineError):
    pass


class UsageError(Exception):
    """Bad command-line usage; nothing has been written."""
