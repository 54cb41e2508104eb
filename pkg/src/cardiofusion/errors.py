"""Exception hierarchy shared across the pipeline."""


class CardioFusionError(Exception):
    """Base class for all errors raised by this package."""


# --- dataset / matrix errors ---------------------------------------------

class EmptyFile(CardioFusionError):
    pass


class MissingColumn(CardioFusionError):
    pass


class UnparseableValue(CardioFusionError):
    """A cell failed validation; message names the row and column."""

    def __init__(self, row: int, column: str, value: str, reason: str = ""):
        self.row = row
        self.column = column
        self.value = value
        detail = f" ({reason})" if reason else ""
        super().__init__(f"row {row}, column {column!r}: cannot parse {value!r}{detail}")


class EmptyMatrix(CardioFusionError):
    pass


class DegenerateClass(CardioFusionError):
    pass


# --- model errors ---------------------------------------------------------

class EmptyData(CardioFusionError):
    pass


class SingleClass(CardioFusionError):
    pass


class ShapeMismatch(CardioFusionError):
    pass


# --- metric errors --------------------------------------------------------

class LengthMismatch(CardioFusionError):
    pass


class EmptyInput(CardioFusionError):
    pass


# --- voting / fusion errors ----------------------------------------------

class NoVoters(CardioFusionError):
    pass


class ZeroWeightSum(CardioFusionError):
    pass


# --- LLM transport / parsing errors ----------------------------------------

class HttpError(CardioFusionError):
    def __init__(self, status: int, detail: str = ""):
        self.status = status
        super().__init__(f"HTTP {status}" + (f": {detail}" if detail else ""))


class Timeout(CardioFusionError):
    pass


class RateLimited(CardioFusionError):
    pass


class OfflineMiss(CardioFusionError):
    """Offline mode was requested and the response cache has no entry."""


class Unparseable(CardioFusionError):
    """No recognizable verdict token in an LLM response."""


class MissingExemplars(CardioFusionError):
    pass


class ExemplarLeakage(CardioFusionError):
    """A few-shot exemplar was drawn from outside the training split."""


# --- reporting / orchestration errors --------------------------------------

class UnwritablePath(CardioFusionError):
    pass


class InvalidConfig(CardioFusionError):
    pass


class MissingArtifact(CardioFusionError):
    def __init__(self, path, producing_command: str):
        self.path = str(path)
        self.producing_command = producing_command
        super().__init__(
            f"missing artifact {self.path}; run `cardiofusion {producing_command}` first"
        )
