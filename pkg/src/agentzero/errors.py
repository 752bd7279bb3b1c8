"""Exception types shared across the package."""


class MalformedRecord(ValueError):
    """A corpus line is not a valid question record."""


class DegenerateCorpus(ValueError):
    """Training corpus is too small to fit a classifier."""


class NoTaskFound(ValueError):
    """A stem contains no WH-sentence and no terminal question."""


class EmptyInput(ValueError):
    """A metric was called with an empty candidate or reference."""


class DimensionMismatch(ValueError):
    """An embedding line has the wrong number of fields."""


class ZeroVector(ValueError):
    """An embedding row has (near-)zero norm and cannot be normalized."""


class UnknownToken(KeyError):
    """A token required to be in the embedding vocabulary is not."""


class BackendUnavailable(RuntimeError):
    """The model backend could not be reached after the configured retries."""


class MalformedResponse(RuntimeError):
    """The model backend answered with a payload violating the wire schema."""


class OffsetMismatch(ValueError):
    """An entity mention span no longer matches its surface (stale plan)."""
