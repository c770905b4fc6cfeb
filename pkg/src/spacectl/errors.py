"""Exception hierarchy shared across the pipeline modules."""


class SpaceControlError(Exception):
    """Base class for all errors raised by this package."""


class EmptyTextError(SpaceControlError):
    """Input text is empty or whitespace-only.

    Carries an optional ``trace`` of pipeline step records when raised by
    the message pipeline, so callers can report how far processing got.
    """

    def __init__(self, message: str = "text is empty", trace=None):
        super().__init__(message)
        self.trace = trace or ()


class ZeroVectorError(SpaceControlError):
    """A vector with zero L2 norm where a direction is required."""


class DimensionMismatchError(SpaceControlError):
    """Vector dimensions disagree with each other or with configuration."""


class EmbeddingProviderError(SpaceControlError):
    """Base class for remote embedding provider failures."""


class ProviderUnreachableError(EmbeddingProviderError):
    """Remote provider unreachable after all retries (network or timeout)."""


class ProviderRejectedError(EmbeddingProviderError):
    """Remote provider answered with a non-2xx status or an unusable body."""


class EmptyIndexError(SpaceControlError):
    """Query against an index with no records."""


class DuplicateIdError(SpaceControlError):
    """Insert with a record_id already present in the index."""


class NotFoundError(SpaceControlError):
    """Lookup of an id that is not present."""


class SchemaError(SpaceControlError):
    """Persisted file does not match the expected schema."""


class EmptyTrainingSetError(SpaceControlError):
    """Classifier training requires at least one exemplar."""


class DegenerateClassError(SpaceControlError):
    """A class whose exemplar mean is the zero vector has no centroid."""


class UniverseMismatchError(SpaceControlError):
    """Classifier classes are not a subset of the index's api_ids."""


class DuplicateApiIdError(SpaceControlError):
    """Register with an api_id already present in the registry."""


class RegistryValidationError(SpaceControlError):
    """API metadata failed validation; ``violations`` lists each problem."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid metadata")


class UnknownFixtureError(SpaceControlError):
    """Simulator reset asked for a fixture name that does not exist."""


class FixtureLoadError(SpaceControlError):
    """Startup fixture (config, exemplars, registry, building) failed to load."""


class MisconfigurationError(SpaceControlError):
    """Pipeline components disagree, e.g. a classifier class without registry metadata."""
