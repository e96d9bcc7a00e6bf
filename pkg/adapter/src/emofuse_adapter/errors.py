"""Adapter error types."""


class AdapterError(Exception):
    """Base class for adapter failures."""


class DecodeError(AdapterError):
    """A media container could not be opened or decoded."""


class NoVideoStream(AdapterError):
    """The container carries no video stream."""


class EmptyVideo(AdapterError):
    """A clip yielded no decodable frames."""


class CheckpointMissing(AdapterError):
    """A classifier checkpoint path does not exist or cannot be loaded."""


class InferenceError(AdapterError):
    """Model execution failed or produced an unusable distribution."""


class UnsupportedName(AdapterError):
    """A filename is not a RAVDESS name with a supported emotion."""
