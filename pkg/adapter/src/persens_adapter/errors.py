"""Exception types raised on the adapter's validated boundaries."""


class AdapterError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(AdapterError):
    """The detector configuration file is structurally invalid."""


class ModelLoadError(AdapterError):
    """A configured detector backend could not be loaded."""


class SidecarError(AdapterError):
    """A distance sidecar file is malformed (message names the row)."""


class FrameSourceError(AdapterError):
    """An image folder or bag file cannot provide frames."""


class TopicNotFoundError(FrameSourceError):
    """The requested topic does not exist in the bag."""


class BagFormatError(FrameSourceError):
    """The bag file violates the container format."""
