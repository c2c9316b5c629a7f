class TdcsError(ValueError):
    """Base class for every error raised by the tdcs package."""


class SpectrumError(TdcsError):
    pass


class WaveformError(TdcsError):
    pass


class ChannelError(TdcsError):
    pass


class CodingError(TdcsError):
    pass


class ConfigError(TdcsError):
    pass
