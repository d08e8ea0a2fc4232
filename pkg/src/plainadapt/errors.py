"""Exception hierarchy shared across the toolkit.

Everything domain-level derives from PlainAdaptError so the CLI can map
"expected" failures to exit code 1 and let genuine bugs propagate.
"""


class PlainAdaptError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(PlainAdaptError):
    """A file or payload could not be parsed; message carries a locator."""


class ValidationError(PlainAdaptError):
    """Well-formed input violated an invariant (names the offending record)."""


class ConfigError(PlainAdaptError):
    """Missing or inconsistent configuration."""


class TransportError(PlainAdaptError):
    """Provider unreachable after the configured number of attempts."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class RequestError(PlainAdaptError):
    """Provider rejected the request (4xx other than 429); never retried."""


class ProtocolError(PlainAdaptError):
    """Provider answered, but the body did not match the wire contract."""


class RatingParseError(PlainAdaptError):
    """No usable rating could be extracted from a judge response."""
