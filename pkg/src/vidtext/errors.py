"""Exception hierarchy. Every error raised by the library derives from VidTextError."""


class VidTextError(Exception):
    pass


class DecodeError(VidTextError, ValueError):
    """Malformed image payload."""


class UnsupportedFormat(VidTextError, ValueError):
    """Payload is neither PNG nor binary PGM."""


class OutOfBounds(VidTextError, IndexError):
    pass


class TooSmall(VidTextError, ValueError):
    pass


class DimensionMismatch(VidTextError, ValueError):
    pass


class Degenerate(VidTextError, ValueError):
    """Region has a single intensity, so no threshold exists."""


class OverlapError(VidTextError, ValueError):
    pass


class EmptyLine(VidTextError, ValueError):
    """Line image has no foreground at all."""


class InvalidStructure(VidTextError, ValueError):
    """Headline and baseline are inconsistent (headline not above baseline)."""


class BlankCharacter(VidTextError, ValueError):
    pass


class InsufficientData(VidTextError, ValueError):
    pass


class LengthMismatch(VidTextError, ValueError):
    pass
