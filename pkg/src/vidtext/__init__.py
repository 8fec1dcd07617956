"""Text extraction and recognition for pre-located video text lines with a headline stroke."""

from vidtext.errors import (
    BlankCharacter,
    DecodeError,
    Degenerate,
    DimensionMismatch,
    EmptyLine,
    InsufficientData,
    InvalidStructure,
    LengthMismatch,
    OutOfBounds,
    OverlapError,
    TooSmall,
    UnsupportedFormat,
    VidTextError,
)
from vidtext.imaging import Rect, crop, decode_image, encode_pgm, to_grayscale

__version__ = "0.1.0"

__all__ = [
    "BlankCharacter",
    "DecodeError",
    "Degenerate",
    "DimensionMismatch",
    "EmptyLine",
    "InsufficientData",
    "InvalidStructure",
    "LengthMismatch",
    "OutOfBounds",
    "OverlapError",
    "Rect",
    "TooSmall",
    "UnsupportedFormat",
    "VidTextError",
    "crop",
    "decode_image",
    "encode_pgm",
    "to_grayscale",
]
