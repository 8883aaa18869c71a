"""Scrambled presentations of coded structures and their black-box decoders."""

from .decode import (
    BitRecord,
    DecodeReport,
    decode,
    decode_field,
    decode_group,
    decode_ring,
    enum_decode,
    locate_integer,
)
from .diagram import (
    UNDEFINED,
    ChecksumMismatch,
    DiagramInterface,
    DumpDiagram,
    LazyDiagram,
    StageDump,
    StageExceeded,
    present,
)
from .structures import FieldStructure, GroupStructure, RingStructure, build_structure, coding_from_json

__all__ = [
    "BitRecord",
    "DecodeReport",
    "decode",
    "decode_field",
    "decode_group",
    "decode_ring",
    "enum_decode",
    "locate_integer",
    "UNDEFINED",
    "ChecksumMismatch",
    "DiagramInterface",
    "DumpDiagram",
    "LazyDiagram",
    "StageDump",
    "StageExceeded",
    "present",
    "FieldStructure",
    "GroupStructure",
    "RingStructure",
    "build_structure",
    "coding_from_json",
]
