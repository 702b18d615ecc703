"""Low-complexity adaptive binary block coder built on KT-estimated Huffman tables."""

from .bitio import BitStream
from .codebook import (
    CodeTable,
    ContextSet,
    DecoderTable,
    build_code,
    build_context_set,
    deserialize,
    serialize,
    validate_table,
)
from .codec import (
    AdaptiveCoderState,
    decode_adaptive,
    decode_block,
    decode_sequence,
    encode_adaptive,
    encode_block,
    encode_sequence,
)
from .densities import WeightDistribution, kt_cond_prob, kt_prob, weight_distribution
from .errors import (
    BladeError,
    ContractViolation,
    CorruptStreamError,
    TableFormatError,
    TableValidationError,
    UnsupportedConfiguration,
)

__version__ = "0.1.0"
