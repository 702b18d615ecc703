"""MSB-first bit buffer used by the block encoder and decoder.

A single :class:`BitStream` plays both roles.  Writers append codewords with
:meth:`BitStream.write_bits`; readers look at the next 64 bits with
:meth:`BitStream.peek_window` and then :meth:`BitStream.consume` exactly the
number of bits they decoded.  The first bit written is the most significant
bit of the first octet and a trailing partial octet is zero padded.

On disk an encoded payload is an 8-byte little-endian ``bit_length`` header
followed by the packed octets (see :func:`dump_payload`).
"""

from __future__ import annotations

import struct

from .errors import ContractViolation, CorruptStreamError

WINDOW_BITS = 64
MASK64 = (1 << WINDOW_BITS) - 1

_HEADER = struct.Struct("<Q")


class BitStream:
    """Growable MSB-first bit buffer with a read cursor."""

    __slots__ = ("_buf", "_acc", "_nacc", "_bit_length", "_snapshot", "read_cursor")

    def __init__(self, data: bytes = b"", bit_length: int | None = None):
        if bit_length is None:
            bit_length = 8 * len(data)
        if not 0 <= bit_length <= 8 * len(data):
            raise ContractViolation(
                f"bit_length {bit_length} does not fit in {len(data)} octets"
            )
        nbytes, rem = divmod(bit_length, 8)
        self._buf = bytearray(data[:nbytes])
        # pending low-order bits not yet forming a full octet
        self._acc = data[nbytes] >> (8 - rem) if rem else 0
        self._nacc = rem
        self._bit_length = bit_length
        self._snapshot = None
        self.read_cursor = 0

    # -- writer role -------------------------------------------------------

    def write_bits(self, code: int, length: int) -> None:
        """Append the ``length`` low-order bits of ``code``, MSB first."""
        if not 1 <= length <= WINDOW_BITS:
            raise ContractViolation(f"bit count {length} outside 1..{WINDOW_BITS}")
        if code < 0 or code >> length:
            raise ContractViolation(f"code {code:#x} does not fit in {length} bits")
        acc = (self._acc << length) | code
        nacc = self._nacc + length
        if nacc >= 8:
            rem = nacc & 7
            self._buf += (acc >> rem).to_bytes(nacc >> 3, "big")
            acc &= (1 << rem) - 1
            nacc = rem
        self._acc = acc
        self._nacc = nacc
        self._bit_length += length
        self._snapshot = None

    # -- reader role -------------------------------------------------------

    @property
    def bit_length(self) -> int:
        return self._bit_length

    @property
    def remaining(self) -> int:
        return self._bit_length - self.read_cursor

    def peek_window(self) -> int:
        """Next 64 unread bits, left-justified; bits past the end read as 0."""
        data = self._snapshot
        if data is None:
            data = self._snapshot = self.getvalue() + bytes(9)
        pos = self.read_cursor
        start = pos >> 3
        chunk = int.from_bytes(data[start:start + 9], "big")
        return (chunk >> (8 - (pos & 7))) & MASK64

    def consume(self, length: int) -> None:
        if length < 0:
            raise ContractViolation(f"negative bit count {length}")
        if self.read_cursor + length > self._bit_length:
            raise CorruptStreamError(
                f"truncated stream: need {length} bits at offset "
                f"{self.read_cursor}, only {self.remaining} left"
            )
        self.read_cursor += length

    def read_bits(self, length: int) -> int:
        """Read ``length`` (<= 64) bits as an unsigned integer."""
        if not 1 <= length <= WINDOW_BITS:
            raise ContractViolation(f"bit count {length} outside 1..{WINDOW_BITS}")
        value = self.peek_window() >> (WINDOW_BITS - length)
        self.consume(length)
        return value

    # -- conversion --------------------------------------------------------

    def getvalue(self) -> bytes:
        """Packed octets; the final partial octet is zero padded."""
        if self._nacc:
            return bytes(self._buf) + bytes([self._acc << (8 - self._nacc)])
        return bytes(self._buf)

    def to_bitstring(self) -> str:
        if not self._bit_length:
            return ""
        value = int.from_bytes(self.getvalue(), "big")
        bits = format(value, f"0{8 * len(self.getvalue())}b")
        return bits[:self._bit_length]

    @classmethod
    def from_bitstring(cls, bits: str) -> BitStream:
        stream = cls()
        for ch in bits:
            if ch not in "01":
                raise ContractViolation(f"not a bit: {ch!r}")
            stream.write_bits(int(ch), 1)
        return stream

    def __len__(self) -> int:
        return self._bit_length

    def __repr__(self) -> str:
        return f"BitStream(bit_length={self._bit_length}, read_cursor={self.read_cursor})"


def dump_payload(stream: BitStream) -> bytes:
    """Serialize ``stream`` as ``<u64 LE bit_length><packed octets>``."""
    return _HEADER.pack(stream.bit_length) + stream.getvalue()


def load_payload(blob: bytes) -> BitStream:
    if len(blob) < _HEADER.size:
        raise CorruptStreamError("payload shorter than its 8-byte header")
    (bit_length,) = _HEADER.unpack_from(blob)
    body = blob[_HEADER.size:]
    if (bit_length + 7) // 8 != len(body):
        raise CorruptStreamError(
            f"header announces {bit_length} bits but payload has {len(body)} octets"
        )
    return BitStream(body, bit_length)
