# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

# MSB-first bit packing plus Exp-Golomb codes

# Longest zero prefix accepted by the ue(v) reader
MAX_LEADING_ZEROS = 32


class CorruptStreamError(ValueError):
    def __init__(self, message: str, bit_offset: int):
        """
        Raised when the block payload cannot be parsed.

        Args:
            message: Description of the problem
            bit_offset: Offset (in bits, from the start of the stream) where
                parsing failed
        """
        super().__init__(f"{message} (bit offset {bit_offset})")
        self.bit_offset = bit_offset


def ue_length(value: int) -> int:
    """Bits used by the unsigned Exp-Golomb code of value."""
    return 2 * (value + 1).bit_length() - 1


def se_to_ue(value: int) -> int:
    """Signed-to-unsigned mapping: k > 0 -> 2k - 1, k <= 0 -> -2k."""
    return 2 * value - 1 if value > 0 else -2 * value


def ue_to_se(code: int) -> int:
    if code & 1:
        return (code + 1) >> 1
    return -(code >> 1)


class BitWriter:
    def __init__(self):
        self._bytes = bytearray()
        self._acc = 0
        self._acc_bits = 0
        self._length = 0

    def __len__(self) -> int:
        return self._length

    @property
    def bit_length(self) -> int:
        return self._length

    def write_bits(self, value: int, nbits: int):
        """
        Appends the nbits low-order bits of value, most significant first.

        Args:
            value: Non-negative integer
            nbits: Field width
        """
        if nbits == 0:
            return
        if value < 0 or value >> nbits:
            raise ValueError(f"Value {value} does not fit in {nbits} bits")
        self._acc = (self._acc << nbits) | value
        self._acc_bits += nbits
        self._length += nbits
        while self._acc_bits >= 8:
            self._acc_bits -= 8
            self._bytes.append((self._acc >> self._acc_bits) & 0xFF)
        self._acc &= (1 << self._acc_bits) - 1

    def write_bit(self, bit: int):
        self.write_bits(1 if bit else 0, 1)

    def write_ue(self, value: int):
        if value < 0:
            raise ValueError(f"ue(v) needs a non-negative value, got {value}")
        self.write_bits(value + 1, ue_length(value))

    def write_se(self, value: int):
        self.write_ue(se_to_ue(value))

    def to_bytes(self) -> bytes:
        """Packed bits, zero-padded to a byte boundary."""
        out = bytearray(self._bytes)
        if self._acc_bits:
            out.append((self._acc << (8 - self._acc_bits)) & 0xFF)
        return bytes(out)

    def to_bitstring(self) -> str:
        return ''.join(f"{byte:08b}" for byte in self.to_bytes())[:self._length]


class BitReader:
    def __init__(self, data: bytes, start_bit: int = 0, base_offset: int = 0):
        """
        Reads bits MSB-first from a byte buffer.

        Args:
            data: Packed bytes
            start_bit: First bit to read inside data
            base_offset: Added to positions reported in errors, so offsets
                refer to the whole file when data is a payload slice
        """
        self.data = data
        self.pos = start_bit
        self.base_offset = base_offset
        self._total = len(data) * 8

    @property
    def bit_offset(self) -> int:
        return self.base_offset + self.pos

    def read_bit(self) -> int:
        if self.pos >= self._total:
            raise CorruptStreamError("Unexpected end of stream", self.bit_offset)
        byte = self.data[self.pos >> 3]
        bit = (byte >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return bit

    def read_bits(self, nbits: int) -> int:
        value = 0
        for _ in range(nbits):
            value = (value << 1) | self.read_bit()
        return value

    def read_ue(self) -> int:
        start = self.bit_offset
        leading_zeros = 0
        while self.read_bit() == 0:
            leading_zeros += 1
            if leading_zeros > MAX_LEADING_ZEROS:
                raise CorruptStreamError("Exp-Golomb prefix too long", start)
        if leading_zeros == 0:
            return 0
        return (1 << leading_zeros) - 1 + self.read_bits(leading_zeros)

    def read_se(self) -> int:
        return ue_to_se(self.read_ue())
