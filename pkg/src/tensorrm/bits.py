"""Binary and erasure-carrying words and tensors, plus their file formats.

In memory every symbol is one ``uint8`` (0 or 1) so the decoders can run
vectorized numpy kernels. Packed forms are used only at the edges:

* ``BitWord.to_limbs`` / ``to_bytes``: 64-bit little-endian limbs, position 0
  in bit 0 of limb 0.
* ``BitWord.to_int``: the same layout as a Python integer bitset.
* Word files: 8-byte little-endian bit length, then the packed limbs.
* Tri-tensor files: ``t`` and the shape as little-endian ``uint32``, then
  2-bit symbols (00=0, 01=1, 10=*) packed row-major, four per byte, first
  symbol in the low bits.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

ERASURE = "*"

PathLike = Union[str, Path]


def _as_bits(values, name: str = "bits") -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError(f"{name} must contain only 0/1 values")
    return arr.astype(np.uint8, copy=False)


@dataclass(frozen=True, eq=False)
class BitWord:
    """A binary vector of fixed length."""

    bits: np.ndarray

    def __post_init__(self):
        bits = _as_bits(self.bits).ravel()
        if bits.size == 0:
            raise ValueError("BitWord must have positive length")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def length(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitWord):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.length, self.bits.tobytes()))

    def __xor__(self, other: "BitWord") -> "BitWord":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitWord(self.bits ^ other.bits)

    def __repr__(self) -> str:
        s = self.to_string()
        if len(s) > 64:
            s = s[:61] + "..."
        return f"BitWord({s!r})"

    def weight(self) -> int:
        return int(self.bits.sum())

    def to_string(self) -> str:
        return self.bits.astype(np.uint8).tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode()

    @classmethod
    def from_string(cls, text: str) -> "BitWord":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a binary string: {text!r}")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))

    def to_int(self) -> int:
        return int.from_bytes(np.packbits(self.bits, bitorder="little").tobytes(), "little")

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitWord":
        raw = value.to_bytes((length + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:length]
        return cls(bits)

    def to_limbs(self) -> np.ndarray:
        """Pack into little-endian 64-bit limbs."""
        nbytes = -(-self.length // 64) * 8
        packed = np.zeros(nbytes, dtype=np.uint8)
        raw = np.packbits(self.bits, bitorder="little")
        packed[: raw.size] = raw
        return packed.view("<u8")

    def to_bytes(self) -> bytes:
        return self.to_limbs().astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, payload: bytes, length: int) -> "BitWord":
        need = -(-length // 64) * 8
        if len(payload) != need:
            raise ValueError(f"payload has {len(payload)} bytes, expected {need}")
        bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
        return cls(bits[:length])


@dataclass(frozen=True, eq=False)
class TriWord:
    """A vector over {0, 1, *}; value bits under an erasure are ignored."""

    values: np.ndarray
    erased: np.ndarray

    def __post_init__(self):
        values = _as_bits(self.values, "values").ravel()
        erased = np.asarray(self.erased, dtype=bool).ravel()
        if values.shape != erased.shape:
            raise ValueError("values and erasure mask must have equal length")
        if values.size == 0:
            raise ValueError("TriWord must have positive length")
        values = np.where(erased, 0, values).astype(np.uint8)
        values.setflags(write=False)
        erased.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "erased", erased)

    @property
    def length(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.length

    @property
    def erasure_count(self) -> int:
        return int(self.erased.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriWord):
            return NotImplemented
        return np.array_equal(self.erased, other.erased) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.values.tobytes(), self.erased.tobytes()))

    def __repr__(self) -> str:
        s = self.to_string()
        if len(s) > 64:
            s = s[:61] + "..."
        return f"TriWord({s!r})"

    def is_all_erased(self) -> bool:
        return bool(self.erased.all())

    def to_bitword(self) -> BitWord:
        if self.erased.any():
            raise ValueError("word contains erasures")
        return BitWord(self.values)

    def agrees_with(self, word: BitWord) -> bool:
        """True when ``word`` matches every non-erased position."""
        keep = ~self.erased
        return bool(np.array_equal(self.values[keep], word.bits[keep]))

    def to_string(self) -> str:
        out = np.where(self.erased, ord(ERASURE), self.values + ord("0")).astype(np.uint8)
        return out.tobytes().decode()

    @classmethod
    def from_string(cls, text: str) -> "TriWord":
        text = text.strip()
        if not text or set(text) - {"0", "1", ERASURE}:
            raise ValueError(f"not a {{0,1,*}} string: {text!r}")
        raw = np.frombuffer(text.encode(), dtype=np.uint8)
        erased = raw == ord(ERASURE)
        return cls(np.where(erased, 0, raw - ord("0")), erased)

    @classmethod
    def from_bits(cls, word: Union[BitWord, Sequence[int], np.ndarray]) -> "TriWord":
        bits = word.bits if isinstance(word, BitWord) else _as_bits(word)
        return cls(bits, np.zeros(bits.size, dtype=bool))

    @classmethod
    def all_erased(cls, length: int) -> "TriWord":
        return cls(np.zeros(length, dtype=np.uint8), np.ones(length, dtype=bool))


@dataclass(frozen=True, eq=False)
class TriTensor:
    """A t-dimensional {0,1,*} array, row-major with the last axis fastest."""

    values: np.ndarray
    erased: np.ndarray

    def __post_init__(self):
        values = _as_bits(self.values, "values")
        erased = np.asarray(self.erased, dtype=bool)
        if values.shape != erased.shape:
            raise ValueError("values and erasure mask must have equal shape")
        if values.ndim == 0 or 0 in values.shape:
            raise ValueError("TriTensor needs a non-empty shape")
        values = np.where(erased, 0, values).astype(np.uint8)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "erased", erased)

    @property
    def shape(self) -> tuple:
        return tuple(self.values.shape)

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriTensor):
            return NotImplemented
        return np.array_equal(self.erased, other.erased) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.shape, self.values.tobytes(), self.erased.tobytes()))

    @classmethod
    def from_bits(cls, bits) -> "TriTensor":
        bits = _as_bits(bits)
        return cls(bits, np.zeros(bits.shape, dtype=bool))

    @classmethod
    def all_erased(cls, shape: Iterable[int]) -> "TriTensor":
        shape = tuple(shape)
        return cls(np.zeros(shape, dtype=np.uint8), np.ones(shape, dtype=bool))

    def is_boolean(self) -> bool:
        return not self.erased.any()

    def is_all_erased(self) -> bool:
        return bool(self.erased.all())

    def to_bits(self) -> np.ndarray:
        if self.erased.any():
            raise ValueError("tensor contains erasures")
        return self.values.copy()


# ---------------------------------------------------------------- file formats

def write_word_file(path: PathLike, word: BitWord) -> None:
    Path(path).write_bytes(struct.pack("<Q", word.length) + word.to_bytes())


def read_word_file(path: PathLike) -> BitWord:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise ValueError(f"{path}: truncated word file")
    (length,) = struct.unpack_from("<Q", data)
    return BitWord.from_bytes(data[8:], length)


def encode_tritensor(tensor: TriTensor) -> bytes:
    header = struct.pack(f"<I{tensor.ndim}I", tensor.ndim, *tensor.shape)
    symbols = np.where(tensor.erased, 2, tensor.values).astype(np.uint8).ravel()
    pad = (-symbols.size) % 4
    if pad:
        symbols = np.concatenate([symbols, np.zeros(pad, dtype=np.uint8)])
    quads = symbols.reshape(-1, 4)
    packed = quads[:, 0] | (quads[:, 1] << 2) | (quads[:, 2] << 4) | (quads[:, 3] << 6)
    return header + packed.astype(np.uint8).tobytes()


def decode_tritensor(data: bytes) -> TriTensor:
    if len(data) < 4:
        raise ValueError("truncated tensor header")
    (t,) = struct.unpack_from("<I", data)
    if t == 0 or len(data) < 4 + 4 * t:
        raise ValueError("invalid tensor header")
    shape = struct.unpack_from(f"<{t}I", data, 4)
    count = int(np.prod(shape, dtype=np.int64))
    body = np.frombuffer(data, dtype=np.uint8, offset=4 + 4 * t)
    if body.size != -(-count // 4):
        raise ValueError(f"tensor body has {body.size} bytes, expected {-(-count // 4)}")
    symbols = np.stack([(body >> s) & 3 for s in (0, 2, 4, 6)], axis=1).ravel()[:count]
    if (symbols == 3).any():
        raise ValueError("invalid 2-bit symbol 11 in tensor body")
    symbols = symbols.reshape(shape)
    erased = symbols == 2
    return TriTensor(np.where(erased, 0, symbols), erased)


def write_tensor_file(path: PathLike, tensor: TriTensor) -> None:
    Path(path).write_bytes(encode_tritensor(tensor))


def read_tensor_file(path: PathLike) -> TriTensor:
    return decode_tritensor(Path(path).read_bytes())


def read_triword_text(path: PathLike) -> TriWord:
    return TriWord.from_string(Path(path).read_text())


def write_triword_text(path: PathLike, word: TriWord) -> None:
    Path(path).write_text(word.to_string() + "\n")
