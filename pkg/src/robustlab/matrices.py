"""Sign matrices: bit-packed storage, seeded generation, serialization.

A SignMatrix is an n x d matrix with entries in {+1, -1}, stored as one
little-endian bit vector per row (bit 1 encodes +1, bit 0 encodes -1) so that
row-level kernels reduce to word operations.  Matrices are immutable; every
derived matrix is a copy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParseError

_WORD = 64


@dataclass(frozen=True)
class SeedSpec:
    """Key of a counter-based random stream: (base_seed, stream_index).

    Identical pairs reproduce identical draws bit for bit, independent of
    scheduling, so parallel trials can use consecutive stream indices.
    """

    base_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("base_seed", "stream_index"):
            v = getattr(self, name)
            if not (0 <= int(v) < 2**64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def with_stream(self, stream_index: int) -> "SeedSpec":
        return SeedSpec(self.base_seed, stream_index)

    def generator(self) -> np.random.Generator:
        key = np.array([self.base_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ColumnSelection:
    """Strictly increasing tuple of column indices."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("column indices must be strictly increasing")
        if idx and idx[0] < 0:
            raise ValueError("column indices must be nonnegative")

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def _words(d: int) -> int:
    return (d + _WORD - 1) // _WORD


class SignMatrix:
    """Immutable n x d matrix over {+1, -1} with bit-packed rows."""

    __slots__ = ("n", "d", "rows", "_dense", "_colkeys")

    def __init__(self, n: int, d: int, rows: np.ndarray):
        if n < 0 or d < 0:
            raise DimensionError(f"matrix dimensions must be nonnegative, got {n}x{d}")
        rows = np.ascontiguousarray(rows, dtype=np.uint64)
        if rows.shape != (n, _words(d)):
            raise DimensionError(
                f"row storage shape {rows.shape} does not match {n}x{d}"
            )
        if d % _WORD and n:
            mask = np.uint64((1 << (d % _WORD)) - 1)
            if np.any(rows[:, -1] & ~mask):
                raise ValueError("padding bits beyond column d must be zero")
        rows.setflags(write=False)
        self.n = n
        self.d = d
        self.rows = rows
        self._dense = None
        self._colkeys = None

    def __setattr__(self, name, value):
        if hasattr(self, "rows") and name in ("n", "d", "rows"):
            raise AttributeError("SignMatrix is immutable")
        super().__setattr__(name, value)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_entries(cls, entries) -> "SignMatrix":
        """Build from a dense array-like of +-1 entries."""
        arr = np.asarray(entries, dtype=np.int8)
        if arr.ndim != 2:
            raise DimensionError("entries must be a 2-D array")
        if arr.size and not np.all(np.abs(arr) == 1):
            raise ValueError("entries must be +1 or -1")
        n, d = arr.shape
        bits = ((arr + 1) // 2).astype(np.uint8)
        if d == 0 or n == 0:
            return cls(n, d, np.zeros((n, _words(d)), dtype=np.uint64))
        packed = np.packbits(bits, axis=1, bitorder="little")
        full = np.zeros((n, _words(d) * 8), dtype=np.uint8)
        full[:, : packed.shape[1]] = packed
        rows = full.view(np.uint64)
        return cls(n, d, rows)

    # -- element access ----------------------------------------------------

    def entry(self, i: int, j: int) -> int:
        if not (0 <= i < self.n and 0 <= j < self.d):
            raise IndexError(f"entry ({i}, {j}) out of range for {self.n}x{self.d}")
        bit = (int(self.rows[i, j // _WORD]) >> (j % _WORD)) & 1
        return 1 if bit else -1

    def dense(self) -> np.ndarray:
        """Dense int8 view of the entries (cached, read-only)."""
        if self._dense is None:
            if self.n == 0 or self.d == 0:
                dense = np.zeros((self.n, self.d), dtype=np.int8)
            else:
                bytes_ = self.rows.view(np.uint8)
                bits = np.unpackbits(bytes_, axis=1, bitorder="little")[:, : self.d]
                dense = (2 * bits.astype(np.int8) - 1).astype(np.int8)
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def column_keys(self):
        """Per-column bit patterns as Python ints (cached); for duplicate scans."""
        if self._colkeys is None:
            dense = self.dense()
            bits = ((dense.T + 1) // 2).astype(np.uint8)
            keys = []
            for j in range(self.d):
                keys.append(int.from_bytes(np.packbits(bits[j], bitorder="little").tobytes(), "little"))
            self._colkeys = keys
        return self._colkeys

    @property
    def shape(self):
        return (self.n, self.d)

    def __eq__(self, other):
        return (
            isinstance(other, SignMatrix)
            and self.n == other.n
            and self.d == other.d
            and np.array_equal(self.rows, other.rows)
        )

    def __hash__(self):
        return hash((self.n, self.d, self.rows.tobytes()))

    def __repr__(self):
        return f"SignMatrix({self.n}x{self.d})"


def generate(n: int, d: int, seed: SeedSpec) -> SignMatrix:
    """Draw an n x d matrix with i.i.d. uniform +-1 entries from seed's stream."""
    if n < 1 or d < 1:
        raise DimensionError(f"generate requires n >= 1 and d >= 1, got {n}x{d}")
    w = _words(d)
    raw = seed.generator().bytes(n * w * 8)
    rows = np.frombuffer(raw, dtype=np.uint64).reshape(n, w).copy()
    if d % _WORD:
        rows[:, -1] &= np.uint64((1 << (d % _WORD)) - 1)
    return SignMatrix(n, d, rows)


def stack(top: SignMatrix, bottom: SignMatrix) -> SignMatrix:
    """Vertical concatenation; row order is top rows then bottom rows."""
    if top.d != bottom.d:
        raise DimensionError(
            f"stack requires equal column counts, got {top.d} and {bottom.d}"
        )
    rows = np.concatenate([top.rows, bottom.rows], axis=0)
    return SignMatrix(top.n + bottom.n, top.d, rows)


def select_columns(m: SignMatrix, sel: ColumnSelection) -> SignMatrix:
    """Submatrix of the selected columns, order preserved."""
    for j in sel:
        if j >= m.d:
            raise DimensionError(f"column index {j} out of range for d={m.d}")
    idx = list(sel)
    return SignMatrix.from_entries(m.dense()[:, idx].reshape(m.n, len(idx)))


def find_duplicate_columns(m: SignMatrix):
    """First pair of equal or opposite columns, scanning j ascending.

    Returns (i, j, opposite) with i < j, or None.  A hit is a spark-2 witness:
    c_i - c_j = 0 (equal) or c_i + c_j = 0 (opposite).
    """
    if m.n == 0:
        return None
    mask = (1 << m.n) - 1
    seen = {}
    for j, key in enumerate(m.column_keys()):
        if key in seen:
            return (seen[key], j, False)
        comp = key ^ mask
        if comp in seen:
            return (seen[comp], j, True)
        seen[key] = j
    return None


def write_matrix(m: SignMatrix, path) -> None:
    """Write the interchange text format: "n d" header then +/- rows."""
    dense = m.dense()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{m.n} {m.d}\n")
        table = np.array(["-", "+"])
        for i in range(m.n):
            fh.write("".join(table[(dense[i] + 1) // 2]) + "\n")


def read_matrix(path) -> SignMatrix:
    """Parse the interchange text format; errors name the offending line."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline()
        if not header:
            raise ParseError("empty file", line=1)
        parts = header.split()
        if len(parts) != 2:
            raise ParseError(f"header must be 'n d', got {header!r}", line=1)
        try:
            n, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"header must hold two integers, got {header!r}", line=1)
        if n < 0 or d < 0:
            raise ParseError("dimensions must be nonnegative", line=1)
        entries = np.empty((n, d), dtype=np.int8)
        for i in range(n):
            line = fh.readline()
            if not line:
                raise ParseError(f"expected {n} rows, file ends after {i}", line=i + 1)
            row = line.rstrip("\n")
            if len(row) != d:
                raise ParseError(
                    f"row has {len(row)} characters, expected {d}", line=i + 2
                )
            for j, ch in enumerate(row):
                if ch == "+":
                    entries[i, j] = 1
                elif ch == "-":
                    entries[i, j] = -1
                else:
                    raise ParseError(f"illegal character {ch!r}", line=i + 2)
        trailing = fh.readline()
        if trailing.strip():
            raise ParseError("unexpected content after last row", line=n + 2)
    return SignMatrix.from_entries(entries)
