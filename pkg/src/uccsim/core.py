"""Core types for two-party boolean functions over finite rectangles.

Inputs live on an integer rectangle [0, size_x) x [0, size_y).  Hypercube
domains {0,1}^n are handled through BitString, which maps a length-n bit
vector to its integer encoding (bit 1 is the least significant).  All
distances are weighted by a joint input distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Dense truth tables are capped at 2^14 per side.
MAX_SIDE = 1 << 14


@dataclass(frozen=True)
class BitString:
    """An n-bit vector stored as an integer; bit i (1-based) has weight 2**(i-1)."""

    value: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("length must be nonnegative")
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"value {self.value} out of range for {self.n} bits")

    def bit(self, i: int) -> int:
        """Return bit i, indexed 1..n."""
        if not 1 <= i <= self.n:
            raise IndexError(f"bit index {i} out of range 1..{self.n}")
        return (self.value >> (i - 1)) & 1

    def __xor__(self, other: "BitString") -> "BitString":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitString(self.value ^ other.value, self.n)

    def weight(self) -> int:
        return self.value.bit_count()

    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.n))

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        value = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError("bits must be 0/1")
            value |= b << i
        return cls(value, len(bits))

    @classmethod
    def from_string(cls, s: str) -> "BitString":
        """Parse "110" as a binary numeral; the rightmost character is bit 1."""
        return cls.from_bits([int(c) for c in reversed(s)])

    def __str__(self) -> str:
        return "".join(str((self.value >> i) & 1) for i in range(self.n - 1, -1, -1))


def _as_index(x, size: int, side: str) -> int:
    """Accept an int or a BitString and return a checked integer index."""
    if isinstance(x, BitString):
        if (1 << x.n) != size:
            raise ValueError(f"{side} bitstring length {x.n} does not match domain size {size}")
        x = x.value
    x = int(x)
    if not 0 <= x < size:
        raise IndexError(f"{side} index {x} out of range [0, {size})")
    return x


class BoolFunction:
    """A total 0/1-valued function on [0, size_x) x [0, size_y).

    Subclasses implement row(x); __call__ and to_table derive from it.
    """

    size_x: int
    size_y: int

    def row(self, x: int) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x, y) -> int:
        xi = _as_index(x, self.size_x, "x")
        yi = _as_index(y, self.size_y, "y")
        return int(self.row(xi)[yi])

    def to_table(self) -> np.ndarray:
        return np.stack([self.row(x) for x in range(self.size_x)])

    def to_json_dict(self) -> dict:
        n = int(math.log2(self.size_x)) if self.size_x == self.size_y and (
            self.size_x & (self.size_x - 1)) == 0 else None
        return {"kind": "table", "n": n,
                "payload": {"size_x": self.size_x, "size_y": self.size_y,
                            "rows": self.to_table().tolist()}}


class TableFunction(BoolFunction):
    """A boolean function backed by a dense uint8 truth table."""

    def __init__(self, table):
        table = np.asarray(table, dtype=np.uint8)
        if table.ndim != 2:
            raise ValueError("table must be 2-D")
        if table.shape[0] > MAX_SIDE or table.shape[1] > MAX_SIDE:
            raise ValueError(f"table sides capped at {MAX_SIDE}")
        if not np.isin(table, (0, 1)).all():
            raise ValueError("table entries must be 0/1")
        self.table = table
        self.size_x, self.size_y = table.shape

    def row(self, x: int) -> np.ndarray:
        return self.table[x]

    def to_table(self) -> np.ndarray:
        return self.table

    @classmethod
    def constant(cls, size_x: int, size_y: int, bit: int) -> "TableFunction":
        return cls(np.full((size_x, size_y), bit, dtype=np.uint8))


@dataclass
class Restriction:
    """One-argument function y -> f(x, y) produced by fixing Alice's input."""

    table: np.ndarray

    def __call__(self, y) -> int:
        yi = _as_index(y, len(self.table), "y")
        return int(self.table[yi])


def restrict(f: BoolFunction, x) -> Restriction:
    """Fix Alice's input, returning the induced function of y alone."""
    xi = _as_index(x, f.size_x, "x")
    return Restriction(np.array(f.row(xi), dtype=np.uint8, copy=True))


class OneWayProtocol:
    """A single-message protocol: Alice sends a part index, Bob decides from it.

    assignment maps each x to one of message_count parts (0-based); deciders
    holds one 0/1 row per part.  Communication cost is ceil(log2(parts)) bits.
    """

    def __init__(self, assignment, deciders):
        assignment = np.asarray(assignment, dtype=np.int64)
        deciders = np.asarray(deciders, dtype=np.uint8)
        if assignment.ndim != 1 or deciders.ndim != 2:
            raise ValueError("assignment must be 1-D and deciders 2-D")
        if deciders.shape[0] < 1:
            raise ValueError("need at least one decider")
        if not np.isin(deciders, (0, 1)).all():
            raise ValueError("decider entries must be 0/1")
        if assignment.min(initial=0) < 0 or assignment.max(initial=0) >= deciders.shape[0]:
            raise ValueError("assignment targets an unknown decider")
        self.assignment = assignment
        self.deciders = deciders
        self.message_count = deciders.shape[0]
        self.size_x = assignment.shape[0]
        self.size_y = deciders.shape[1]

    def message(self, x) -> int:
        return int(self.assignment[_as_index(x, self.size_x, "x")])

    def evaluate(self, x, y) -> int:
        yi = _as_index(y, self.size_y, "y")
        return int(self.deciders[self.message(x), yi])

    def cost_bits(self) -> int:
        return math.ceil(math.log2(self.message_count)) if self.message_count > 1 else 0

    def as_function(self) -> "ProtocolFunction":
        return ProtocolFunction(self)

    def to_json_dict(self) -> dict:
        return {"kind": "one_way_protocol", "n": None,
                "payload": {"assignment": self.assignment.tolist(),
                            "deciders": self.deciders.tolist()}}


class ProtocolFunction(BoolFunction):
    """The boolean function computed by a one-way protocol."""

    def __init__(self, protocol: OneWayProtocol):
        self.protocol = protocol
        self.size_x = protocol.size_x
        self.size_y = protocol.size_y

    def row(self, x: int) -> np.ndarray:
        return self.protocol.deciders[self.protocol.assignment[x]]

    def to_json_dict(self) -> dict:
        inner = self.protocol.to_json_dict()
        return {"kind": "protocol_function", "n": None, "payload": inner["payload"]}


def _check_same_rectangle(f, g, mu) -> None:
    if (f.size_x, f.size_y) != (g.size_x, g.size_y):
        raise ValueError("functions live on different rectangles")
    if (mu.size_x, mu.size_y) != (f.size_x, f.size_y):
        raise ValueError("distribution rectangle does not match the functions")


def distance(f: BoolFunction, g: BoolFunction, mu) -> float:
    """Mass, under mu, of the inputs where f and g disagree."""
    _check_same_rectangle(f, g, mu)
    total = 0.0
    for x in range(f.size_x):
        diff = f.row(x) != g.row(x)
        if diff.any():
            total += float(mu.row_masses(x)[diff].sum())
    return total


def protocol_error(protocol: OneWayProtocol, g: BoolFunction, mu) -> float:
    """Distance between the function a protocol computes and a target g."""
    return distance(protocol.as_function(), g, mu)


def function_from_json_dict(doc: dict) -> BoolFunction:
    kind = doc.get("kind")
    payload = doc.get("payload", {})
    if kind == "table":
        return TableFunction(payload["rows"])
    if kind == "protocol_function":
        return ProtocolFunction(OneWayProtocol(payload["assignment"], payload["deciders"]))
    if kind == "parity":
        from .parity import ParityFunction
        return ParityFunction(payload["mask"], doc["n"])
    raise ValueError(f"unknown function kind {kind!r}")


def protocol_from_json_dict(doc: dict) -> OneWayProtocol:
    if doc.get("kind") != "one_way_protocol":
        raise ValueError(f"unknown protocol kind {doc.get('kind')!r}")
    payload = doc["payload"]
    return OneWayProtocol(payload["assignment"], payload["deciders"])
