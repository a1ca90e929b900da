"""Local rules as lookup tables, and configuration evolution on a ring.

A radius-r rule maps each neighborhood of 2r+1 cells to the next state of
the center cell. The canonical table lists neighborhoods in descending
lexicographic order (all-ones first), and reading the output column as a
binary number, most significant bit first, gives the rule number. For
radius 1 this is the familiar Wolfram numbering of the 256 elementary
rules.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def table_size(radius: int) -> int:
    """Number of neighborhoods, 2**(2r+1)."""
    return 1 << (2 * radius + 1)


def max_rule_number(radius: int) -> int:
    return 1 << table_size(radius)


@dataclass(frozen=True, eq=False)
class LookupTable:
    """A local rule tabulated over all neighborhoods of width 2r+1.

    ``bits[i]`` is the output for the i-th neighborhood in descending
    lexicographic order: ``bits[0]`` answers the all-ones neighborhood and
    ``bits[-1]`` the all-zeros one. The array is immutable.
    """

    radius: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size != table_size(self.radius):
            raise ValueError(
                f"radius {self.radius} needs {table_size(self.radius)} table bits, "
                f"got {bits.size}"
            )
        if not np.all((bits == 0) | (bits == 1)):
            raise ValueError("table bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_number(cls, rule_number: int, radius: int) -> "LookupTable":
        """Build the table whose output column encodes ``rule_number`` in binary."""
        size = table_size(radius)
        if rule_number < 0 or rule_number.bit_length() > size:
            raise ValueError(
                f"rule number {rule_number} out of range for radius {radius}: "
                f"must be in [0, 2**{size})"
            )
        digits = format(rule_number, f"0{size}b")
        return cls(radius, np.frombuffer(digits.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_bit_string(cls, bits: str, radius: int | None = None) -> "LookupTable":
        """Parse a 0/1 string in table order; radius inferred from length if omitted."""
        if radius is None:
            n = len(bits)
            width = n.bit_length() - 1
            if n != 1 << width or width % 2 == 0:
                raise ValueError(f"{n} is not a valid table length")
            radius = (width - 1) // 2
        return cls(radius, np.array([int(c) for c in bits], dtype=np.uint8))

    @cached_property
    def number(self) -> int:
        """Rule number; the inverse of :meth:`from_number`."""
        return int(self.bit_string(), 2)

    @cached_property
    def response(self) -> np.ndarray:
        """Outputs indexed by neighborhood value (all-zeros neighborhood first)."""
        resp = self.bits[::-1].copy()
        resp.setflags(write=False)
        return resp

    def bit_string(self) -> str:
        """Printable 0/1 string in table order."""
        return "".join("01"[b] for b in self.bits)

    def embed(self, target_radius: int) -> "LookupTable":
        """Re-express this rule at a larger radius without changing its action.

        The wider rule reads only the central 2u+1 cells of each window, so
        stepping any configuration with it matches stepping with the
        original.
        """
        if target_radius < self.radius:
            raise ValueError(
                f"cannot embed radius {self.radius} into smaller radius {target_radius}"
            )
        shift = target_radius - self.radius
        values = np.arange(table_size(target_radius), dtype=np.int64)
        inner = (values >> shift) & (table_size(self.radius) - 1)
        return LookupTable(target_radius, self.response[inner][::-1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, LookupTable):
            return NotImplemented
        return self.radius == other.radius and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.radius, self.bits.tobytes()))

    def __repr__(self) -> str:
        num = self.number if self.bits.size <= 64 else "..."
        return f"LookupTable(radius={self.radius}, number={num})"


def as_configuration(cells) -> np.ndarray:
    """Validate and convert a 0/1 sequence to the internal row dtype."""
    arr = np.asarray(cells, dtype=np.uint8)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("configuration must be a non-empty 1D sequence")
    if not np.all(arr <= 1):
        raise ValueError("configuration cells must be 0 or 1")
    return arr


def window_values(states: np.ndarray, radius: int) -> np.ndarray:
    """Neighborhood value at every cell, wrapping around the row ends.

    Works on a single row or on a batch with rows along the last axis. The
    window may be wider than the row; indices wrap modulo its length, so
    cells can contribute more than once.
    """
    s = states.astype(np.int64, copy=False)
    vals = np.zeros(states.shape, dtype=np.int64)
    for offset in range(-radius, radius + 1):
        vals += np.roll(s, -offset, axis=-1) << (radius - offset)
    return vals


def step(lut: LookupTable, config) -> np.ndarray:
    """Apply the rule once, synchronously, with periodic boundaries."""
    cells = as_configuration(config)
    return lut.response[window_values(cells, lut.radius)]


def step_batch(responses: np.ndarray, states: np.ndarray, radius: int) -> np.ndarray:
    """One synchronous update of many rows under many rules at once.

    ``responses`` is (P, 2**(2r+1)) of value-indexed outputs, ``states`` is
    (P, M); lane p evolves under rule p. This is the hot path of the
    solver, so it stays purely vectorized.
    """
    vals = window_values(states, radius)
    return np.take_along_axis(responses, vals, axis=1)


def iterate(lut: LookupTable, config, t: int) -> np.ndarray:
    """t-fold application of the rule; t=0 returns the input unchanged."""
    if t < 0:
        raise ValueError("step count must be non-negative")
    cells = as_configuration(config)
    resp, radius = lut.response, lut.radius
    for _ in range(t):
        cells = resp[window_values(cells, radius)]
    return cells


def diagram(lut: LookupTable, config, steps: int) -> np.ndarray:
    """Space-time diagram: ``steps`` consecutive configurations, input first.

    Returns a (steps, N) array whose row t is the t-th iterate.
    """
    if steps < 1:
        raise ValueError("diagram needs at least one step")
    cells = as_configuration(config)
    out = np.empty((steps, cells.size), dtype=np.uint8)
    out[0] = cells
    for t in range(1, steps):
        out[t] = lut.response[window_values(out[t - 1], lut.radius)]
    return out
