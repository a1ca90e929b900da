"""Partial space-time observations and their file formats.

An observation is an N-by-M grid over {0, 1, ?} recording configurations of
a width-M system at increasing (but unrecorded) time steps. The first row
is always fully known; later rows may contain unknown cells. Grids are
stored as int8 arrays with ``UNKNOWN`` (-1) marking the '?' entries.

Two interchangeable file formats are supported: a plain text form with one
row string per line and blank lines between observations, and a JSON form
carrying the same rows plus optional provenance metadata.
"""

import json
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .exceptions import CapacityError, ParseError
from .rules import LookupTable, as_configuration, iterate

UNKNOWN = -1

_CHAR_TO_CELL = {"0": 0, "1": 1, "?": UNKNOWN}
_CELL_TO_CHAR = {0: "0", 1: "1", UNKNOWN: "?"}


@dataclass(frozen=True, eq=False)
class Observation:
    """One partial record of a space-time diagram; immutable."""

    grid: np.ndarray = field(repr=False)

    def __post_init__(self):
        grid = np.ascontiguousarray(self.grid, dtype=np.int8)
        if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
            raise ValueError("observation grid must be 2D and non-empty")
        if not np.all((grid == 0) | (grid == 1) | (grid == UNKNOWN)):
            raise ValueError("observation cells must be 0, 1 or unknown")
        if np.any(grid[0] == UNKNOWN):
            raise ValueError("first observation row must be fully known")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_rows(cls, rows) -> "Observation":
        """Build from row strings over '0', '1', '?', e.g. ("010", "0?1")."""
        cells = []
        for r, row in enumerate(rows):
            try:
                cells.append([_CHAR_TO_CELL[c] for c in row])
            except KeyError as exc:
                raise ValueError(f"invalid cell {exc.args[0]!r} in row {r + 1}") from None
        return cls(np.array(cells, dtype=np.int8))

    @property
    def n_rows(self) -> int:
        return self.grid.shape[0]

    @property
    def n_cols(self) -> int:
        return self.grid.shape[1]

    def row_strings(self) -> list[str]:
        return ["".join(_CELL_TO_CHAR[c] for c in row) for row in self.grid.tolist()]

    def count_known(self) -> int:
        """Number of cells that are not unknown; at least n_cols."""
        return int(np.count_nonzero(self.grid != UNKNOWN))

    @property
    def is_complete(self) -> bool:
        return not np.any(self.grid == UNKNOWN)

    def completions(self, limit: int) -> list["Observation"]:
        """All spatially complete grids agreeing with this one on known cells.

        There are 2**u of them for u unknown cells, listed with the fill
        pattern counting up in row-major position order. Enumeration is
        refused when it would exceed ``limit``; this exists for exhaustive
        verification at small sizes, not for search.
        """
        unknown_at = np.argwhere(self.grid == UNKNOWN)
        u = len(unknown_at)
        if u > 62 or 2**u > limit:
            raise CapacityError(
                f"{u} unknown cells give 2**{u} completions, over the limit of {limit}"
            )
        out = []
        for fill in product((0, 1), repeat=u):
            grid = np.array(self.grid)
            for (n, m), value in zip(unknown_at, fill):
                grid[n, m] = value
            out.append(Observation(grid))
        return out

    def a_completion(self, lut: LookupTable, gaps) -> "Observation":
        """Fill the unknown cells by evolving ``lut`` across the given gaps.

        ``gaps[n-1]`` is the number of rule applications between recorded
        rows n and n+1. Row n+1 keeps its known cells and takes unknown
        ones from the evolution of the already-completed row n.
        """
        gaps = tuple(int(g) for g in gaps)
        if len(gaps) != self.n_rows - 1:
            raise ValueError(
                f"need {self.n_rows - 1} gaps for {self.n_rows} rows, got {len(gaps)}"
            )
        if any(g < 1 for g in gaps):
            raise ValueError("time gaps must be positive")
        grid = np.array(self.grid)
        current = grid[0].astype(np.uint8)
        for n, t in enumerate(gaps, start=1):
            evolved = iterate(lut, current, t)
            row = grid[n]
            current = np.where(row == UNKNOWN, evolved, row).astype(np.uint8)
            grid[n] = current
        return Observation(grid)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Observation):
            return NotImplemented
        return np.array_equal(self.grid, other.grid)

    def __hash__(self) -> int:
        return hash(self.grid.tobytes())

    def __repr__(self) -> str:
        return f"Observation({self.n_rows}x{self.n_cols}, known={self.count_known()})"


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """An ordered, non-empty collection of observations of one system."""

    observations: tuple[Observation, ...]

    def __post_init__(self):
        obs = tuple(self.observations)
        if not obs:
            raise ValueError("observation set must be non-empty")
        if not all(isinstance(o, Observation) for o in obs):
            raise TypeError("observation set elements must be Observations")
        object.__setattr__(self, "observations", obs)

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)

    def __getitem__(self, index):
        return self.observations[index]

    def counts(self) -> tuple[int, int]:
        """(total known cells, total columns) over all observations.

        Their difference is the number of knowns below first rows, which is
        both the solver's maximum fitness and the problem's information
        content: when the two are equal every rule is a solution.
        """
        c = sum(o.count_known() for o in self.observations)
        m = sum(o.n_cols for o in self.observations)
        return c, m

    def maskable_positions(self) -> list[tuple[int, int, int]]:
        """(observation, row, col) triples of known cells below first rows."""
        out = []
        for i, obs in enumerate(self.observations):
            below = obs.grid[1:] != UNKNOWN
            for n, m in np.argwhere(below):
                out.append((i, int(n) + 1, int(m)))
        return out

    def mask_random(self, count: int, rng: np.random.Generator) -> "ObservationSet":
        """Replace ``count`` uniformly chosen known cells with unknowns.

        First rows are never touched: they must stay fully known. The
        choice is uniform over the maskable cells of the whole set.
        """
        if count < 0:
            raise ValueError("count must be non-negative")
        if count == 0:
            return self
        positions = self.maskable_positions()
        if count > len(positions):
            raise CapacityError(
                f"cannot mask {count} cells, only {len(positions)} are maskable"
            )
        picked = rng.choice(len(positions), size=count, replace=False)
        grids = [np.array(o.grid) for o in self.observations]
        for idx in picked:
            i, n, m = positions[int(idx)]
            grids[i][n, m] = UNKNOWN
        return ObservationSet(tuple(Observation(g) for g in grids))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ObservationSet):
            return NotImplemented
        return self.observations == other.observations

    def __repr__(self) -> str:
        c, m = self.counts()
        return f"ObservationSet({len(self)} observations, C={c}, M={m})"


# ---------------------------------------------------------------------------
# file formats


def format_text(obs_set: ObservationSet) -> str:
    """Text form: one row string per line, blank line between observations."""
    blocks = ["\n".join(o.row_strings()) for o in obs_set]
    return "\n\n".join(blocks) + "\n"


def parse_text(text: str) -> ObservationSet:
    """Inverse of :func:`format_text`; raises :class:`ParseError` with line numbers."""
    blocks: list[list[np.ndarray]] = []
    current: list[np.ndarray] = []
    current_width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            if current:
                blocks.append(current)
                current, current_width = [], None
            continue
        bad = set(line) - set("01?")
        if bad:
            raise ParseError(f"invalid character {bad.pop()!r}", line=lineno)
        if current_width is None:
            current_width = len(line)
        elif len(line) != current_width:
            raise ParseError(
                f"row of width {len(line)} in an observation of width {current_width}",
                line=lineno,
            )
        if not current and "?" in line:
            raise ParseError("first row of an observation cannot contain '?'", line=lineno)
        current.append(np.array([_CHAR_TO_CELL[c] for c in line], dtype=np.int8))
    if current:
        blocks.append(current)
    if not blocks:
        raise ParseError("no observations found", line=1)
    return ObservationSet(tuple(Observation(np.array(rows)) for rows in blocks))


def format_json(obs_set: ObservationSet, metadata: dict | None = None) -> str:
    """JSON form mirroring the text format, with optional provenance metadata
    (source rule for synthetic sets, gap bound, seed, degradation level)."""
    doc = {
        "observations": [{"rows": o.row_strings()} for o in obs_set],
        "metadata": dict(metadata or {}),
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_json(text: str) -> tuple[ObservationSet, dict]:
    """Inverse of :func:`format_json`; returns (set, metadata)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict) or "observations" not in doc:
        raise ParseError("expected an object with an 'observations' key")
    observations = []
    for i, entry in enumerate(doc["observations"]):
        rows = entry.get("rows") if isinstance(entry, dict) else None
        if not rows:
            raise ParseError(f"observation {i + 1} has no rows")
        try:
            observations.append(Observation.from_rows(rows))
        except ValueError as exc:
            raise ParseError(f"observation {i + 1}: {exc}") from None
    if not observations:
        raise ParseError("no observations found")
    return ObservationSet(tuple(observations)), dict(doc.get("metadata") or {})


def load_file(path) -> tuple[ObservationSet, dict]:
    """Read a text or JSON observation file; the format is sniffed from content."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return parse_json(text)
    return parse_text(text), {}
