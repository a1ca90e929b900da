"""Error measures between candidate rules and partial observations.

Two equivalent-in-the-zero-case measures are provided: a forward one that
evolves the first row and compares at absolute time steps, and a pairwise
one that compares consecutive completed rows across time gaps. The exact
minimum of the pairwise measure over all gap assignments is exponential in
the row count, so the practical estimator treats gaps row by row, breaking
ties at random; its value never undercuts the exact minimum.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .exceptions import CapacityError
from .observations import UNKNOWN, Observation, ObservationSet, _CHAR_TO_CELL
from .rules import LookupTable, iterate, step_batch

# Per-observation time gaps: entry n is the number of rule applications
# between recorded rows n+1 and n+2. Length is one less than the row count.
GapSequence = tuple[int, ...]


@dataclass(frozen=True)
class ErrorEstimate:
    """Result of an error minimization over gap assignments.

    ``gaps`` holds one chosen gap sequence per observation involved.
    ``exact`` is only set when the value provably equals the true minimum.
    """

    value: int
    gaps: tuple[GapSequence, ...]
    exact: bool


def _as_partial_row(row) -> np.ndarray:
    if isinstance(row, str):
        row = [_CHAR_TO_CELL[c] for c in row]
    arr = np.asarray(row, dtype=np.int8)
    if arr.ndim != 1:
        raise ValueError("partial row must be one-dimensional")
    if not np.all((arr == 0) | (arr == 1) | (arr == UNKNOWN)):
        raise ValueError("partial row cells must be 0, 1 or unknown")
    return arr


def dist(a, b) -> int:
    """Mismatches between two partial rows, counted where both are known.

    Zero does not imply equality: positions where either side is unknown
    never contribute.
    """
    a, b = _as_partial_row(a), _as_partial_row(b)
    if a.shape != b.shape:
        raise ValueError(f"row lengths differ: {a.size} vs {b.size}")
    both = (a != UNKNOWN) & (b != UNKNOWN)
    return int(np.count_nonzero(both & (a != b)))


def _validated_gaps(obs: Observation, gaps) -> GapSequence:
    gaps = tuple(int(g) for g in gaps)
    if len(gaps) != obs.n_rows - 1:
        raise ValueError(f"need {obs.n_rows - 1} gaps, got {len(gaps)}")
    if any(g < 1 for g in gaps):
        raise ValueError("time gaps must be positive")
    return gaps


def error_with_timesteps(lut: LookupTable, obs: Observation, taus) -> int:
    """Total mismatch when row n+1 is pinned to absolute time ``taus[n-1]``.

    Evolves the first row forward once, comparing against each recorded row
    at its assigned step. Unknown cells never contribute.
    """
    taus = tuple(int(t) for t in taus)
    if len(taus) != obs.n_rows - 1:
        raise ValueError(f"need {obs.n_rows - 1} time steps, got {len(taus)}")
    if any(t < 1 for t in taus) or any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("time steps must be positive and strictly increasing")
    current = obs.grid[0].astype(np.uint8)
    total = 0
    now = 0
    for n, tau in enumerate(taus, start=1):
        current = iterate(lut, current, tau - now)
        now = tau
        total += dist(current, obs.grid[n])
    return total


def error_with_gaps(lut: LookupTable, obs: Observation, gaps) -> int:
    """Total mismatch between consecutive completed rows across ``gaps``.

    The observation is first completed by evolving ``lut`` over the same
    gaps, so the sum reduces to plain cell differences.
    """
    gaps = _validated_gaps(obs, gaps)
    completed = obs.a_completion(lut, gaps).grid.astype(np.uint8)
    total = 0
    for n, t in enumerate(gaps):
        evolved = iterate(lut, completed[n], t)
        total += int(np.count_nonzero(evolved != completed[n + 1]))
    return total


def min_error_exact(
    lut: LookupTable, obs: Observation, gap_bound: int, budget: int = 10**6
) -> ErrorEstimate:
    """True minimum over every gap assignment with entries in [1, gap_bound].

    Exhaustive: gap_bound**(rows-1) sequences. Guarded by ``budget`` because
    it exists for verification, never for search.
    """
    if gap_bound < 1:
        raise ValueError("gap bound must be positive")
    n_gaps = obs.n_rows - 1
    if gap_bound**n_gaps > budget:
        raise CapacityError(
            f"{gap_bound}**{n_gaps} gap sequences exceed the budget of {budget}"
        )
    best_value, best_gaps = None, None
    for gaps in product(range(1, gap_bound + 1), repeat=n_gaps):
        value = error_with_gaps(lut, obs, gaps)
        if best_value is None or value < best_value:
            best_value, best_gaps = value, gaps
            if value == 0:
                break
    return ErrorEstimate(best_value, (best_gaps,), exact=True)


def scan_rows_batch(
    responses: np.ndarray,
    grid: np.ndarray,
    gap_bound: int,
    tie_floats: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Row-by-row gap search for P rules at once over one observation grid.

    For each transition the current completed row is evolved 1..gap_bound
    steps per lane; the gap with minimal mismatch against the next row's
    known cells is committed together with the induced completion.

    ``tie_floats`` of shape (P, rows-1) supplies one uniform draw per
    transition to break gap ties; ``None`` commits the smallest tied gap,
    which is the deterministic choice used for complete observations.

    Returns (total error per lane, chosen gaps per lane).
    """
    if gap_bound < 1:
        raise ValueError("gap bound must be positive")
    lanes, size = responses.shape
    radius = (size.bit_length() - 2) // 2
    n_rows, width = grid.shape
    current = np.broadcast_to(grid[0].astype(np.uint8), (lanes, width)).copy()
    totals = np.zeros(lanes, dtype=np.int64)
    chosen = np.zeros((lanes, n_rows - 1), dtype=np.int64)
    states = np.empty((gap_bound, lanes, width), dtype=np.uint8)
    errors = np.empty((lanes, gap_bound), dtype=np.int64)
    for n in range(1, n_rows):
        row = grid[n]
        known = row != UNKNOWN
        state = current
        for t in range(gap_bound):
            state = step_batch(responses, state, radius)
            states[t] = state
            errors[:, t] = np.count_nonzero((state != row) & known, axis=1)
        row_min = errors.min(axis=1)
        totals += row_min
        ties = errors == row_min[:, None]
        if tie_floats is None:
            pick = ties.argmax(axis=1)
        else:
            n_tied = ties.sum(axis=1)
            rank = np.minimum((tie_floats[:, n - 1] * n_tied).astype(np.int64), n_tied - 1)
            pick = ((np.cumsum(ties, axis=1) == rank[:, None] + 1) & ties).argmax(axis=1)
        chosen[:, n - 1] = pick + 1
        committed = states[pick, np.arange(lanes)]
        current = np.where(known, row.astype(np.uint8), committed)
    return totals, chosen


def min_error_sampled(
    lut: LookupTable, obs: Observation, gap_bound: int, rng: np.random.Generator
) -> ErrorEstimate:
    """One run of the independent-per-row gap search with random tie-breaking.

    Rows are processed in order; each commits a gap that minimizes the
    mismatch of the evolved completed row against the next row's known
    cells, drawing uniformly among tied gaps. The result can only
    overestimate the exact minimum. For a spatially complete observation
    the per-row choices are independent, so the smallest tied gap is taken,
    no randomness is consumed, and the value is exact.
    """
    responses = lut.response[None, :]
    if obs.is_complete:
        totals, chosen = scan_rows_batch(responses, obs.grid, gap_bound, None)
        exact = True
    else:
        draws = rng.random((1, obs.n_rows - 1))
        totals, chosen = scan_rows_batch(responses, obs.grid, gap_bound, draws)
        exact = False
    return ErrorEstimate(int(totals[0]), (tuple(int(t) for t in chosen[0]),), exact)


def min_error_set(
    lut: LookupTable,
    obs_set: ObservationSet,
    gap_bound: int,
    rng: np.random.Generator,
    resamples: int = 1,
) -> ErrorEstimate:
    """Estimated minimal total error of ``lut`` over an observation set.

    Gap choices are independent between observations, so the set value is
    the sum of per-observation estimates, each the minimum over
    ``resamples`` independent runs of :func:`min_error_sampled`. Streams
    are derived per (observation, resample), so a given (rng state,
    resamples) pair always reproduces the same value, and growing
    ``resamples`` extends rather than reshuffles the sampling.
    """
    if resamples < 1:
        raise ValueError("resamples must be positive")
    total = 0
    gaps: list[GapSequence] = []
    exact = True
    for obs, stream in zip(obs_set, rng.spawn(len(obs_set))):
        if obs.is_complete:
            est = min_error_sampled(lut, obs, gap_bound, stream)
        else:
            est = None
            for sub in stream.spawn(resamples):
                candidate = min_error_sampled(lut, obs, gap_bound, sub)
                if est is None or candidate.value < est.value:
                    est = candidate
            exact = False
        total += est.value
        gaps.append(est.gaps[0])
    return ErrorEstimate(total, tuple(gaps), exact)
