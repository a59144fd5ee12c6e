"""Sample containers and time-window embeddings.

Every causality measure in this package is a conditional mutual information
(or a regression) between three blocks of coordinates built from lagged
copies of the raw channels:

    A  the candidate source block,
    B  the target block (always the single coordinate y_t for the
       information measures),
    C  the conditioning block (past windows and, for some kinds, the
       present sample of the side channels).

``embed_measure`` turns a ``SampleMatrix`` plus a measure kind into a
``PointCloud`` whose columns are laid out exactly this way.  The same
layout (channel, lag) bookkeeping is exposed through ``measure_layout`` so
the closed-form Gaussian oracle can address the identical coordinates of a
stationary joint covariance; keeping one layout function for both is what
makes estimator-vs-oracle comparisons meaningful.

Lag convention: lag 0 is the present sample, lag L is L steps in the past.
Within a channel's window the columns are ordered oldest first,
``(t-d, ..., t-1)``.  Embedded row r corresponds to original time index
``r + window``.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

__all__ = [
    "MeasureKind",
    "SideHorizon",
    "LagSpec",
    "SampleMatrix",
    "PointCloud",
    "BlockLayout",
    "measure_layout",
    "embed_measure",
    "embed_delta_i",
    "split_blocks",
    "read_csv",
    "write_csv",
]


class MeasureKind(enum.Enum):
    """The causality measures this package can estimate.

    The three instantaneous-exchange kinds share one embedding; they
    differ only in whether side channels exist and whether the side
    present sample joins the conditioning block.
    """

    TRANSFER_ENTROPY = "transfer_entropy"
    COND_TRANSFER_ENTROPY = "cond_transfer_entropy"
    INSTANT_EXCHANGE = "instant_exchange"
    UNCOND_INSTANT_EXCHANGE = "uncond_instant_exchange"
    COND_INSTANT_EXCHANGE = "cond_instant_exchange"
    DELTA_I = "delta_i"
    GEWEKE_DYNAMIC = "geweke_dynamic"
    GEWEKE_COND_DYNAMIC = "geweke_cond_dynamic"
    GEWEKE_INSTANT = "geweke_instant"
    GEWEKE_COND_INSTANT = "geweke_cond_instant"

    @property
    def requires_side(self) -> bool:
        return self in _SIDE_KINDS

    @property
    def is_geweke(self) -> bool:
        return self in (
            MeasureKind.GEWEKE_DYNAMIC,
            MeasureKind.GEWEKE_COND_DYNAMIC,
            MeasureKind.GEWEKE_INSTANT,
            MeasureKind.GEWEKE_COND_INSTANT,
        )

    @property
    def is_instantaneous(self) -> bool:
        """Symmetric in source/target: lag-0 coupling measures."""
        return self in (
            MeasureKind.INSTANT_EXCHANGE,
            MeasureKind.UNCOND_INSTANT_EXCHANGE,
            MeasureKind.COND_INSTANT_EXCHANGE,
            MeasureKind.GEWEKE_INSTANT,
            MeasureKind.GEWEKE_COND_INSTANT,
        )


_SIDE_KINDS = frozenset(
    {
        MeasureKind.COND_TRANSFER_ENTROPY,
        MeasureKind.UNCOND_INSTANT_EXCHANGE,
        MeasureKind.COND_INSTANT_EXCHANGE,
        MeasureKind.DELTA_I,
        MeasureKind.GEWEKE_COND_DYNAMIC,
        MeasureKind.GEWEKE_COND_INSTANT,
    }
)


class SideHorizon(enum.Enum):
    """How much of the side channels enters the conditioning block."""

    PAST_ONLY = "past_only"
    UP_TO_PRESENT = "up_to_present"


@dataclass(frozen=True)
class LagSpec:
    """Embedding window.

    Parameters
    ----------
    d_lag : int
        Window length d >= 1; past blocks cover lags 1..d.
    side_horizon : SideHorizon
        Only consulted for the generic INSTANT_EXCHANGE kind with side
        channels; the UNCOND/COND kinds fix their own horizon.
    """

    d_lag: int = 2
    side_horizon: SideHorizon = SideHorizon.PAST_ONLY

    def __post_init__(self):
        if not isinstance(self.d_lag, (int, np.integer)) or self.d_lag < 1:
            raise DataError(f"d_lag must be a positive integer, got {self.d_lag!r}")


class SampleMatrix:
    """N samples of d named channels, float64, validated finite.

    Parameters
    ----------
    data : array_like, shape (n_samples, n_channels)
    names : sequence of str
        Unique channel names, one per column.
    """

    def __init__(self, data, names: Sequence[str]):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise DataError(f"sample data must be 2-D, got shape {arr.shape}")
        names = tuple(str(n) for n in names)
        if len(names) != arr.shape[1]:
            raise DataError(
                f"{len(names)} names for {arr.shape[1]} columns"
            )
        if len(set(names)) != len(names):
            dup = sorted(n for n in set(names) if names.count(n) > 1)
            raise DataError(f"duplicate channel names: {dup}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise DataError(
                f"non-finite value at sample {bad[0]}, channel {names[bad[1]]!r}"
            )
        self.data = arr
        self.names = names

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_channels(self) -> int:
        return self.data.shape[1]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(
                f"unknown channel {name!r}; available: {list(self.names)}"
            ) from None

    def channel(self, name: str) -> np.ndarray:
        return self.data[:, self.index(name)]

    def select(self, names: Sequence[str]) -> "SampleMatrix":
        cols = [self.index(n) for n in names]
        return SampleMatrix(self.data[:, cols], names)

    def zscored(self) -> "SampleMatrix":
        """Per-channel standardization; constant channels are rejected."""
        sd = self.data.std(axis=0, ddof=0)
        flat = np.nonzero(sd == 0)[0]
        if flat.size:
            raise DataError(
                f"cannot z-score constant channel {self.names[flat[0]]!r}"
            )
        return SampleMatrix((self.data - self.data.mean(axis=0)) / sd, self.names)

    def jittered(self, seed, amplitude: float = 1e-10) -> "SampleMatrix":
        """Add tiny uniform noise to break ties from quantized data.

        Amplitude is relative to each channel's standard deviation
        (constant channels fall back to scale 1).
        """
        rng = np.random.default_rng(seed)
        scale = self.data.std(axis=0, ddof=0)
        scale[scale == 0] = 1.0
        noise = rng.uniform(-1.0, 1.0, size=self.data.shape)
        return SampleMatrix(self.data + amplitude * scale * noise, self.names)

    def __repr__(self):
        return f"SampleMatrix(n_samples={self.n_samples}, names={list(self.names)})"


class PointCloud:
    """Embedded points with labelled coordinate blocks.

    ``blocks`` is an ordered tuple of ``(label, (start, stop))`` entries
    partitioning the coordinate axis; labels are 'A', 'B', 'C'.  A block
    may be empty (start == stop), which is how the unconditional kinds
    represent a missing C.
    """

    def __init__(self, points, blocks: Sequence[tuple[str, tuple[int, int]]]):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise DataError(f"points must be 2-D, got shape {pts.shape}")
        blocks = tuple((str(lab), (int(r[0]), int(r[1]))) for lab, r in blocks)
        cursor = 0
        for lab, (start, stop) in blocks:
            if start != cursor or stop < start:
                raise DataError(f"block {lab!r} range ({start}, {stop}) does not tile")
            cursor = stop
        if cursor != pts.shape[1]:
            raise DataError(
                f"blocks cover {cursor} coordinates, points have {pts.shape[1]}"
            )
        if len({lab for lab, _ in blocks}) != len(blocks):
            raise DataError("duplicate block labels")
        self.points = pts
        self.blocks = blocks
        self._ranges = {lab: r for lab, r in blocks}

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def block_range(self, label: str) -> tuple[int, int]:
        try:
            return self._ranges[label]
        except KeyError:
            raise DataError(f"no block {label!r} in cloud") from None

    def block(self, label: str) -> np.ndarray:
        start, stop = self.block_range(label)
        return self.points[:, start:stop]

    def block_dim(self, label: str) -> int:
        start, stop = self.block_range(label)
        return stop - start

    def replace_block(self, label: str, values: np.ndarray) -> "PointCloud":
        start, stop = self.block_range(label)
        if values.shape != (self.n_points, stop - start):
            raise DataError(
                f"replacement for block {label!r} has shape {values.shape}, "
                f"expected {(self.n_points, stop - start)}"
            )
        pts = self.points.copy()
        pts[:, start:stop] = values
        return PointCloud(pts, self.blocks)

    def __repr__(self):
        dims = {lab: stop - start for lab, (start, stop) in self.blocks}
        return f"PointCloud(n_points={self.n_points}, dims={dims})"


@dataclass(frozen=True)
class BlockLayout:
    """Symbolic coordinate layout of a measure's point cloud.

    ``entries`` maps each coordinate, in cloud column order, to a
    ``(block_label, channel_name, lag)`` triple.  ``window`` is the
    largest lag used; embedding drops the first ``window`` samples.
    ``c_drop`` marks the slice of block C (relative to C's start) that
    the reduced DeltaI cloud removes, None for every other kind.
    """

    entries: tuple[tuple[str, str, int], ...]
    window: int
    c_drop: tuple[int, int] | None = None

    def block_entries(self, label: str) -> tuple[tuple[str, int], ...]:
        return tuple((ch, lag) for lab, ch, lag in self.entries if lab == label)

    def block_ranges(self) -> tuple[tuple[str, tuple[int, int]], ...]:
        ranges = []
        cursor = 0
        for lab in ("A", "B", "C"):
            n = sum(1 for entry in self.entries if entry[0] == lab)
            ranges.append((lab, (cursor, cursor + n)))
            cursor += n
        return tuple(ranges)


def _past(channel: str, window: int) -> list[tuple[str, int]]:
    # oldest first: lags window, window-1, ..., 1
    return [(channel, lag) for lag in range(window, 0, -1)]


def _validate_roles(names: Iterable[str], x: str, y: str, side: Sequence[str]):
    known = set(names)
    for ch in [x, y, *side]:
        if ch not in known:
            raise DataError(f"unknown channel {ch!r}; available: {sorted(known)}")
    if x == y:
        raise DataError(f"source and target are both {x!r}")
    side = list(side)
    for ch in side:
        if ch in (x, y):
            raise DataError(f"side channel {ch!r} collides with source/target")
    if len(set(side)) != len(side):
        dup = sorted(ch for ch in set(side) if side.count(ch) > 1)
        raise DataError(f"duplicate side channels: {dup}")


def measure_layout(
    kind: MeasureKind,
    x: str,
    y: str,
    side: Sequence[str],
    window: int,
    side_horizon: SideHorizon = SideHorizon.PAST_ONLY,
) -> BlockLayout:
    """Coordinate layout for measure ``kind`` with source x, target y.

    ``window`` is the embedding window (d_lag for the information kinds,
    ar_order for the Geweke kinds).  Returns coordinates grouped A, B, C,
    each channel's window laid out oldest first.
    """
    side = list(side)
    if kind.requires_side and not side:
        raise DataError(f"{kind.value} requires at least one side channel")
    if not kind.requires_side and kind is not MeasureKind.INSTANT_EXCHANGE and side:
        raise DataError(f"{kind.value} is bivariate, got side={side}")
    if window < 1:
        raise DataError(f"window must be >= 1, got {window}")

    a: list[tuple[str, int]] = []
    c: list[tuple[str, int]] = []
    c_drop = None

    if kind in (MeasureKind.TRANSFER_ENTROPY, MeasureKind.COND_TRANSFER_ENTROPY):
        a = _past(x, window)
        c = _past(y, window)
        for ch in side:
            c += _past(ch, window)
    elif kind in (
        MeasureKind.INSTANT_EXCHANGE,
        MeasureKind.UNCOND_INSTANT_EXCHANGE,
        MeasureKind.COND_INSTANT_EXCHANGE,
    ):
        if kind is MeasureKind.UNCOND_INSTANT_EXCHANGE:
            horizon = SideHorizon.PAST_ONLY
        elif kind is MeasureKind.COND_INSTANT_EXCHANGE:
            horizon = SideHorizon.UP_TO_PRESENT
        else:
            horizon = side_horizon
        a = [(x, 0)]
        c = _past(x, window) + _past(y, window)
        for ch in side:
            c += _past(ch, window)
        if horizon is SideHorizon.UP_TO_PRESENT:
            # appended last so past_only -> up_to_present only adds coords
            c += [(ch, 0) for ch in side]
    elif kind is MeasureKind.DELTA_I:
        a = [(ch, 0) for ch in side]
        c = _past(x, window) + _past(y, window)
        for ch in side:
            c += _past(ch, window)
        c_drop = (0, window)  # source past sits first in C
    elif kind in (MeasureKind.GEWEKE_DYNAMIC, MeasureKind.GEWEKE_COND_DYNAMIC):
        a = _past(x, window)
        c = _past(y, window)
        for ch in side:
            c += _past(ch, window)
    elif kind in (MeasureKind.GEWEKE_INSTANT, MeasureKind.GEWEKE_COND_INSTANT):
        a = [(x, 0)]
        c = _past(x, window) + _past(y, window)
        for ch in side:
            c += _past(ch, window) + [(ch, 0)]
    else:  # pragma: no cover - enum is closed
        raise DataError(f"unhandled kind {kind}")

    entries = tuple(
        [("A", ch, lag) for ch, lag in a]
        + [("B", y, 0)]
        + [("C", ch, lag) for ch, lag in c]
    )
    return BlockLayout(entries=entries, window=window, c_drop=c_drop)


def _embed_layout(data: SampleMatrix, layout: BlockLayout) -> PointCloud:
    w = layout.window
    n = data.n_samples
    if n <= w:
        raise DataError(
            f"need more than {w} samples to embed with window {w}, got {n}"
        )
    m = n - w
    cols = np.empty((m, len(layout.entries)))
    for j, (_, ch, lag) in enumerate(layout.entries):
        col = data.channel(ch)
        cols[:, j] = col[w - lag : n - lag]
    # order blocks A, B, C by construction of layout.entries
    return PointCloud(cols, layout.block_ranges())


def embed_measure(
    data: SampleMatrix,
    x: str,
    y: str,
    side: Sequence[str],
    lag: LagSpec,
    kind: MeasureKind,
    window: int | None = None,
) -> PointCloud:
    """Embed ``data`` into the A/B/C point cloud for ``kind``.

    Parameters
    ----------
    data : SampleMatrix
    x, y : str
        Source and target channel names (x drives, y receives).
    side : sequence of str
        Side channels, disjoint from x and y.
    lag : LagSpec
        Window and side horizon.  ``window`` overrides ``lag.d_lag`` when
        given; the Geweke wrappers use this to pass ar_order.
    kind : MeasureKind

    Returns
    -------
    PointCloud with n_samples - window points.
    """
    _validate_roles(data.names, x, y, side)
    w = lag.d_lag if window is None else int(window)
    layout = measure_layout(kind, x, y, side, w, lag.side_horizon)
    return _embed_layout(data, layout)


def embed_delta_i(
    data: SampleMatrix,
    x: str,
    y: str,
    side: Sequence[str],
    lag: LagSpec,
) -> tuple[PointCloud, PointCloud]:
    """The two DeltaI clouds: full conditioning, and with x's past removed.

    DeltaI is the difference of two conditional mutual informations that
    share the A (side present) and B (target present) blocks; the second
    drops the source past from C.  Both clouds have the same rows, so a
    row permutation of B applies to either consistently.
    """
    _validate_roles(data.names, x, y, side)
    layout = measure_layout(MeasureKind.DELTA_I, x, y, side, lag.d_lag)
    full = _embed_layout(data, layout)
    drop0, drop1 = layout.c_drop
    c0, _ = full.block_range("C")
    keep = [
        j
        for j in range(full.dim)
        if not (c0 + drop0 <= j < c0 + drop1)
    ]
    n_a = full.block_dim("A")
    n_b = full.block_dim("B")
    n_c = full.block_dim("C") - (drop1 - drop0)
    reduced = PointCloud(
        full.points[:, keep],
        (
            ("A", (0, n_a)),
            ("B", (n_a, n_a + n_b)),
            ("C", (n_a + n_b, n_a + n_b + n_c)),
        ),
    )
    return full, reduced


def split_blocks(data: SampleMatrix, n_blocks: int, block_len: int) -> list[SampleMatrix]:
    """Cut a long recording into consecutive disjoint blocks.

    Raises DataError when the recording is shorter than
    ``n_blocks * block_len``, naming required vs available samples.
    """
    if n_blocks < 1 or block_len < 1:
        raise DataError(
            f"n_blocks and block_len must be positive, got {n_blocks}, {block_len}"
        )
    need = n_blocks * block_len
    if data.n_samples < need:
        raise DataError(
            f"need {need} samples for {n_blocks} blocks of {block_len}, "
            f"have {data.n_samples}"
        )
    return [
        SampleMatrix(data.data[i * block_len : (i + 1) * block_len], data.names)
        for i in range(n_blocks)
    ]


def read_csv(path) -> SampleMatrix:
    """Load a SampleMatrix from CSV with a header row of channel names."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        names = [h.strip() for h in header]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise DataError(
                    f"{path}:{lineno}: {len(row)} fields, expected {len(names)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    return SampleMatrix(np.asarray(rows), names)


def write_csv(data: SampleMatrix, path) -> None:
    """Write a SampleMatrix as CSV, full float64 round-trip precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(data.names)
        for row in data.data:
            writer.writerow([format(v, ".17g") for v in row])
