"""Core data types and serialization.

A time series is an n x p matrix (rows = timepoints, columns =
variables). A network is a dense p x p binary adjacency where
adj[i, j] = 1 means variable i influences variable j one step later;
the diagonal (self-influence) is a legal edge. All indices are 0-based
in memory. On disk, edge lists are 1-based TSV (source <TAB> target),
adjacency matrices are dense 0/1 CSV, and series are CSV with an
X1..Xp header.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ParseError


@dataclass(frozen=True)
class TimeSeries:
    """Observed multivariate series; values has shape (n, p)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise InvalidInputError(f"series must be 2-d, got shape {v.shape}")
        if v.shape[0] < 2 or v.shape[1] < 1:
            raise InvalidInputError(
                f"series needs >= 2 timepoints and >= 1 variable, got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("series contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def n_timepoints(self) -> int:
        return self.values.shape[0]

    @property
    def n_variables(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Network:
    """Directed graph as a dense 0/1 adjacency; adj[i, j]: i -> j."""

    adj: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adj)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError(f"adjacency must be square, got shape {a.shape}")
        if not np.all((a == 0) | (a == 1)):
            raise InvalidInputError("adjacency entries must be 0 or 1")
        object.__setattr__(self, "adj", a.astype(np.int8))

    @property
    def n_variables(self) -> int:
        return self.adj.shape[0]

    def edges(self) -> list[tuple[int, int]]:
        """Edge list as 0-based (source, target) pairs, row-major order."""
        src, dst = np.nonzero(self.adj)
        return list(zip(src.tolist(), dst.tolist()))

    @classmethod
    def from_edges(cls, edges, p: int) -> "Network":
        adj = np.zeros((p, p), dtype=np.int8)
        for s, t in edges:
            if not (0 <= s < p and 0 <= t < p):
                raise InvalidInputError(f"edge ({s}, {t}) outside 0..{p - 1}")
            adj[s, t] = 1
        return cls(adj)


# Standardized values are snapped to this power-of-two grid. Rescaling
# the raw data by a positive factor perturbs (x - mean) / std only in
# the last few ulps; the snap absorbs that noise so every downstream
# selection is exactly invariant to the measurement scale. The grid
# step (~1.5e-8) is far below every solver tolerance in the package.
_GRID = 2.0**26


def _snap(values: np.ndarray) -> np.ndarray:
    return np.round(values * _GRID) / _GRID


@dataclass(frozen=True)
class Standardization:
    """Per-column centering and scaling actually applied to a block.

    Constant columns get scale 1 (their standardized values are zeros),
    so transforming with these parameters never divides by zero.
    """

    mean: np.ndarray
    scale: np.ndarray

    def apply(self, values: np.ndarray) -> np.ndarray:
        return _snap((np.asarray(values, dtype=float) - self.mean) / self.scale)


def standardize_columns(values: np.ndarray) -> np.ndarray:
    """Zero-mean unit-variance columns (population variance, ddof=0).

    Columns whose entries are exactly identical are mapped to all zeros
    rather than divided by a near-zero scale.
    """
    out, _ = standardize_with_stats(values)
    return out


def standardize_with_stats(values: np.ndarray) -> tuple[np.ndarray, Standardization]:
    """Like standardize_columns but also returns the applied parameters."""
    v = np.asarray(values, dtype=float)
    constant = np.all(v == v[0:1, :], axis=0)
    mean = v.mean(axis=0)
    std = v.std(axis=0, ddof=0)
    safe = np.where(constant, 1.0, std)
    out = _snap((v - mean) / safe)
    out[:, constant] = 0.0
    return out, Standardization(mean=mean, scale=safe)


@dataclass(frozen=True)
class LagStats:
    """Standardization parameters for the two blocks of a lagged split."""

    x: Standardization
    y: Standardization


def build_lagged_pairs(
    series: TimeSeries,
) -> tuple[np.ndarray, np.ndarray, LagStats]:
    """One-step-lag regression data: X = rows 0..n-2, Y = rows 1..n-1.

    Both blocks are standardized independently, column by column, after
    the lag split, so the regression sees zero-mean unit-variance
    predictors and responses regardless of the raw measurement scale.
    Column j of Y is the response for target variable j; X holds the
    candidate regressors. The applied centering and scaling come back
    as the third element, so predictions can be mapped to raw units.
    """
    v = series.values
    if v.shape[0] < 3:
        raise InvalidInputError(
            f"need >= 3 timepoints for lagged regression, got {v.shape[0]}"
        )
    X, xs = standardize_with_stats(v[:-1, :])
    Y, ys = standardize_with_stats(v[1:, :])
    return X, Y, LagStats(x=xs, y=ys)


# ---------------------------------------------------------------------------
# file formats


def save_series_csv(path, series: TimeSeries) -> None:
    """CSV with header X1..Xp, one row per timepoint."""
    p = series.n_variables
    header = ",".join(f"X{j + 1}" for j in range(p))
    np.savetxt(path, series.values, delimiter=",", header=header,
               comments="", fmt="%.10g")


def load_series_csv(path) -> TimeSeries:
    try:
        with open(path, "r", newline="") as fh:
            reader = csv.reader(fh)
            rows = [row for row in reader if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise ParseError(f"cannot read series file {path}: {exc}") from exc
    if len(rows) < 2:
        raise ParseError(f"{path}: need a header plus at least 2 data rows")
    header = [c.strip() for c in rows[0]]
    p = len(header)
    expected = [f"X{j + 1}" for j in range(p)]
    if header != expected:
        raise ParseError(
            f"{path}: header must be {','.join(expected[:3])},... got {','.join(header[:3])},..."
        )
    data = []
    for ln, row in enumerate(rows[1:], start=2):
        if len(row) != p:
            raise ParseError(f"{path}:{ln}: expected {p} columns, got {len(row)}")
        try:
            data.append([float(c) for c in row])
        except ValueError as exc:
            raise ParseError(f"{path}:{ln}: non-numeric value ({exc})") from exc
    arr = np.asarray(data, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{path}: series contains non-finite values")
    try:
        return TimeSeries(arr)
    except InvalidInputError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_adjacency_csv(path, network: Network) -> None:
    """Dense 0/1 matrix, no header."""
    np.savetxt(path, network.adj, delimiter=",", fmt="%d")


def load_adjacency_csv(path) -> Network:
    try:
        with open(path, "r", newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise ParseError(f"cannot read adjacency file {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: empty adjacency file")
    p = len(rows)
    adj = np.zeros((p, p), dtype=np.int8)
    for i, row in enumerate(rows):
        if len(row) != p:
            raise ParseError(f"{path}: row {i + 1} has {len(row)} columns, expected {p}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise ParseError(f"{path}: entry ({i + 1},{j + 1}) must be 0 or 1, got {cell!r}")
            adj[i, j] = int(cell)
    return Network(adj)


def save_edges_tsv(path, network: Network) -> None:
    """1-based source<TAB>target lines, row-major edge order."""
    with open(path, "w") as fh:
        for s, t in network.edges():
            fh.write(f"{s + 1}\t{t + 1}\n")


def load_edges_tsv(path, p: int) -> Network:
    try:
        with open(path, "r") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read edge file {path}: {exc}") from exc
    edges = []
    for ln, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"{path}:{ln}: expected 'source<TAB>target', got {line!r}")
        try:
            s, t = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}:{ln}: non-integer endpoint ({exc})") from exc
        if not (1 <= s <= p and 1 <= t <= p):
            raise ParseError(f"{path}:{ln}: endpoint outside 1..{p}")
        edges.append((s - 1, t - 1))
    return Network.from_edges(edges, p)


def save_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path) -> dict:
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
