"""Grid-sampled field types plus the channel and resampling operations shared
by the solvers, the diffusion process, the model, and the evaluation harness.

Grid convention: vertex-centered, corner-aligned, row-major storage with x
fastest.  On the unit box the i-th vertex sits at i/(n-1); on the unit torus
the grid covers [0, 1) with spacing 1/n.  All types are immutable after
construction, so every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DOMAIN_TORUS = "unit-torus"
DOMAIN_BOX = "unit-box"
_DOMAINS = (DOMAIN_TORUS, DOMAIN_BOX)


class FieldError(ValueError):
    """A field, channel-stack, or normalization contract was violated."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScalarField2D:
    """A single-channel real field sampled on a regular nx-by-ny grid."""

    nx: int
    ny: int
    values: np.ndarray
    domain: str = DOMAIN_BOX

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise FieldError(f"grid must be at least 2x2, got {self.nx}x{self.ny}")
        if self.domain not in _DOMAINS:
            raise FieldError(f"unknown domain {self.domain!r}")
        v = np.asarray(self.values)
        if v.dtype not in (np.float32, np.float64):
            v = v.astype(np.float64)
        v = v.reshape(-1)
        if v.size != self.nx * self.ny:
            raise FieldError(
                f"values length {v.size} != nx*ny = {self.nx * self.ny}"
            )
        if not np.all(np.isfinite(v)):
            raise FieldError("field contains non-finite values")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def grid(self) -> np.ndarray:
        """The values as a read-only (ny, nx) array."""
        return self.values.reshape(self.ny, self.nx)

    @classmethod
    def from_grid(cls, grid: np.ndarray, domain: str = DOMAIN_BOX) -> "ScalarField2D":
        grid = np.asarray(grid)
        if grid.ndim != 2:
            raise FieldError(f"expected a 2-D array, got shape {grid.shape}")
        ny, nx = grid.shape
        return cls(nx=nx, ny=ny, values=grid.reshape(-1), domain=domain)


@dataclass(frozen=True)
class ChannelStack:
    """An ordered list of same-grid scalar fields with per-channel names."""

    channels: tuple[ScalarField2D, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        if len(self.channels) < 1:
            raise FieldError("a channel stack needs at least one channel")
        if len(self.names) != len(self.channels):
            raise FieldError("one name per channel required")
        first = self.channels[0]
        for ch in self.channels[1:]:
            if (ch.nx, ch.ny) != (first.nx, first.ny):
                raise FieldError("all channels must share the same grid")
            if ch.domain != first.domain:
                raise FieldError("all channels must share the same domain")

    @property
    def nx(self) -> int:
        return self.channels[0].nx

    @property
    def ny(self) -> int:
        return self.channels[0].ny

    @property
    def domain(self) -> str:
        return self.channels[0].domain

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    def as_array(self, dtype=None) -> np.ndarray:
        """Channels stacked as a writable (C, ny, nx) array."""
        out = np.stack([ch.grid for ch in self.channels])
        return out.astype(dtype) if dtype is not None else out.copy()

    @classmethod
    def from_array(
        cls, arr: np.ndarray, names: Sequence[str], domain: str = DOMAIN_BOX
    ) -> "ChannelStack":
        arr = np.asarray(arr)
        if arr.ndim != 3:
            raise FieldError(f"expected a (C, ny, nx) array, got shape {arr.shape}")
        fields = tuple(ScalarField2D.from_grid(a, domain=domain) for a in arr)
        return cls(channels=fields, names=tuple(names))


@dataclass(frozen=True)
class SampleRecord:
    """One (condition, target) training or test pair.

    lead_time is the PDE horizon between condition and target and is present
    iff the underlying equation is non-stationary.
    """

    condition: ChannelStack
    target: ChannelStack
    lead_time: float | None = None

    def __post_init__(self):
        c, t = self.condition, self.target
        if (c.nx, c.ny) != (t.nx, t.ny):
            raise FieldError("condition and target must share the same grid")
        if self.lead_time is not None:
            lt = float(self.lead_time)
            if not np.isfinite(lt) or lt < 0:
                raise FieldError(f"lead_time must be a nonnegative real, got {lt}")
            object.__setattr__(self, "lead_time", lt)


@dataclass(frozen=True)
class NormStats:
    """Per-channel z-score statistics.  Constant channels carry std = 1."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        s = np.asarray(self.std, dtype=np.float64).reshape(-1)
        if m.size != s.size or m.size == 0:
            raise FieldError("mean and std must be non-empty and equal length")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(s))):
            raise FieldError("non-finite normalization statistics")
        if np.any(s <= 0):
            raise FieldError("std must be strictly positive for every channel")
        object.__setattr__(self, "mean", _readonly(m))
        object.__setattr__(self, "std", _readonly(s))

    @property
    def n_channels(self) -> int:
        return self.mean.size

    def split(self, n: int) -> tuple["NormStats", "NormStats"]:
        """Split the channel layout after the first n channels."""
        if not 0 < n < self.n_channels:
            raise FieldError(f"split point {n} out of range")
        return (
            NormStats(self.mean[:n], self.std[:n]),
            NormStats(self.mean[n:], self.std[n:]),
        )


# Channels flatter than this (relative to their magnitude) are treated as
# constant and get the std = 1 convention.
_CONST_STD_TOL = 1e-12


def compute_norm_stats(dataset: Sequence[SampleRecord]) -> NormStats:
    """Empirical per-channel mean/std over all samples of a dataset.

    The channel layout is the record layout: condition channels followed by
    target channels.  Accumulation is single-pass in float64.
    """
    records = list(dataset)
    if not records:
        raise FieldError("cannot compute statistics of an empty dataset")
    c_x = records[0].condition.n_channels
    c_y = records[0].target.n_channels
    n_ch = c_x + c_y
    total = np.zeros(n_ch)
    total_sq = np.zeros(n_ch)
    count = 0
    for rec in records:
        if rec.condition.n_channels != c_x or rec.target.n_channels != c_y:
            raise FieldError("inconsistent channel layout across records")
        vals = np.concatenate(
            [rec.condition.as_array(np.float64), rec.target.as_array(np.float64)]
        ).reshape(n_ch, -1)
        total += vals.sum(axis=1)
        total_sq += (vals**2).sum(axis=1)
        count += vals.shape[1]
    mean = total / count
    var = np.maximum(total_sq / count - mean**2, 0.0)
    std = np.sqrt(var)
    flat = std <= _CONST_STD_TOL * np.maximum(1.0, np.abs(mean))
    std[flat] = 1.0
    return NormStats(mean=mean, std=std)


def _check_stats(stack: ChannelStack, stats: NormStats) -> None:
    if stack.n_channels != stats.n_channels:
        raise FieldError(
            f"channel count {stack.n_channels} does not match "
            f"statistics for {stats.n_channels} channels"
        )


def normalize(stack: ChannelStack, stats: NormStats) -> ChannelStack:
    """Map each channel to (v - mean)/std."""
    _check_stats(stack, stats)
    arr = stack.as_array(np.float64)
    arr = (arr - stats.mean[:, None, None]) / stats.std[:, None, None]
    arr = arr.astype(stack.channels[0].values.dtype)
    return ChannelStack.from_array(arr, stack.names, domain=stack.domain)


def denormalize(stack: ChannelStack, stats: NormStats) -> ChannelStack:
    """Exact inverse of normalize: v*std + mean."""
    _check_stats(stack, stats)
    arr = stack.as_array(np.float64)
    arr = arr * stats.std[:, None, None] + stats.mean[:, None, None]
    arr = arr.astype(stack.channels[0].values.dtype)
    return ChannelStack.from_array(arr, stack.names, domain=stack.domain)


def subsample(field: ScalarField2D, stride: int) -> ScalarField2D:
    """Keep every stride-th vertex per axis; output values are an exact
    subset of the input values."""
    stride = int(stride)
    if stride < 1:
        raise FieldError(f"stride must be a positive integer, got {stride}")
    if (field.nx - 1) % stride or (field.ny - 1) % stride:
        raise FieldError(
            f"stride {stride} does not divide grid extents "
            f"({field.nx - 1}, {field.ny - 1})"
        )
    sub = field.grid[::stride, ::stride]
    return ScalarField2D.from_grid(sub, domain=field.domain)


def _axis_weights(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray]:
    """Corner-aligned source indices and fractional offsets for one axis."""
    pos = np.linspace(0.0, n_in - 1.0, n_out)
    i0 = np.minimum(pos.astype(np.int64), n_in - 2)
    frac = pos - i0
    return i0, frac


def resample_bilinear_array(arr: np.ndarray, ny2: int, nx2: int) -> np.ndarray:
    """Separable corner-aligned bilinear resampling of (..., ny, nx) arrays."""
    if nx2 < 2 or ny2 < 2:
        raise FieldError("target resolution must be at least 2 per axis")
    iy, fy = _axis_weights(arr.shape[-2], ny2)
    ix, fx = _axis_weights(arr.shape[-1], nx2)
    mid = arr[..., iy, :] * (1.0 - fy)[:, None] + arr[..., iy + 1, :] * fy[:, None]
    return mid[..., :, ix] * (1.0 - fx) + mid[..., :, ix + 1] * fx


def bilinear_variance_map(ny_in: int, nx_in: int, ny2: int, nx2: int) -> np.ndarray:
    """Per-pixel variance of corner-aligned bilinear resampling applied to
    unit-variance white noise: the sum of squared interpolation weights."""
    _, fy = _axis_weights(ny_in, ny2)
    _, fx = _axis_weights(nx_in, nx2)
    gy = (1.0 - fy) ** 2 + fy**2
    gx = (1.0 - fx) ** 2 + fx**2
    return np.outer(gy, gx)


def resample_bilinear(field: ScalarField2D, nx2: int, ny2: int) -> ScalarField2D:
    """Bilinear interpolation on the unit box with corner alignment.

    Exact on fields that are linear in x and y.
    """
    out = resample_bilinear_array(field.grid.astype(np.float64), ny2, nx2)
    return ScalarField2D.from_grid(
        out.astype(field.values.dtype), domain=field.domain
    )


def concat_channels(a: ChannelStack, b: ChannelStack) -> ChannelStack:
    """Channels of a followed by channels of b."""
    if (a.nx, a.ny) != (b.nx, b.ny):
        raise FieldError("grid mismatch between channel stacks")
    if a.domain != b.domain:
        raise FieldError("domain mismatch between channel stacks")
    return ChannelStack(channels=a.channels + b.channels, names=a.names + b.names)


def split_channels(stack: ChannelStack, n: int) -> tuple[ChannelStack, ChannelStack]:
    """Inverse of concat_channels at the given split point."""
    if not 0 < n < stack.n_channels:
        raise FieldError(f"split point {n} out of range")
    return (
        ChannelStack(stack.channels[:n], stack.names[:n]),
        ChannelStack(stack.channels[n:], stack.names[n:]),
    )


def coordinate_channels(nx: int, ny: int, domain: str) -> ChannelStack:
    """Normalized coordinate channels realizing the geometry input on a
    regular grid: x in [0,1] on the box, [0,1) on the torus."""
    if domain == DOMAIN_BOX:
        xs = np.linspace(0.0, 1.0, nx)
        ys = np.linspace(0.0, 1.0, ny)
    elif domain == DOMAIN_TORUS:
        xs = np.arange(nx) / nx
        ys = np.arange(ny) / ny
    else:
        raise FieldError(f"unknown domain {domain!r}")
    gx, gy = np.meshgrid(xs, ys)
    return ChannelStack.from_array(
        np.stack([gx, gy]), names=("coord_x", "coord_y"), domain=domain
    )
