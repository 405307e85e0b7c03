"""Tensor grids over axis-aligned boxes, periodic or Dirichlet per axis."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np


class DomainError(ValueError):
    """Raised for an invalid domain description."""


class GridIndexError(IndexError):
    """Raised when a stencil needs a neighbor the grid does not have."""


@dataclass(frozen=True)
class Domain:
    """Uniform grid on a box in R^N.

    A periodic axis identifies its two faces: nodes are ``lower + i*h``
    with ``h = (upper - lower)/n`` and the upper face omitted.  A
    non-periodic axis includes both endpoints, ``h = (upper - lower)/(n-1)``.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    resolution: tuple[int, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        n = len(self.lower)
        for name, t in (("upper", self.upper), ("resolution", self.resolution),
                        ("periodic", self.periodic)):
            if len(t) != n:
                raise DomainError(f"{name} has length {len(t)}, expected {n}")
        for i in range(n):
            if not self.lower[i] < self.upper[i]:
                raise DomainError(
                    f"axis {i}: lower {self.lower[i]} must be < upper {self.upper[i]}")
            if self.resolution[i] < 2:
                raise DomainError(f"axis {i}: resolution must be >= 2")

    @classmethod
    def box(cls, lower: Sequence[float], upper: Sequence[float],
            resolution: Sequence[int], periodic: Sequence[bool] | bool = False) -> "Domain":
        lower = tuple(float(x) for x in lower)
        if isinstance(periodic, bool):
            periodic = (periodic,) * len(lower)
        return cls(lower,
                   tuple(float(x) for x in upper),
                   tuple(int(k) for k in resolution),
                   tuple(bool(p) for p in periodic))

    @classmethod
    def interval(cls, lo: float, hi: float, n: int, periodic: bool = False) -> "Domain":
        return cls.box([lo], [hi], [n], [periodic])

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.resolution

    @cached_property
    def spacing(self) -> tuple[float, ...]:
        out = []
        for lo, hi, n, per in zip(self.lower, self.upper, self.resolution, self.periodic):
            out.append((hi - lo) / n if per else (hi - lo) / (n - 1))
        return tuple(out)

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        """1D node coordinates per axis."""
        out = []
        for lo, n, h in zip(self.lower, self.resolution, self.spacing):
            out.append(lo + h * np.arange(n))
        return tuple(out)

    @cached_property
    def extent(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    @property
    def num_nodes(self) -> int:
        return int(np.prod(self.resolution))

    @cached_property
    def diameter(self) -> float:
        return float(np.sqrt(sum(e * e for e in self.extent)))

    @cached_property
    def cell_half_diagonal(self) -> float:
        return 0.5 * float(np.sqrt(sum(h * h for h in self.spacing)))

    def point(self, index: Sequence[int]) -> np.ndarray:
        return np.array([ax[i] for ax, i in zip(self.axes, index)])

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*self.axes, indexing="ij")

    def all_points(self) -> np.ndarray:
        """All node coordinates, shape (num_nodes, N), x-major (C) order."""
        mesh = self.meshgrid()
        return np.column_stack([m.ravel() for m in mesh])

    def contains(self, p: np.ndarray) -> bool:
        """Whether a point lies in the grid hull (periodic axes always do)."""
        p = np.asarray(p, dtype=float)
        for i, (lo, hi, per) in enumerate(zip(self.lower, self.upper, self.periodic)):
            if not per and not (lo <= p[i] <= hi):
                return False
        return True

    def wrap(self, p: np.ndarray) -> np.ndarray:
        """Map periodic coordinates into [lower, upper)."""
        q = np.array(p, dtype=float)
        for i, (lo, per, e) in enumerate(zip(self.lower, self.periodic, self.extent)):
            if per:
                q[..., i] = lo + np.mod(q[..., i] - lo, e)
        return q

    def nearest_index(self, p: np.ndarray) -> tuple[int, ...]:
        p = self.wrap(np.asarray(p, dtype=float))
        idx = []
        for i, (lo, h, n, per) in enumerate(
                zip(self.lower, self.spacing, self.resolution, self.periodic)):
            j = int(np.rint((p[i] - lo) / h))
            idx.append(j % n if per else min(max(j, 0), n - 1))
        return tuple(idx)

    def is_boundary_index(self, index: Sequence[int]) -> bool:
        """True when the index sits on a face of a non-periodic axis."""
        for i, (j, n, per) in enumerate(zip(index, self.resolution, self.periodic)):
            if not per and (j == 0 or j == n - 1):
                return True
        return False

    def boundary_mask(self) -> np.ndarray:
        """Boolean array marking nodes on non-periodic faces."""
        mask = np.zeros(self.shape, dtype=bool)
        for i, (n, per) in enumerate(zip(self.resolution, self.periodic)):
            if per:
                continue
            sl = [slice(None)] * self.dimension
            sl[i] = 0
            mask[tuple(sl)] = True
            sl[i] = n - 1
            mask[tuple(sl)] = True
        return mask

    def describe(self) -> str:
        parts = []
        for lo, hi, n, per in zip(self.lower, self.upper, self.resolution, self.periodic):
            kind = "torus" if per else "interval"
            parts.append(f"[{lo}, {hi}] {kind} n={n}")
        return " x ".join(parts)


def interp_stencil(domain: Domain, point: np.ndarray,
                   out_of_hull: str = "error") -> list[tuple[tuple[int, ...], float]]:
    """Multilinear interpolation stencil for an arbitrary point.

    Returns ``[(multi_index, weight), ...]`` with nonnegative weights summing
    to one (a convex combination, so interpolation is monotone).  Periodic
    axes wrap.  On non-periodic axes, points beyond the hull either raise
    (``out_of_hull='error'``) or are clamped to the face
    (``out_of_hull='clamp'``, i.e. constant extension).
    """
    p = np.asarray(point, dtype=float)
    per_axis: list[list[tuple[int, float]]] = []
    for i, (lo, hi, h, n, per) in enumerate(zip(
            domain.lower, domain.upper, domain.spacing,
            domain.resolution, domain.periodic)):
        c = p[i]
        if per:
            t = (c - lo) / h
            j = int(np.floor(t)) % n
            f = (t - np.floor(t))
            per_axis.append([(j, 1.0 - f), ((j + 1) % n, f)] if f > 0 else [(j, 1.0)])
            continue
        if c < lo or c > hi:
            if out_of_hull == "error":
                raise GridIndexError(
                    f"point coordinate {c} outside [{lo}, {hi}] on axis {i}")
            c = min(max(c, lo), hi)
        t = (c - lo) / h
        j = min(int(np.floor(t)), n - 2)
        f = t - j
        if f <= 0:
            per_axis.append([(j, 1.0)])
        elif f >= 1:
            per_axis.append([(j + 1, 1.0)])
        else:
            per_axis.append([(j, 1.0 - f), (j + 1, f)])
    stencil = [((), 1.0)]
    for axis_terms in per_axis:
        stencil = [(idx + (j,), w * wj) for idx, w in stencil for j, wj in axis_terms]
    return stencil


class GridFunction:
    """Real values on the tensor grid of an x-domain and a v-domain.

    The backing array has shape ``x_shape + v_shape`` (x-major ordering).
    Values must be finite; constructors and arithmetic enforce this.
    """

    def __init__(self, domain_x: Domain, domain_v: Domain, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        expected = domain_x.shape + domain_v.shape
        if values.shape != expected:
            raise DomainError(
                f"values shape {values.shape} does not match grid shape {expected}")
        if not np.all(np.isfinite(values)):
            bad = tuple(int(i) for i in np.argwhere(~np.isfinite(values))[0])
            raise DomainError(f"non-finite value at node index {bad}")
        self.domain_x = domain_x
        self.domain_v = domain_v
        self.values = values

    @classmethod
    def constant(cls, domain_x: Domain, domain_v: Domain, c: float) -> "GridFunction":
        return cls(domain_x, domain_v,
                   np.full(domain_x.shape + domain_v.shape, float(c)))

    @classmethod
    def from_array(cls, domain_x: Domain, domain_v: Domain,
                   values: np.ndarray) -> "GridFunction":
        return cls(domain_x, domain_v, np.array(values, dtype=float))

    def copy(self) -> "GridFunction":
        return GridFunction(self.domain_x, self.domain_v, self.values.copy())

    def same_grids(self, other: "GridFunction") -> bool:
        return self.domain_x == other.domain_x and self.domain_v == other.domain_v

    @property
    def x_shape(self) -> tuple[int, ...]:
        return self.domain_x.shape

    @property
    def v_shape(self) -> tuple[int, ...]:
        return self.domain_v.shape

    def as_xv(self) -> np.ndarray:
        """View shaped (num x nodes, num v nodes)."""
        return self.values.reshape(self.domain_x.num_nodes, self.domain_v.num_nodes)

    def __add__(self, other):
        arr = other.values if isinstance(other, GridFunction) else other
        return GridFunction(self.domain_x, self.domain_v, self.values + arr)

    def __sub__(self, other):
        arr = other.values if isinstance(other, GridFunction) else other
        return GridFunction(self.domain_x, self.domain_v, self.values - arr)

    def __mul__(self, scalar: float):
        return GridFunction(self.domain_x, self.domain_v, self.values * scalar)

    __rmul__ = __mul__

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))
