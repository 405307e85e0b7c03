"""Drift fields b(x, v, a) and control-set discretizations.

All built-in kinds are independent of x, so evaluation broadcasts over any
leading grid shape.  The Lipschitz bound in (x, v) jointly is declared per
kind and can be sampled against random pairs in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .measures import sphere_directions

DRIFT_KINDS = ("velocity-identity", "constant-vector", "control-direction", "affine")
CONTROL_KINDS = ("empty", "finite", "sphere")


class DriftError(ValueError):
    """Raised for an invalid drift description."""


@dataclass(frozen=True)
class ControlSet:
    """Discretized control set: nothing, a finite list, or sphere-with-zero.

    ``empty`` means the equation has a single uncontrolled drift term, so
    ``vectors`` holds the single placeholder control ``None`` consumers can
    iterate over uniformly.
    """

    kind: str
    vectors: tuple = ()

    @classmethod
    def empty(cls) -> "ControlSet":
        return cls("empty", ())

    @classmethod
    def finite(cls, vectors: Sequence[Sequence[float]]) -> "ControlSet":
        vecs = tuple(np.asarray(v, dtype=float) for v in vectors)
        if not vecs:
            raise DriftError("drift.controls: finite control set must be nonempty")
        return cls("finite", vecs)

    @classmethod
    def sphere_with_zero(cls, dim: int, count: int | None = None) -> "ControlSet":
        # default direction count scales linearly with dimension (16 in 2D)
        k = 8 * dim if count is None else int(count)
        dirs = sphere_directions(dim, k)
        vecs = tuple(d for d in dirs) + (np.zeros(dim),)
        return cls("sphere", vecs)

    def controls(self) -> tuple:
        """Iteration handles; (None,) for the uncontrolled case."""
        return (None,) if self.kind == "empty" else self.vectors

    def __len__(self) -> int:
        return len(self.controls())


@dataclass(frozen=True)
class DriftField:
    """Evaluator for b(x, v, a) with a declared joint Lipschitz constant."""

    kind: str
    control_set: ControlSet
    constant: np.ndarray | None = None
    matrix: np.ndarray | None = None
    offset: np.ndarray | None = None
    lipschitz: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in DRIFT_KINDS:
            raise DriftError(f"drift.kind: unknown kind {self.kind!r}")

    @classmethod
    def velocity_identity(cls) -> "DriftField":
        """b(x, v) = v."""
        return cls("velocity-identity", ControlSet.empty(), lipschitz=1.0)

    @classmethod
    def constant_vector(cls, c: Sequence[float]) -> "DriftField":
        """b(x, v) = c."""
        return cls("constant-vector", ControlSet.empty(),
                   constant=np.asarray(c, dtype=float), lipschitz=0.0)

    @classmethod
    def control_direction(cls, control_set: ControlSet) -> "DriftField":
        """b(x, v, a) = a."""
        if control_set.kind == "empty":
            raise DriftError("drift.control_set: control-direction drift needs controls")
        return cls("control-direction", control_set, lipschitz=0.0)

    @classmethod
    def affine(cls, matrix: Sequence[Sequence[float]],
               offset: Sequence[float] | None = None) -> "DriftField":
        """b(x, v) = A v + c."""
        a = np.atleast_2d(np.asarray(matrix, dtype=float))
        c = np.zeros(a.shape[0]) if offset is None else np.asarray(offset, dtype=float)
        lip = float(np.linalg.norm(a, 2))
        return cls("affine", ControlSet.empty(), matrix=a, offset=c, lipschitz=lip)

    def __call__(self, x: np.ndarray, v: np.ndarray, alpha=None) -> np.ndarray:
        """Evaluate b; x and v broadcast over leading axes, last axis = component."""
        v = np.asarray(v, dtype=float)
        if self.kind == "velocity-identity":
            return v
        if self.kind == "constant-vector":
            return np.broadcast_to(self.constant, v.shape).copy()
        if self.kind == "control-direction":
            if alpha is None:
                raise DriftError("control-direction drift evaluated without a control")
            a = np.asarray(alpha, dtype=float)
            return np.broadcast_to(a, v.shape[:-1] + a.shape).copy()
        out = v @ self.matrix.T + self.offset
        return out

    def drift_vectors(self, support_nodes: np.ndarray) -> np.ndarray:
        """Distinct drift values over (support node, control) pairs.

        These are the constant slopes of the single-segment trajectories the
        reachability layers are built from.  Duplicates are removed.
        """
        vals = []
        for alpha in self.control_set.controls():
            b = self(np.zeros(support_nodes.shape[1]), support_nodes, alpha)
            vals.append(np.atleast_2d(b))
        allv = np.vstack(vals)
        rounded = np.round(allv, 12)
        _, keep = np.unique(rounded, axis=0, return_index=True)
        return allv[np.sort(keep)]

    def max_component_bound(self, v_samples: np.ndarray) -> np.ndarray:
        """Per-axis bound on |b_i| over the given v samples and all controls."""
        best = None
        for alpha in self.control_set.controls():
            b = np.abs(self(np.zeros(v_samples.shape[1]), v_samples, alpha))
            m = b.max(axis=tuple(range(b.ndim - 1)))
            best = m if best is None else np.maximum(best, m)
        return best
