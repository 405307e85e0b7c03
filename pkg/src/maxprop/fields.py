"""Scalar field specifications evaluated on tensor grids."""

from __future__ import annotations

import numpy as np

from .grids import Domain, GridFunction


class FieldError(ValueError):
    """Raised when a field specification cannot be evaluated."""


_SAFE_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt,
    "abs": np.abs, "sign": np.sign,
    "minimum": np.minimum, "maximum": np.maximum, "where": np.where,
    "floor": np.floor, "ceil": np.ceil,
    "arctan": np.arctan, "arcsin": np.arcsin, "arccos": np.arccos,
    "pi": np.pi, "e": np.e,
}


def _coordinate_arrays(domain_x: Domain, domain_v: Domain) -> dict:
    """Coordinate names -> arrays broadcastable to x_shape + v_shape."""
    nx, nv = domain_x.dimension, domain_v.dimension
    ns: dict = {}
    x_ones = (1,) * nv
    for i, ax in enumerate(domain_x.axes):
        shape = tuple(len(a) if j == i else 1 for j, a in enumerate(domain_x.axes)) + x_ones
        ns[f"x{i}"] = ax.reshape(shape)
    v_ones = (1,) * nx
    for i, ax in enumerate(domain_v.axes):
        shape = v_ones + tuple(len(a) if j == i else 1 for j, a in enumerate(domain_v.axes))
        ns[f"v{i}"] = ax.reshape(shape)
    ns.setdefault("x", ns["x0"])
    ns.setdefault("v", ns["v0"])
    if nx > 1:
        ns.setdefault("y", ns["x1"])
    return ns


def grid_sample(spec, domain_x: Domain, domain_v: Domain) -> GridFunction:
    """Evaluate a field spec pointwise on the tensor grid.

    Accepted specs: a number, the shorthand string ``"const:VALUE"``, an
    expression string over coordinates ``x0..``, ``v0..`` (aliases ``x``,
    ``y``, ``v``) and the usual elementary functions, a callable taking
    coordinate arrays, or a ready-made array (the tabulated form).
    A non-finite value at any node is an error naming that node.
    """
    shape = domain_x.shape + domain_v.shape
    if isinstance(spec, GridFunction):
        return spec
    if isinstance(spec, np.ndarray):
        values = np.broadcast_to(np.asarray(spec, dtype=float), shape).copy()
    elif isinstance(spec, (int, float)):
        values = np.full(shape, float(spec))
    elif callable(spec):
        ns = _coordinate_arrays(domain_x, domain_v)
        values = np.broadcast_to(np.asarray(spec(ns), dtype=float), shape).copy()
    elif isinstance(spec, str):
        text = spec.strip()
        if text.startswith("const:"):
            try:
                values = np.full(shape, float(text[len("const:"):]))
            except ValueError as err:
                raise FieldError(f"bad constant field {text!r}") from err
        else:
            ns = dict(_SAFE_FUNCS)
            ns.update(_coordinate_arrays(domain_x, domain_v))
            try:
                with np.errstate(all="ignore"):
                    raw = eval(compile(text, "<field>", "eval"), {"__builtins__": {}}, ns)
            except Exception as err:
                raise FieldError(f"cannot evaluate field expression {text!r}: {err}") from err
            values = np.broadcast_to(np.asarray(raw, dtype=float), shape).copy()
    else:
        raise FieldError(f"unsupported field spec of type {type(spec).__name__}")

    bad = ~np.isfinite(values)
    if np.any(bad):
        node = tuple(int(i) for i in np.argwhere(bad)[0])
        raise FieldError(f"field evaluates to a non-finite value at node {node}")
    return GridFunction(domain_x, domain_v, values)
