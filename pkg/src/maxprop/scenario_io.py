"""Line-oriented scenario file format.

Sections in square brackets, ``key = value`` entries, ``#`` comments.
Lists are comma-separated; vectors are space-separated reals inside
parentheses.  The exact grammar is documented in docs/scenario-format.md,
with annotated examples under docs/examples/.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .scenario import Scenario, ScenarioError, build_scenario

_SECTIONS = ("domain_x", "domain_v", "measure", "drift", "equation", "solver")

# keys whose values stay verbatim strings (field expressions, enums)
_STRING_KEYS = {"kind", "mode", "nonlocal", "source", "boundary", "sweep", "control_set"}
_INT_KEYS = {"resolution", "nodes", "sphere_count", "max_iterations"}
_BOOL_KEYS = {"periodic"}


def _strip_comment(line: str) -> str:
    depth = 0
    for i, ch in enumerate(line):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "#" and depth == 0:
            return line[:i]
    return line


def _split_list(text: str) -> list[str]:
    items, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        items.append(tail)
    return items


def _parse_scalar(item: str, key: str):
    if key in _BOOL_KEYS:
        low = item.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ScenarioError(f"{key}: expected a boolean, got {item!r}")
    if key in _INT_KEYS:
        try:
            return int(item)
        except ValueError as err:
            raise ScenarioError(f"{key}: expected an integer, got {item!r}") from err
    try:
        return float(item)
    except ValueError as err:
        raise ScenarioError(f"{key}: expected a number, got {item!r}") from err


# keys holding a single vector (one parenthesized group)
_VECTOR_KEYS = {"lower", "upper", "vector", "offset", "center"}


def _parse_value(text: str, section: str, key: str):
    text = text.strip()
    if key in _STRING_KEYS:
        return text
    items = _split_list(text)
    parsed = []
    for item in items:
        if item.startswith("(") and item.endswith(")"):
            inner = item[1:-1].split()
            parsed.append(tuple(_parse_scalar(tok, key) for tok in inner))
        else:
            parsed.append(_parse_scalar(item, key))
    if key in _VECTOR_KEYS:
        if len(parsed) != 1:
            raise ScenarioError(f"{key}: expected a single vector, got {text!r}")
        value = parsed[0]
        return value if isinstance(value, tuple) else (value,)
    if len(parsed) == 1 and not isinstance(parsed[0], tuple):
        return parsed[0]
    return parsed


def parse_scenario_text(text: str) -> dict:
    """Parse scenario file text into a configuration mapping."""
    config: dict[str, dict[str, Any]] = {}
    section: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ScenarioError(
                    f"line {lineno}: unknown section [{section}]")
            config.setdefault(section, {})
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if section is None:
            raise ScenarioError(f"line {lineno}: entry before any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        config[section][key] = _parse_value(value, section, key)
    return config


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return build_scenario(parse_scenario_text(fh.read()))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, tuple):
        return "(" + " ".join(_fmt(v) for v in value) + ")"
    if isinstance(value, (list, np.ndarray)):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def scenario_to_text(scenario: Scenario) -> str:
    """Serialize a scenario; reparsing reproduces every stored real exactly.

    Floats are written with ``repr``, which round-trips bit-exactly.
    """
    lines: list[str] = []
    for section in _SECTIONS:
        entries = scenario.config.get(section)
        if not entries:
            continue
        lines.append(f"[{section}]")
        for key, value in entries.items():
            lines.append(f"{key} = {_fmt(value)}")
        lines.append("")
    return "\n".join(lines)


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_text(scenario))
