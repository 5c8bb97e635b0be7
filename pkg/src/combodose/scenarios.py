"""Built-in simulation scenarios.

Desk-scale scenario set: for each grid size (3x4 and 5x6) six monotone
rate matrices place the true MTD plateau low, mid, or high on the grid,
vary the steepness of the dose-toxicity surface, and include one grid
with uneven step sizes.  Scenarios flagged `retainment_favorable` have a
clear plateau at the target rate, the setting where early completion is
expected to save patients without hurting selection.
"""

from __future__ import annotations

import json
import numpy as np

from .design import ParameterError
from .simulate import Scenario


def anchored_scenario(
    name: str,
    J: int,
    K: int,
    anchor: tuple[int, int],
    phi: float = 0.3,
    step_below: float = 0.08,
    step_above: float = 0.12,
    retainment_favorable: bool = False,
) -> Scenario:
    """Monotone grid whose anti-diagonal through `anchor` sits at phi."""
    j0, k0 = anchor
    rows = []
    for j in range(J):
        row = []
        for k in range(K):
            d = (j - j0) + (k - k0)
            step = step_above if d > 0 else step_below
            row.append(float(np.clip(phi + step * d, 0.02, 0.60)))
        rows.append(tuple(row))
    return Scenario(
        name=name, true_p=tuple(rows), retainment_favorable=retainment_favorable
    )


def flat_scenario(name: str, J: int, K: int, base: float, step: float) -> Scenario:
    rows = tuple(
        tuple(float(np.clip(base + step * (j + k), 0.0, 1.0)) for k in range(K))
        for j in range(J)
    )
    return Scenario(name=name, true_p=rows)


_BUILTIN_3X4 = [
    (
        "low-plateau",
        (
            (0.08, 0.30, 0.55, 0.60),
            (0.30, 0.55, 0.60, 0.60),
            (0.55, 0.60, 0.60, 0.60),
        ),
        True,
    ),
    (
        "mid-diagonal",
        (
            (0.05, 0.15, 0.30, 0.45),
            (0.15, 0.30, 0.45, 0.60),
            (0.30, 0.45, 0.60, 0.60),
        ),
        True,
    ),
    (
        "mid-plateau",
        (
            (0.05, 0.16, 0.30, 0.30),
            (0.16, 0.30, 0.30, 0.50),
            (0.30, 0.30, 0.50, 0.60),
        ),
        True,
    ),
    (
        "steep-diagonal",
        (
            (0.02, 0.12, 0.30, 0.48),
            (0.12, 0.30, 0.48, 0.60),
            (0.30, 0.48, 0.60, 0.60),
        ),
        True,
    ),
    (
        "high-plateau",
        (
            (0.03, 0.06, 0.10, 0.30),
            (0.06, 0.10, 0.30, 0.30),
            (0.10, 0.30, 0.30, 0.30),
        ),
        True,
    ),
    (
        "uneven-steps",
        (
            (0.05, 0.10, 0.20, 0.45),
            (0.10, 0.20, 0.45, 0.60),
            (0.20, 0.45, 0.60, 0.62),
        ),
        False,
    ),
]

_BUILTIN_5X6 = [
    (
        "low-plateau",
        (
            (0.08, 0.30, 0.50, 0.60, 0.60, 0.60),
            (0.30, 0.50, 0.60, 0.60, 0.60, 0.60),
            (0.50, 0.60, 0.60, 0.60, 0.60, 0.60),
            (0.60, 0.60, 0.60, 0.60, 0.60, 0.60),
            (0.60, 0.60, 0.60, 0.60, 0.60, 0.60),
        ),
        True,
    ),
    (
        "mid-diagonal",
        (
            (0.02, 0.02, 0.02, 0.15, 0.30, 0.45),
            (0.02, 0.02, 0.15, 0.30, 0.45, 0.60),
            (0.02, 0.15, 0.30, 0.45, 0.60, 0.60),
            (0.15, 0.30, 0.45, 0.60, 0.60, 0.60),
            (0.30, 0.45, 0.60, 0.60, 0.60, 0.60),
        ),
        True,
    ),
    (
        "mid-plateau",
        (
            (0.05, 0.10, 0.16, 0.30, 0.30, 0.45),
            (0.10, 0.16, 0.30, 0.30, 0.45, 0.60),
            (0.16, 0.30, 0.30, 0.45, 0.60, 0.60),
            (0.30, 0.30, 0.45, 0.60, 0.60, 0.60),
            (0.30, 0.45, 0.60, 0.60, 0.60, 0.60),
        ),
        True,
    ),
    (
        "steep-diagonal",
        (
            (0.02, 0.02, 0.02, 0.12, 0.30, 0.48),
            (0.02, 0.02, 0.12, 0.30, 0.48, 0.60),
            (0.02, 0.12, 0.30, 0.48, 0.60, 0.60),
            (0.12, 0.30, 0.48, 0.60, 0.60, 0.60),
            (0.30, 0.48, 0.60, 0.60, 0.60, 0.60),
        ),
        True,
    ),
    (
        "high-plateau",
        (
            (0.02, 0.03, 0.04, 0.06, 0.08, 0.10),
            (0.03, 0.04, 0.06, 0.08, 0.10, 0.30),
            (0.04, 0.06, 0.08, 0.10, 0.30, 0.30),
            (0.06, 0.08, 0.10, 0.30, 0.30, 0.30),
            (0.08, 0.10, 0.30, 0.30, 0.30, 0.30),
        ),
        True,
    ),
    (
        "uneven-steps",
        (
            (0.03, 0.06, 0.10, 0.16, 0.30, 0.50),
            (0.06, 0.10, 0.16, 0.30, 0.50, 0.60),
            (0.10, 0.16, 0.30, 0.50, 0.60, 0.62),
            (0.16, 0.30, 0.50, 0.60, 0.62, 0.64),
            (0.30, 0.50, 0.60, 0.62, 0.64, 0.66),
        ),
        False,
    ),
]


def builtin_scenarios(grid: str = "3x4") -> list[Scenario]:
    if grid == "3x4":
        raw = _BUILTIN_3X4
    elif grid == "5x6":
        raw = _BUILTIN_5X6
    else:
        raise ParameterError(f"unknown grid {grid!r}, expected '3x4' or '5x6'")
    return [
        Scenario(name=f"{grid}-{tag}", true_p=rows, retainment_favorable=fav)
        for tag, rows, fav in raw
    ]


def all_builtin_scenarios() -> list[Scenario]:
    return builtin_scenarios("3x4") + builtin_scenarios("5x6")


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "name": s.name,
        "true_p": [list(row) for row in s.true_p],
        "retainment_favorable": s.retainment_favorable,
    }


def scenario_from_dict(doc: dict) -> Scenario:
    return Scenario(
        name=doc["name"],
        true_p=tuple(tuple(float(x) for x in row) for row in doc["true_p"]),
        retainment_favorable=bool(doc.get("retainment_favorable", False)),
    )


def load_scenario_file(path) -> Scenario:
    """JSON ({name, true_p}) or CSV (bare rate matrix, name from stem)."""
    import csv as _csv
    from pathlib import Path

    path = Path(path)
    if path.suffix.lower() == ".json":
        return scenario_from_dict(json.loads(path.read_text()))
    with open(path, newline="") as fh:
        rows = [
            tuple(float(x) for x in row) for row in _csv.reader(fh) if row
        ]
    return Scenario(name=path.stem, true_p=tuple(rows))


def load_scenarios(path) -> list[Scenario]:
    """A single scenario file or a directory of .json/.csv files."""
    from pathlib import Path

    path = Path(path)
    if path.is_dir():
        files = sorted(
            p for p in path.iterdir() if p.suffix.lower() in (".json", ".csv")
        )
        if not files:
            raise ParameterError(f"no scenario files in {path}")
        return [load_scenario_file(p) for p in files]
    return [load_scenario_file(path)]
